#include <cmath>
#include <numeric>

#include "gnav/worldgen.hpp"

namespace gnav {
namespace {

constexpr double kGrad[8][2] = {{1, 1}, {-1, 1}, {1, -1}, {-1, -1}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}};

inline double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }
inline double lerp(double a, double b, double t) { return a + t * (b - a); }
inline double grad(std::uint8_t hash, double x, double z) {
  const auto& g = kGrad[hash & 7];
  return g[0] * x + g[1] * z;
}

}  // namespace

PerlinNoise::PerlinNoise(std::uint64_t seed) {
  std::iota(perm_, perm_ + 256, 0);
  RngStream rng(seed);
  for (int i = 255; i > 0; --i) {
    const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm_[i], perm_[j]);
  }
  for (int i = 0; i < 256; ++i) perm_[256 + i] = perm_[i];
}

double PerlinNoise::noise(double x, double z) const {
  const double fx = std::floor(x);
  const double fz = std::floor(z);
  const int xi = static_cast<int>(static_cast<long long>(fx) & 255);
  const int zi = static_cast<int>(static_cast<long long>(fz) & 255);
  const double xf = x - fx;
  const double zf = z - fz;
  const double u = fade(xf);
  const double v = fade(zf);

  const int a = perm_[xi] + zi;
  const int b = perm_[xi + 1] + zi;
  const double n00 = grad(perm_[a], xf, zf);
  const double n10 = grad(perm_[b], xf - 1.0, zf);
  const double n01 = grad(perm_[a + 1], xf, zf - 1.0);
  const double n11 = grad(perm_[b + 1], xf - 1.0, zf - 1.0);
  return lerp(lerp(n00, n10, u), lerp(n01, n11, u), v);
}

double PerlinNoise::fractal(double x, double z, int octaves) const {
  double sum = 0.0;
  double amp = 1.0;
  double norm = 0.0;
  double freq = 1.0;
  for (int o = 0; o < octaves; ++o) {
    sum += amp * noise(x * freq, z * freq);
    norm += amp;
    amp *= 0.5;
    freq *= 2.0;
  }
  return norm > 0.0 ? sum / norm : 0.0;
}

double terrain_noise_height(const PerlinNoise& noise, const WorldConfig& config, double x, double z) {
  const double relief = kTerrainReliefFraction * config.height_scale;
  const double n = noise.fractal(x / kTerrainWavelength, z / kTerrainWavelength, config.noise_octaves);
  return relief * (0.5 + 0.5 * n);
}

}  // namespace gnav
