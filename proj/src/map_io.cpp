#include "gnav/map_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "gnav/errors.hpp"

namespace gnav {
namespace {

constexpr char kMagic[8] = {'G', 'N', 'A', 'V', 'M', 'A', 'P', '\0'};

class Writer {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename T>
  void le(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::uint8_t buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    raw(buf, sizeof(T));
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) { le(v); }
  void u64(std::uint64_t v) { le(v); }
  void f32(float v) { le(v); }
  void f64(double v) { le(v); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}
  void raw(void* p, std::size_t n) {
    if (pos_ + n > in_.size()) throw IoError("map file truncated");
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  template <typename T>
  T le() {
    std::uint8_t buf[sizeof(T)];
    raw(buf, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
  }
  std::uint8_t u8() { return le<std::uint8_t>(); }
  std::uint32_t u32() { return le<std::uint32_t>(); }
  std::uint64_t u64() { return le<std::uint64_t>(); }
  float f32() { return le<float>(); }
  double f64() { return le<double>(); }
  bool done() const { return pos_ == in_.size(); }
  std::size_t remaining() const { return in_.size() - pos_; }
  /// Element count prefix, bounded by the bytes left so corrupt counts cannot force huge allocations.
  std::size_t count(std::size_t item_bytes) {
    const std::uint32_t n = u32();
    if (static_cast<std::size_t>(n) * item_bytes > in_.size() - pos_) throw IoError("map file truncated");
    return n;
  }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_map(const TerrainMap& map) {
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.u32(kMapFormatVersion);
  const WorldConfig& c = map.config();
  w.u64(c.seed);
  w.f64(c.extent_x);
  w.f64(c.extent_z);
  w.f64(c.height_scale);
  w.f64(c.cell_size);
  w.u32(static_cast<std::uint32_t>(c.noise_octaves));
  w.u32(static_cast<std::uint32_t>(c.features.buildings));
  w.u32(static_cast<std::uint32_t>(c.features.plateaus));
  w.u32(static_cast<std::uint32_t>(c.features.jump_pads));
  w.f64(c.hazard_fraction);
  w.u32(static_cast<std::uint32_t>(map.cells_x()));
  w.u32(static_cast<std::uint32_t>(map.cells_z()));
  for (float h : map.heights()) w.f32(h);
  for (CellKind k : map.kinds()) w.u8(static_cast<std::uint8_t>(k));
  w.u32(static_cast<std::uint32_t>(map.boxes().size()));
  for (const Box& b : map.boxes()) {
    w.f64(b.min_x);
    w.f64(b.min_z);
    w.f64(b.max_x);
    w.f64(b.max_z);
    w.f64(b.bottom);
    w.f64(b.top);
    w.u8(b.walkable_roof ? 1 : 0);
  }
  w.u32(static_cast<std::uint32_t>(map.jump_pads().size()));
  for (const JumpPad& p : map.jump_pads()) {
    w.f64(p.position.x);
    w.f64(p.position.y);
    w.f64(p.position.z);
    w.f64(p.impulse);
    w.f64(p.radius);
  }
  return w.take();
}

TerrainMap decode_map(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  char magic[8];
  r.raw(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw IoError("not a map file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kMapFormatVersion) throw IoError("unsupported map format version " + std::to_string(version));
  WorldConfig c;
  c.seed = r.u64();
  c.extent_x = r.f64();
  c.extent_z = r.f64();
  c.height_scale = r.f64();
  c.cell_size = r.f64();
  c.noise_octaves = static_cast<int>(r.u32());
  c.features.buildings = static_cast<int>(r.u32());
  c.features.plateaus = static_cast<int>(r.u32());
  c.features.jump_pads = static_cast<int>(r.u32());
  c.hazard_fraction = r.f64();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw IoError(std::string("corrupt map configuration: ") + e.what());
  }
  const std::uint32_t nx = r.u32();
  const std::uint32_t nz = r.u32();
  if (static_cast<int>(nx) != c.cells_x() || static_cast<int>(nz) != c.cells_z())
    throw IoError("map grid size disagrees with its configuration");
  const std::size_t cells = static_cast<std::size_t>(nx) * nz;
  if (cells * 5 > r.remaining()) throw IoError("map file truncated");
  std::vector<float> heights(cells);
  for (float& h : heights) h = r.f32();
  std::vector<CellKind> kinds(cells);
  for (CellKind& k : kinds) {
    const std::uint8_t v = r.u8();
    if (v > 2) throw IoError("invalid cell kind in map file");
    k = static_cast<CellKind>(v);
  }
  std::vector<Box> boxes(r.count(6 * 8 + 1));
  for (Box& b : boxes) {
    b.min_x = r.f64();
    b.min_z = r.f64();
    b.max_x = r.f64();
    b.max_z = r.f64();
    b.bottom = r.f64();
    b.top = r.f64();
    b.walkable_roof = r.u8() != 0;
  }
  std::vector<JumpPad> pads(r.count(5 * 8));
  for (JumpPad& p : pads) {
    p.position.x = r.f64();
    p.position.y = r.f64();
    p.position.z = r.f64();
    p.impulse = r.f64();
    p.radius = r.f64();
  }
  if (!r.done()) throw IoError("trailing bytes after map payload");
  try {
    return TerrainMap(c, std::move(heights), std::move(kinds), std::move(boxes), std::move(pads));
  } catch (const ConfigError& e) {
    throw IoError(std::string("corrupt map payload: ") + e.what());
  }
}

void save_map(const TerrainMap& map, const std::filesystem::path& path) {
  const auto bytes = encode_map(map);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

TerrainMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open map file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_map(bytes);
}

}  // namespace gnav
