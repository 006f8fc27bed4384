#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gnav/geometry.hpp"
#include "gnav/spatial_index.hpp"

namespace gnav {

using VertexId = std::uint32_t;
using EdgeCost = std::uint32_t;  // probe episode steps

struct Edge {
  VertexId src = 0;
  VertexId dst = 0;
  EdgeCost cost = 0;
  auto operator<=>(const Edge&) const = default;
};

enum class PlacementMethod { unconstrained, distance_constrained };

std::string_view to_string(PlacementMethod m);
/// Accepts "unconstrained", "constrained" and "distance_constrained".
PlacementMethod parse_placement_method(std::string_view s);

struct BuildMeta {
  PlacementMethod method = PlacementMethod::distance_constrained;
  int n_requested = 0;
  int k_requested = 0;
  int k_effective = 0;  // clamped to |V| - 1
  int repeats = 0;
  double success_threshold = 0.0;
  std::uint64_t seed = 0;
  double initial_radius = 0.0;  // distance-constrained placement only
  double final_radius = 0.0;
  std::size_t candidate_edges = 0;
  std::size_t probe_episodes = 0;
  double build_wall_time_s = 0.0;
  bool operator==(const BuildMeta&) const = default;
};

/// Directed way-point graph. Vertex ids are indices into vertices(); edges are kept
/// sorted by (src, dst) with forward and reverse adjacency in CSR form.
class NavGraph {
 public:
  struct Arc {
    VertexId to;
    EdgeCost cost;
  };

  NavGraph() = default;
  /// Throws ConfigError on dangling ids, self-edges, duplicate pairs or zero costs.
  NavGraph(std::vector<Position> vertices, std::vector<Edge> edges, BuildMeta meta = {});

  std::size_t vertex_count() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }
  std::span<const Position> vertices() const { return vertices_; }
  const Position& vertex(VertexId v) const { return vertices_[v]; }
  std::span<const Edge> edges() const { return edges_; }
  const BuildMeta& meta() const { return meta_; }

  std::span<const Arc> out_arcs(VertexId v) const {
    return std::span<const Arc>(out_).subspan(out_offsets_[v], out_offsets_[v + 1] - out_offsets_[v]);
  }
  std::span<const Arc> in_arcs(VertexId v) const {
    return std::span<const Arc>(in_).subspan(in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]);
  }
  std::optional<EdgeCost> edge_cost(VertexId src, VertexId dst) const;
  const SpatialGrid& index() const { return index_; }

 private:
  std::vector<Position> vertices_;
  std::vector<Edge> edges_;
  BuildMeta meta_;
  std::vector<std::uint32_t> out_offsets_;
  std::vector<Arc> out_;
  std::vector<std::uint32_t> in_offsets_;
  std::vector<Arc> in_;
  SpatialGrid index_;
};

/// Number of weakly connected components (isolated vertices count as components).
std::size_t weakly_connected_components(const NavGraph& g);

inline constexpr int kGraphFormatVersion = 1;

/// Canonical JSON: {version, build_meta, vertices:[{id,x,y,z}], edges:[{src,dst,cost}]},
/// sorted keys, two-space indent, trailing newline.
std::string graph_to_json(const NavGraph& g);
NavGraph graph_from_json(std::string_view text);
void save_graph(const NavGraph& g, const std::filesystem::path& path);
NavGraph load_graph(const std::filesystem::path& path);

}  // namespace gnav
