#include "gnav/nav_graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "gnav/errors.hpp"

namespace gnav {

using nlohmann::json;

std::string_view to_string(PlacementMethod m) {
  return m == PlacementMethod::unconstrained ? "unconstrained" : "distance_constrained";
}

PlacementMethod parse_placement_method(std::string_view s) {
  if (s == "unconstrained") return PlacementMethod::unconstrained;
  if (s == "constrained" || s == "distance_constrained") return PlacementMethod::distance_constrained;
  throw ConfigError("unknown placement method '" + std::string(s) + "'");
}

NavGraph::NavGraph(std::vector<Position> vertices, std::vector<Edge> edges, BuildMeta meta)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), meta_(meta) {
  const auto n = static_cast<VertexId>(vertices_.size());
  std::sort(edges_.begin(), edges_.end());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.src >= n || e.dst >= n) throw ConfigError("edge references a missing vertex");
    if (e.src == e.dst) throw ConfigError("self-edge on vertex " + std::to_string(e.src));
    if (e.cost == 0) throw ConfigError("edge cost must be positive");
    if (i > 0 && edges_[i - 1].src == e.src && edges_[i - 1].dst == e.dst) throw ConfigError("duplicate edge");
  }
  out_offsets_.assign(n + 1, 0);
  in_offsets_.assign(n + 1, 0);
  for (const Edge& e : edges_) {
    ++out_offsets_[e.src + 1];
    ++in_offsets_[e.dst + 1];
  }
  std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
  std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
  out_.resize(edges_.size());
  in_.resize(edges_.size());
  std::vector<std::uint32_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    out_[i] = {e.dst, e.cost};  // edges are sorted by src, so this is already CSR order
    in_[in_fill[e.dst]++] = {e.src, e.cost};
  }
  index_ = SpatialGrid(vertices_);
}

std::optional<EdgeCost> NavGraph::edge_cost(VertexId src, VertexId dst) const {
  if (src >= vertices_.size()) return std::nullopt;
  const auto arcs = out_arcs(src);
  const auto it = std::lower_bound(arcs.begin(), arcs.end(), dst, [](const Arc& a, VertexId v) { return a.to < v; });
  if (it == arcs.end() || it->to != dst) return std::nullopt;
  return it->cost;
}

std::size_t weakly_connected_components(const NavGraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  const auto find = [&](std::uint32_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  std::size_t components = n;
  for (const Edge& e : g.edges()) {
    const auto a = find(e.src);
    const auto b = find(e.dst);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);
      --components;
    }
  }
  return components;
}

std::string graph_to_json(const NavGraph& g) {
  const BuildMeta& m = g.meta();
  json meta = {
      {"method", std::string(to_string(m.method))},
      {"n_requested", m.n_requested},
      {"k_requested", m.k_requested},
      {"k_effective", m.k_effective},
      {"repeats", m.repeats},
      {"success_threshold", m.success_threshold},
      {"seed", m.seed},
      {"initial_radius", m.initial_radius},
      {"final_radius", m.final_radius},
      {"candidate_edges", m.candidate_edges},
      {"probe_episodes", m.probe_episodes},
      {"build_wall_time_s", m.build_wall_time_s},
  };
  json vertices = json::array();
  for (VertexId i = 0; i < g.vertex_count(); ++i) {
    const Position& p = g.vertex(i);
    vertices.push_back({{"id", i}, {"x", p.x}, {"y", p.y}, {"z", p.z}});
  }
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({{"src", e.src}, {"dst", e.dst}, {"cost", e.cost}});
  const json doc = {{"version", kGraphFormatVersion}, {"build_meta", meta}, {"vertices", vertices}, {"edges", edges}};
  return doc.dump(2) + "\n";
}

NavGraph graph_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("graph file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != kGraphFormatVersion) throw IoError("unsupported graph format version");
    const json& jm = doc.at("build_meta");
    BuildMeta m;
    m.method = parse_placement_method(jm.at("method").get<std::string>());
    m.n_requested = jm.at("n_requested").get<int>();
    m.k_requested = jm.at("k_requested").get<int>();
    m.k_effective = jm.at("k_effective").get<int>();
    m.repeats = jm.at("repeats").get<int>();
    m.success_threshold = jm.at("success_threshold").get<double>();
    m.seed = jm.at("seed").get<std::uint64_t>();
    m.initial_radius = jm.at("initial_radius").get<double>();
    m.final_radius = jm.at("final_radius").get<double>();
    m.candidate_edges = jm.at("candidate_edges").get<std::size_t>();
    m.probe_episodes = jm.at("probe_episodes").get<std::size_t>();
    m.build_wall_time_s = jm.at("build_wall_time_s").get<double>();

    std::vector<Position> vertices;
    const json& jv = doc.at("vertices");
    vertices.reserve(jv.size());
    for (std::size_t i = 0; i < jv.size(); ++i) {
      if (jv[i].at("id").get<std::size_t>() != i) throw IoError("graph vertices must be sorted by id from 0");
      vertices.push_back({jv[i].at("x").get<double>(), jv[i].at("y").get<double>(), jv[i].at("z").get<double>()});
    }
    std::vector<Edge> edges;
    for (const json& je : doc.at("edges")) {
      edges.push_back({je.at("src").get<VertexId>(), je.at("dst").get<VertexId>(), je.at("cost").get<EdgeCost>()});
    }
    return NavGraph(std::move(vertices), std::move(edges), m);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed graph file: ") + e.what());
  } catch (const ConfigError& e) {
    throw IoError(std::string("invalid graph file: ") + e.what());
  }
}

void save_graph(const NavGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << graph_to_json(g);
  if (!out) throw IoError("failed writing " + path.string());
}

NavGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open graph file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return graph_from_json(ss.str());
}

}  // namespace gnav
