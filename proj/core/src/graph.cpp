#include "linkgraph/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "linkgraph/errors.hpp"

namespace linkgraph {

namespace {

struct ComponentInfo {
  std::vector<VertexId> members;  // ascending
  std::size_t edges = 0;
  std::size_t max_degree = 0;

  std::size_t size() const { return members.size(); }
  bool tree() const { return edges + 1 == members.size(); }
  bool star() const { return tree() && max_degree + 1 == members.size(); }
  double density() const {
    const double n = static_cast<double>(members.size());
    return static_cast<double>(edges) / (n * (n - 1.0) / 2.0);
  }
};

std::vector<ComponentInfo> component_infos(const IssueGraph& graph) {
  const std::size_t n = graph.vertex_count();
  std::vector<std::uint32_t> label(n, UINT32_MAX);
  std::vector<ComponentInfo> out;
  std::vector<VertexId> stack;
  for (VertexId start = 0; start < n; ++start) {
    if (label[start] != UINT32_MAX) continue;
    const auto id = static_cast<std::uint32_t>(out.size());
    ComponentInfo info;
    label[start] = id;
    stack.push_back(start);
    std::size_t degree_sum = 0;
    while (!stack.empty()) {
      const VertexId v = stack.back();
      stack.pop_back();
      info.members.push_back(v);
      degree_sum += graph.degree(v);
      info.max_degree = std::max(info.max_degree, graph.degree(v));
      for (VertexId w : graph.neighbors(v)) {
        if (label[w] == UINT32_MAX) {
          label[w] = id;
          stack.push_back(w);
        }
      }
    }
    std::sort(info.members.begin(), info.members.end());
    info.edges = degree_sum / 2;
    out.push_back(std::move(info));
  }
  // Discovery order is by smallest member, so a stable sort on size keeps the
  // smallest-key tie break.
  std::stable_sort(out.begin(), out.end(),
                   [](const ComponentInfo& a, const ComponentInfo& b) { return a.size() > b.size(); });
  return out;
}

std::string pad_index(std::size_t i, std::size_t width) {
  std::string digits = std::to_string(i);
  return "v" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

void require_shape_size(const Component& component) {
  if (component.size() < 3) {
    throw PreconditionError("shape analysis needs a component with at least three issues, got " +
                            std::to_string(component.size()));
  }
}

}  // namespace

IssueGraph::IssueGraph(std::vector<std::string> vertices,
                       std::span<const std::pair<std::string, std::string>> edges) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  keys_ = std::move(vertices);
  adjacency_.assign(keys_.size(), {});

  for (const auto& [a, b] : edges) {
    const auto u = find(a);
    const auto v = find(b);
    if (!u || !v) {
      throw IntegrityError("edge {" + a + ", " + b + "} has an endpoint outside the vertex set");
    }
    if (*u == *v) throw IntegrityError("self-loop on '" + a + "'");
    adjacency_[*u].push_back(*v);
    adjacency_[*v].push_back(*u);
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    edge_count_ += list.size();
  }
  edge_count_ /= 2;
}

IssueGraph IssueGraph::from_indices(std::size_t vertex_count,
                                    std::span<const std::pair<VertexId, VertexId>> edges) {
  const std::size_t width = std::to_string(vertex_count == 0 ? 0 : vertex_count - 1).size();
  std::vector<std::string> names;
  names.reserve(vertex_count);
  for (std::size_t i = 0; i < vertex_count; ++i) names.push_back(pad_index(i, width));
  std::vector<std::pair<std::string, std::string>> named;
  named.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    if (u >= vertex_count || v >= vertex_count) {
      throw IntegrityError("edge endpoint index out of range");
    }
    named.emplace_back(names[u], names[v]);
  }
  return IssueGraph(std::move(names), named);
}

std::optional<VertexId> IssueGraph::find(std::string_view key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == keys_.end() || *it != key) return std::nullopt;
  return static_cast<VertexId>(it - keys_.begin());
}

bool IssueGraph::has_edge(VertexId u, VertexId v) const {
  const auto& list = adjacency_[u];
  return std::binary_search(list.begin(), list.end(), v);
}

std::vector<std::pair<VertexId, VertexId>> IssueGraph::edges() const {
  std::vector<std::pair<VertexId, VertexId>> out;
  out.reserve(edge_count_);
  for (VertexId u = 0; u < adjacency_.size(); ++u) {
    for (VertexId v : adjacency_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

GraphSlice GraphSlice::parse(std::string_view text) {
  if (text == "all") return all();
  if (text.substr(0, 5) == "type:" && text.size() > 5) return of_type(std::string(text.substr(5)));
  if (text.substr(0, 9) == "category:") {
    if (auto c = parse_category(text.substr(9))) return of_category(*c);
    throw ValidationError("unknown link category '" + std::string(text.substr(9)) + "'");
  }
  throw ValidationError("unknown graph slice '" + std::string(text) +
                        "' (expected all, type:<name> or category:<name>)");
}

std::string GraphSlice::to_string() const {
  switch (kind) {
    case Kind::All: return "all";
    case Kind::Type: return "type:" + type_name;
    case Kind::Category: return "category:" + std::string(linkgraph::to_string(category));
  }
  return "all";
}

IssueGraph build_graph(const Repository& repo, const LinkTaxonomy& taxonomy, const GraphSlice& slice) {
  if (!repo.cleaned) throw PreconditionError("build_graph expects a cleaned repository");

  std::string wanted_type;
  if (slice.kind == GraphSlice::Kind::Type) {
    try {
      wanted_type = taxonomy.normalize_type(slice.type_name);
    } catch (const UnknownTypeError&) {
      throw ValidationError("unknown link type slice '" + slice.type_name + "'");
    }
    if (!taxonomy.knows(wanted_type)) {
      throw ValidationError("unknown link type slice '" + slice.type_name + "'");
    }
  }

  std::vector<std::string> vertices;
  vertices.reserve(repo.issues.size());
  for (const auto& [key, issue] : repo.issues) vertices.push_back(key);

  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& link : repo.links) {
    bool keep = true;
    switch (slice.kind) {
      case GraphSlice::Kind::All:
        break;
      case GraphSlice::Kind::Type:
        keep = taxonomy.normalize_type(link.raw_type) == wanted_type;
        break;
      case GraphSlice::Kind::Category:
        keep = taxonomy.categorize(taxonomy.normalize_type(link.raw_type)) == slice.category;
        break;
    }
    if (keep) edges.emplace_back(link.source, link.target);
  }
  return IssueGraph(std::move(vertices), edges);
}

std::vector<Component> connected_components(const IssueGraph& graph) {
  std::vector<Component> out;
  for (const auto& info : component_infos(graph)) {
    Component c;
    c.edge_count = info.edges;
    c.vertices.reserve(info.size());
    c.degree_sequence.reserve(info.size());
    for (VertexId v : info.members) {
      c.vertices.push_back(graph.key(v));
      c.degree_sequence.push_back(graph.degree(v));
    }
    out.push_back(std::move(c));
  }
  return out;
}

double density(const Component& component) {
  if (component.size() < 2) throw PreconditionError("density needs at least two vertices");
  const double n = static_cast<double>(component.size());
  return static_cast<double>(component.edge_count) / (n * (n - 1.0) / 2.0);
}

bool is_tree(const Component& component) {
  require_shape_size(component);
  return component.edge_count + 1 == component.size();
}

bool is_star(const Component& component) {
  require_shape_size(component);
  if (!is_tree(component)) return false;
  const auto max_degree =
      *std::max_element(component.degree_sequence.begin(), component.degree_sequence.end());
  return max_degree + 1 == component.size();
}

ComplexityMetrics complexity_metrics(const IssueGraph& graph) {
  ComplexityMetrics m;
  if (graph.vertex_count() == 0) return m;

  std::size_t isolated = 0, pairs = 0, complex = 0;
  double density_sum = 0.0;
  for (const auto& c : component_infos(graph)) {
    if (c.size() == 1) {
      ++isolated;
    } else if (c.size() == 2) {
      ++pairs;
    } else {
      ++complex;
      density_sum += c.density();
    }
  }
  m.pct_isolated = static_cast<double>(isolated) / static_cast<double>(graph.vertex_count());
  if (pairs + complex > 0) {
    const double denom = static_cast<double>(pairs + complex);
    m.pct_2comp = static_cast<double>(pairs) / denom;
    m.pct_3comp_plus = static_cast<double>(complex) / denom;
  }
  if (complex > 0) m.avg_density = density_sum / static_cast<double>(complex);
  return m;
}

ShapeMetrics shape_metrics(const IssueGraph& graph) {
  std::size_t complex = 0, trees = 0, stars = 0;
  for (const auto& c : component_infos(graph)) {
    if (c.size() < 3) continue;
    ++complex;
    if (c.tree()) ++trees;
    if (c.star()) ++stars;
  }
  ShapeMetrics m;
  if (complex > 0) {
    m.pct_trees = static_cast<double>(trees) / static_cast<double>(complex);
    m.pct_stars = static_cast<double>(stars) / static_cast<double>(complex);
  }
  return m;
}

__extension__ typedef __int128 Wide;

std::optional<double> degree_assortativity(const IssueGraph& graph) {
  if (graph.edge_count() == 0) {
    throw PreconditionError("degree assortativity needs at least one edge");
  }
  // With both orientations of every edge, x and y share one marginal, so the
  // Pearson coefficient reduces to integer sums over edges:
  //   r = (4 M P - S1^2) / (2 M S2 - S1^2)
  // with P = sum j k, S1 = sum (j + k), S2 = sum (j^2 + k^2).
  Wide m = 0, p = 0, s1 = 0, s2 = 0;
  for (VertexId u = 0; u < graph.vertex_count(); ++u) {
    const Wide j = static_cast<Wide>(graph.degree(u));
    for (VertexId v : graph.neighbors(u)) {
      if (v < u) continue;
      const Wide k = static_cast<Wide>(graph.degree(v));
      ++m;
      p += j * k;
      s1 += j + k;
      s2 += j * j + k * k;
    }
  }
  const Wide numerator = 4 * m * p - s1 * s1;
  const Wide denominator = 2 * m * s2 - s1 * s1;
  if (denominator == 0) return std::nullopt;
  return static_cast<double>(static_cast<long double>(numerator) / static_cast<long double>(denominator));
}

std::uint64_t count_triangles(const IssueGraph& graph) {
  const std::size_t n = graph.vertex_count();
  auto ranks_before = [&](VertexId a, VertexId b) {
    const auto da = graph.degree(a), db = graph.degree(b);
    return da != db ? da < db : a < b;
  };
  // Orient every edge toward the higher-ranked endpoint; each triangle is then
  // found exactly once from its lowest-ranked vertex.
  std::vector<std::vector<VertexId>> forward(n);
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v : graph.neighbors(u)) {
      if (ranks_before(u, v)) forward[u].push_back(v);
    }
  }
  std::uint64_t triangles = 0;
  for (VertexId u = 0; u < n; ++u) {
    const auto& fu = forward[u];
    for (VertexId v : fu) {
      const auto& fv = forward[v];
      auto a = fu.begin();
      auto b = fv.begin();
      while (a != fu.end() && b != fv.end()) {
        if (*a < *b) {
          ++a;
        } else if (*b < *a) {
          ++b;
        } else {
          ++triangles;
          ++a;
          ++b;
        }
      }
    }
  }
  return triangles;
}

std::uint64_t count_triads(const IssueGraph& graph) {
  std::uint64_t triads = 0;
  for (VertexId v = 0; v < graph.vertex_count(); ++v) {
    const std::uint64_t d = graph.degree(v);
    triads += d * (d - (d > 0 ? 1 : 0)) / 2;
  }
  return triads;
}

double transitivity(const IssueGraph& graph) {
  const auto triads = count_triads(graph);
  if (triads == 0) return 0.0;
  return 3.0 * static_cast<double>(count_triangles(graph)) / static_cast<double>(triads);
}

GraphMetricsReport metrics_report(const IssueGraph& graph) {
  GraphMetricsReport r;
  r.vertices = graph.vertex_count();
  r.edges = graph.edge_count();
  for (const auto& c : component_infos(graph)) {
    if (c.size() >= 2) ++r.components;
    if (c.size() >= 3) ++r.complex_components;
  }
  const auto complexity = complexity_metrics(graph);
  r.pct_isolated = complexity.pct_isolated;
  r.pct_2comp = complexity.pct_2comp;
  r.pct_3comp_plus = complexity.pct_3comp_plus;
  r.avg_density = complexity.avg_density;
  const auto shape = shape_metrics(graph);
  r.pct_trees = shape.pct_trees;
  r.pct_stars = shape.pct_stars;
  if (graph.edge_count() > 0) r.assortativity = degree_assortativity(graph);
  r.transitivity = transitivity(graph);
  return r;
}

}  // namespace linkgraph
