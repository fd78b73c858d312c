#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linkgraph/ingest.hpp"
#include "linkgraph/taxonomy.hpp"

namespace linkgraph {

using VertexId = std::uint32_t;

/// Undirected simple graph over issue keys. Vertices are stored sorted by key
/// so vertex ids, component order and every report are deterministic.
class IssueGraph {
 public:
  IssueGraph() = default;

  /// Duplicate vertices and parallel edges are collapsed. An edge endpoint
  /// outside the vertex set or a self-loop raises IntegrityError.
  IssueGraph(std::vector<std::string> vertices,
             std::span<const std::pair<std::string, std::string>> edges);

  /// Vertices named by zero-padded index ("v007") so key order equals id order.
  static IssueGraph from_indices(std::size_t vertex_count,
                                 std::span<const std::pair<VertexId, VertexId>> edges);

  std::size_t vertex_count() const { return keys_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<std::string>& vertices() const { return keys_; }
  const std::string& key(VertexId v) const { return keys_[v]; }
  std::optional<VertexId> find(std::string_view key) const;

  /// Sorted neighbor list of v.
  std::span<const VertexId> neighbors(VertexId v) const { return adjacency_[v]; }
  std::size_t degree(VertexId v) const { return adjacency_[v].size(); }
  bool has_edge(VertexId u, VertexId v) const;

  /// Each edge once as (u, v) with u < v, in lexicographic order.
  std::vector<std::pair<VertexId, VertexId>> edges() const;

 private:
  std::vector<std::string> keys_;
  std::vector<std::vector<VertexId>> adjacency_;
  std::size_t edge_count_ = 0;
};

/// Which links of a repository span a graph.
struct GraphSlice {
  enum class Kind { All, Type, Category };

  Kind kind = Kind::All;
  std::string type_name;  // Kind::Type
  LinkCategory category = LinkCategory::Relation;  // Kind::Category

  static GraphSlice all() { return {}; }
  static GraphSlice of_type(std::string name) { return {Kind::Type, std::move(name), {}}; }
  static GraphSlice of_category(LinkCategory c) { return {Kind::Category, {}, c}; }

  /// "all", "type:<name>" or "category:<name>"; anything else is a ValidationError.
  static GraphSlice parse(std::string_view text);
  std::string to_string() const;
};

/// All repository issues as vertices, the retained links matching the slice as
/// edges.
IssueGraph build_graph(const Repository& repo, const LinkTaxonomy& taxonomy, const GraphSlice& slice);

struct Component {
  std::vector<std::string> vertices;  // sorted
  std::size_t edge_count = 0;
  std::vector<std::size_t> degree_sequence;  // aligned with vertices

  std::size_t size() const { return vertices.size(); }
};

/// Largest first; ties broken by smallest member key.
std::vector<Component> connected_components(const IssueGraph& graph);

/// edge_count / (n(n-1)/2). Precondition: at least two vertices.
double density(const Component& component);

/// Components with fewer than three vertices raise PreconditionError.
bool is_tree(const Component& component);
bool is_star(const Component& component);

struct ComplexityMetrics {
  std::optional<double> pct_isolated;    // over all vertices
  std::optional<double> pct_2comp;       // over components with >= 2 vertices
  std::optional<double> pct_3comp_plus;  // over components with >= 2 vertices
  std::optional<double> avg_density;     // mean over components with >= 3 vertices
};

struct ShapeMetrics {
  std::optional<double> pct_trees;  // over components with >= 3 vertices
  std::optional<double> pct_stars;
};

ComplexityMetrics complexity_metrics(const IssueGraph& graph);
ShapeMetrics shape_metrics(const IssueGraph& graph);

/// Pearson correlation of endpoint degrees over both orientations of every
/// edge. nullopt when the endpoint degrees have zero variance; a graph without
/// edges raises PreconditionError.
std::optional<double> degree_assortativity(const IssueGraph& graph);

/// Triangles, counted by intersecting degree-ordered forward neighbor lists.
std::uint64_t count_triangles(const IssueGraph& graph);
/// Connected triples: sum over vertices of C(deg, 2).
std::uint64_t count_triads(const IssueGraph& graph);
/// 3 * triangles / triads, or 0 when there are no triads.
double transitivity(const IssueGraph& graph);

struct GraphMetricsReport {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t components = 0;          // excluding isolated vertices
  std::size_t complex_components = 0;  // >= 3 vertices
  std::optional<double> pct_isolated;
  std::optional<double> pct_2comp;
  std::optional<double> pct_3comp_plus;
  std::optional<double> avg_density;
  std::optional<double> pct_trees;
  std::optional<double> pct_stars;
  std::optional<double> assortativity;
  double transitivity = 0.0;

  friend bool operator==(const GraphMetricsReport&, const GraphMetricsReport&) = default;
};

GraphMetricsReport metrics_report(const IssueGraph& graph);

}  // namespace linkgraph
