#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "linkgraph/graph.hpp"
#include "linkgraph/ingest.hpp"
#include "linkgraph/serialize.hpp"
#include "linkgraph/taxonomy.hpp"

namespace linkgraph {

/// Everything the cross-repository tables need from one repository.
struct RepositoryAnalysis {
  RepositorySummary summary;
  std::optional<CategoryPrevalence> categories;  // absent without categorizable links
  std::optional<TypePrevalence> types;
  GraphMetricsReport whole_graph;
  std::map<LinkCategory, GraphMetricsReport> by_category;
};

RepositoryAnalysis analyze_repository(const Repository& cleaned, const LinkTaxonomy& taxonomy);

Json to_json(const RepositoryAnalysis& analysis);
RepositoryAnalysis repository_analysis_from_json(const Json& doc);

/// "type,category,share" rows in name order.
std::string prevalence_csv(const TypePrevalence& prevalence, const LinkTaxonomy& taxonomy);
/// "category,share" rows in category order.
std::string prevalence_csv(const CategoryPrevalence& prevalence);
/// One row per slice: "slice" followed by the graph metric columns.
std::string metrics_csv(const std::vector<std::pair<std::string, GraphMetricsReport>>& rows);

struct Table {
  std::string name;  // file stem, e.g. "descriptive"
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
  std::string to_markdown() const;
};

/// Descriptive statistics: one row per repository; with two or more
/// repositories, Min / Max / Mean / StdDev rows follow.
Table descriptive_table(std::span<const RepositoryAnalysis> analyses);
/// Shares of canonical link types per repository.
Table type_share_table(std::span<const RepositoryAnalysis> analyses);
/// Shares of the five categories per repository.
Table category_share_table(std::span<const RepositoryAnalysis> analyses);
/// Whole-graph metrics per repository.
Table whole_graph_table(std::span<const RepositoryAnalysis> analyses);
/// One row per category, each metric averaged over repositories where it is
/// defined.
Table category_metrics_table(std::span<const RepositoryAnalysis> analyses);

/// All of the above. Throws PreconditionError on an empty input.
std::vector<Table> emit_tables(std::span<const RepositoryAnalysis> analyses);

}  // namespace linkgraph
