#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "linkgraph/dataset.hpp"
#include "linkgraph/eval.hpp"
#include "linkgraph/graph.hpp"
#include "linkgraph/ingest.hpp"
#include "linkgraph/model.hpp"
#include "linkgraph/taxonomy.hpp"

namespace linkgraph {

using Json = nlohmann::ordered_json;

Json to_json(const CleaningReport& report);
Json to_json(const Repository& repo);  // export schema plus "cleaning_report"
Json to_json(const RepositorySummary& summary);
Json to_json(const CategoryPrevalence& prevalence);
Json to_json(const TypePrevalence& prevalence);
/// Undefined metrics serialize as null.
Json to_json(const GraphMetricsReport& report);
Json to_json(const LabeledPair& pair);
Json to_json(const TrainingExample& example);
Json to_json(const ClassCounts& counts);
Json to_json(const SplitStats& stats);
Json to_json(const DatasetProvenance& provenance);
Json to_json(const EvalReport& report);
Json to_json(const ConfusionMatrix& matrix);
Json to_json(const RobustnessDelta& delta);
Json to_json(const TrainedModel& model);

GraphMetricsReport graph_metrics_from_json(const Json& doc);
LabeledPair labeled_pair_from_json(const Json& doc);
TrainedModel trained_model_from_json(const Json& doc);

/// Column names of the graph metric tables, in table order.
const std::vector<std::string>& graph_metric_columns();
/// One CSV cell per graph metric column; undefined values are empty cells.
std::vector<std::string> graph_metric_cells(const GraphMetricsReport& report);

/// Shortest round-trip decimal for a double; "" for nullopt.
std::string format_number(std::optional<double> value);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);
std::string csv_line(const std::vector<std::string>& fields);

std::string read_text_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: to a temp file, then renames.
void write_text_file(const std::filesystem::path& path, std::string_view contents);
void write_json_file(const std::filesystem::path& path, const Json& doc);
Json read_json_file(const std::filesystem::path& path);

/// train.jsonl, test_new.jsonl, test_traditional.jsonl and provenance.json.
std::vector<std::filesystem::path> write_dataset(const std::filesystem::path& dir, const DatasetBundle& bundle);

struct LoadedDataset {
  std::vector<TrainingExample> train;
  std::vector<LabeledPair> test_new;
  std::vector<LabeledPair> test_traditional;
  Json provenance;
  TrainingConfig training = TrainingConfig::DvsNL;
};

LoadedDataset read_dataset(const std::filesystem::path& dir);

}  // namespace linkgraph
