#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linkgraph/dataset.hpp"
#include "linkgraph/eval.hpp"
#include "linkgraph/model.hpp"
#include "linkgraph/serialize.hpp"
#include "linkgraph/taxonomy.hpp"
#include "linkgraph/text.hpp"

namespace linkgraph {

/// Bundled taxonomy when `path` is empty.
LinkTaxonomy load_taxonomy(const std::optional<std::filesystem::path>& path);
/// Default tokenizer when `path` is empty.
TokenizerConfig load_tokenizer(const std::optional<std::filesystem::path>& path);
/// load_repository + clean.
Repository load_cleaned(const std::filesystem::path& path);

/// Fits the threshold classifier on a loaded dataset. `index` must be fit on
/// the corpus of the repository the dataset was built from.
TrainedModel train_model(const LoadedDataset& dataset, const TfIdfIndex& index, const Repository& repo,
                         const std::filesystem::path& repo_path);

enum class EvalModes { Traditional, New, Both };
std::optional<EvalModes> parse_eval_modes(std::string_view text);

std::vector<double> default_theta_grid();  // 0.00, 0.05, ..., 1.00
std::vector<double> default_k_grid();      // 1, 2, 3, 5, 10

struct EvalOutputs {
  Json report;
  std::string curves_csv;
};

/// Scores the model on the dataset's test sets. Throws ValidationError when
/// the index was fit on a different corpus than the model.
EvalOutputs run_evaluation(const TrainedModel& model, const TfIdfIndex& index, const LoadedDataset& dataset,
                           EvalModes modes, std::span<const double> theta_grid, std::span<const double> k_grid);

struct PipelineConfig {
  std::vector<std::filesystem::path> repositories;
  std::optional<std::filesystem::path> taxonomy;
  std::optional<std::filesystem::path> tokenizer;
  SplitConfig split;
  std::vector<TrainingConfig> training_configs{kAllTrainingConfigs.begin(), kAllTrainingConfigs.end()};
  std::uint64_t seed = 0;
  std::optional<std::size_t> nonlinks;
  std::vector<double> theta_grid = default_theta_grid();
  std::vector<double> k_grid = default_k_grid();
  std::filesystem::path output_dir;

  /// Relative paths resolve against `base_dir`. Throws ValidationError on
  /// unknown keys or ill-typed values.
  static PipelineConfig from_json(const Json& doc, const std::filesystem::path& base_dir);
  static PipelineConfig load(const std::filesystem::path& path);

  /// Replaces the seed when the variable is set to an unsigned integer;
  /// anything else is a ValidationError.
  void apply_seed_override(const char* env_value);

  /// Throws ValidationError when a referenced input is missing or a setting
  /// is out of range.
  void validate() const;
};

struct ManifestEntry {
  std::string path;  // relative to the output directory, '/'-separated
  std::string sha256;
  std::string stage;
};

struct PipelineResult {
  int exit_code = 0;  // 0 success, 2 stage failure
  std::vector<ManifestEntry> files;
  std::optional<std::string> failed_stage;
  std::string error;
};

/// Runs ingest, taxonomy, metrics, dataset, model and eval per repository,
/// then the cross-repository tables, and writes manifest.json. The config is
/// validated first, so a ValidationError means nothing was written. A stage
/// error stops the run and leaves a manifest of what was written.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Paths whose content no longer matches manifest.json; empty when all verify.
std::vector<std::string> verify_manifest(const std::filesystem::path& output_dir);

}  // namespace linkgraph
