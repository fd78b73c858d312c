#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "linkgraph/dataset.hpp"
#include "linkgraph/errors.hpp"
#include "linkgraph/eval.hpp"
#include "linkgraph/graph.hpp"
#include "linkgraph/ingest.hpp"
#include "linkgraph/model.hpp"
#include "linkgraph/pipeline.hpp"
#include "linkgraph/serialize.hpp"
#include "linkgraph/tables.hpp"
#include "linkgraph/taxonomy.hpp"

namespace fs = std::filesystem;
using namespace linkgraph;

namespace {

constexpr int kValidationFailure = 1;
constexpr int kStageFailure = 2;

/// A failure in the named stage; maps to exit code 2.
struct StageFailure {
  std::string stage;
  std::string message;
};

template <typename F>
auto in_stage(const char* stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageFailure{stage, e.what()};
  }
}

std::optional<fs::path> optional_path(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return fs::path(text);
}

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) throw ValidationError(fmt::format("{} not found: {}", what, path));
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) parts.push_back(part);
  return parts;
}

std::vector<double> parse_grid(const std::string& text, std::vector<double> fallback) {
  if (text.empty()) return fallback;
  std::vector<double> grid;
  for (const auto& part : split_commas(text)) {
    try {
      std::size_t used = 0;
      grid.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ValidationError("grid value is not a number: '" + part + "'");
    }
  }
  return grid;
}

struct IngestArgs {
  std::string input, out, report;
};

int run_ingest(const IngestArgs& args) {
  require_file(args.input, "repository file");
  const auto repo = in_stage("ingest", [&] { return load_cleaned(args.input); });
  fs::path report = args.report;
  if (report.empty()) {
    report = fs::path(args.out).parent_path() / (fs::path(args.out).stem().string() + "_cleaning_report.json");
  }
  in_stage("ingest", [&] {
    write_json_file(args.out, to_json(repo));
    write_json_file(report, to_json(repo.cleaning_report));
  });
  const auto& r = repo.cleaning_report;
  fmt::print("{}: {} issues, {} of {} links retained ({} removed)\n", repo.name, repo.issues.size(),
             repo.links.size(), r.raw_links, r.removed());
  return 0;
}

struct TaxonomyArgs {
  std::string repo, taxonomy, report;
  bool assign_relation = false;
};

int run_taxonomy_apply(const TaxonomyArgs& args) {
  require_file(args.repo, "repository file");
  if (!args.taxonomy.empty()) require_file(args.taxonomy, "taxonomy file");
  const auto outputs = split_commas(args.report);
  if (outputs.size() != 2) throw ValidationError("--report expects two comma-separated paths: types.csv,categories.csv");
  auto taxonomy = load_taxonomy(optional_path(args.taxonomy));
  if (args.assign_relation) taxonomy = taxonomy.with_policy(UnknownTypePolicy::AssignRelation);
  const auto repo = in_stage("ingest", [&] { return load_cleaned(args.repo); });
  in_stage("taxonomy", [&] {
    const auto types = type_prevalence(repo, taxonomy);
    const auto categories = category_prevalence(repo, taxonomy);
    write_text_file(outputs[0], prevalence_csv(types, taxonomy));
    write_text_file(outputs[1], prevalence_csv(categories));
    fmt::print("{}: {} categorized links, {} uncategorized\n", repo.name, categories.categorized,
               categories.uncategorized);
  });
  return 0;
}

struct MetricsArgs {
  std::string repo, taxonomy, slice = "all", out;
};

int run_metrics(const MetricsArgs& args) {
  require_file(args.repo, "repository file");
  if (!args.taxonomy.empty()) require_file(args.taxonomy, "taxonomy file");
  const auto slice = GraphSlice::parse(args.slice);
  const auto ext = fs::path(args.out).extension();
  if (ext != ".json" && ext != ".csv") throw ValidationError("--out must end in .json or .csv");
  const auto taxonomy = load_taxonomy(optional_path(args.taxonomy));
  const auto repo = in_stage("ingest", [&] { return load_cleaned(args.repo); });
  const auto report = in_stage("metrics", [&] { return metrics_report(build_graph(repo, taxonomy, slice)); });
  in_stage("metrics", [&] {
    if (ext == ".json") {
      Json doc{{"repository", repo.name}, {"slice", slice.to_string()}};
      doc["metrics"] = to_json(report);
      write_json_file(args.out, doc);
    } else {
      write_text_file(args.out, metrics_csv({{slice.to_string(), report}}));
    }
  });
  return 0;
}

struct DatasetArgs {
  std::string repo, taxonomy, strategy = "random", config = "DvsNL", out;
  double test_fraction = 0.2;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> nonlinks;
  bool keep_auto_created = false;
};

int run_dataset_build(const DatasetArgs& args) {
  require_file(args.repo, "repository file");
  if (!args.taxonomy.empty()) require_file(args.taxonomy, "taxonomy file");
  DatasetOptions options;
  const auto strategy = parse_split_strategy(args.strategy);
  if (!strategy) throw ValidationError("--strategy must be random or cluster");
  const auto training = parse_training_config(args.config);
  if (!training) throw ValidationError("--config must be DvsNL, DvsOLNL or DOLvsNL");
  options.split.strategy = *strategy;
  options.split.test_fraction = args.test_fraction;
  options.split.exclude_auto_created = !args.keep_auto_created;
  if (args.seed) {
    options.split.seed = *args.seed;
  } else {
    PipelineConfig env;
    env.apply_seed_override(std::getenv("LINKGRAPH_SEED"));
    options.split.seed = env.seed;
  }
  options.split.validate();
  options.training = *training;
  options.nonlinks = args.nonlinks;
  const auto taxonomy = load_taxonomy(optional_path(args.taxonomy));
  const auto repo = in_stage("ingest", [&] { return load_cleaned(args.repo); });
  const auto bundle = in_stage("dataset", [&] { return build_dataset(repo, taxonomy, options); });
  in_stage("dataset", [&] { write_dataset(args.out, bundle); });
  const auto& p = bundle.provenance;
  fmt::print("{}: {} training pairs, {} new-test pairs, {} traditional-test pairs, {} shared issues\n", repo.name,
             bundle.train.size(), bundle.test_new.size(), bundle.test_traditional.size(),
             p.split_stats.shared_issues);
  return 0;
}

struct TrainArgs {
  std::string dataset, repo, tokenizer, out;
};

int run_model_train(const TrainArgs& args) {
  require_file(args.repo, "repository file");
  if (!args.tokenizer.empty()) require_file(args.tokenizer, "tokenizer config");
  const auto tokenizer = load_tokenizer(optional_path(args.tokenizer));
  const auto dataset = in_stage("dataset", [&] { return read_dataset(args.dataset); });
  const auto repo = in_stage("ingest", [&] { return load_cleaned(args.repo); });
  const auto model = in_stage("model", [&] {
    const auto index = fit_tfidf(issue_corpus(repo), tokenizer);
    return train_model(dataset, index, repo, fs::absolute(args.repo).lexically_normal());
  });
  in_stage("model", [&] {
    Json doc = to_json(model);
    if (auto it = dataset.provenance.find("split"); it != dataset.provenance.end() && it->contains("seed")) {
      doc["seed"] = it->at("seed");
    }
    write_json_file(args.out, doc);
  });
  fmt::print("theta = {} (training F1 {}{})\n", model.classifier.theta, model.classifier.training_f1,
             model.classifier.degenerate ? ", degenerate" : "");
  return 0;
}

struct EvalArgs {
  std::string model, dataset, mode = "both", out, curves, repo, theta_grid, k_grid;
};

int run_eval(const EvalArgs& args) {
  require_file(args.model, "model file");
  const auto modes = parse_eval_modes(args.mode);
  if (!modes) throw ValidationError("--mode must be traditional, new or both");
  const auto theta_grid = parse_grid(args.theta_grid, default_theta_grid());
  const auto k_grid = parse_grid(args.k_grid, default_k_grid());
  const auto model = in_stage("model", [&] { return trained_model_from_json(read_json_file(args.model)); });
  const std::string repo_path = args.repo.empty() ? model.repository_path : args.repo;
  require_file(repo_path, "repository file");
  const auto dataset = in_stage("dataset", [&] { return read_dataset(args.dataset); });
  const auto repo = in_stage("ingest", [&] { return load_cleaned(repo_path); });
  const auto index = in_stage("model", [&] { return fit_tfidf(issue_corpus(repo), model.tokenizer); });
  const auto outputs = in_stage("eval", [&] {
    return run_evaluation(model, index, dataset, *modes, theta_grid, k_grid);
  });
  in_stage("eval", [&] {
    write_json_file(args.out, outputs.report);
    if (!args.curves.empty()) write_text_file(args.curves, outputs.curves_csv);
  });
  for (const auto& [mode, result] : outputs.report.at("results").items()) {
    fmt::print("{}: macro F1 {}\n", mode, result.at("metrics").at("macro_f1").get<double>());
  }
  return 0;
}

int run_pipeline_command(const std::string& config_path) {
  require_file(config_path, "pipeline config");
  auto config = PipelineConfig::load(config_path);
  config.apply_seed_override(std::getenv("LINKGRAPH_SEED"));
  config.validate();
  const auto result = run_pipeline(config);
  if (result.exit_code != 0) throw StageFailure{result.failed_stage.value_or("pipeline"), result.error};
  fmt::print("{} files written; manifest at {}\n", result.files.size(),
             (config.output_dir / "manifest.json").string());
  return 0;
}

struct TablesArgs {
  std::vector<std::string> reports;
  std::string out;
};

int run_tables(const TablesArgs& args) {
  for (const auto& r : args.reports) require_file(r, "report file");
  std::vector<RepositoryAnalysis> analyses;
  in_stage("tables", [&] {
    for (const auto& r : args.reports) analyses.push_back(repository_analysis_from_json(read_json_file(r)));
    for (const auto& table : emit_tables(analyses)) {
      write_text_file(fs::path(args.out) / (table.name + ".csv"), table.to_csv());
      write_text_file(fs::path(args.out) / (table.name + ".md"), table.to_markdown());
    }
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Issue link graph analysis and duplicate-detection evaluation."};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Load and clean a repository export.");
  ingest_cmd->add_option("path", ingest.input, "Repository JSON export")->required();
  ingest_cmd->add_option("--out", ingest.out, "Cleaned repository JSON")->required();
  ingest_cmd->add_option("--report", ingest.report, "Cleaning report JSON (default: next to --out)");

  TaxonomyArgs tax;
  auto* tax_cmd = app.add_subcommand("taxonomy", "Link type normalization and categorization.");
  tax_cmd->require_subcommand(1);
  auto* tax_apply = tax_cmd->add_subcommand("apply", "Type and category prevalence of a repository.");
  tax_apply->add_option("repo", tax.repo, "Repository JSON")->required();
  tax_apply->add_option("--taxonomy", tax.taxonomy, "Taxonomy JSON (default: bundled)");
  tax_apply->add_option("--report", tax.report, "types.csv,categories.csv")->required();
  tax_apply->add_flag("--assign-relation", tax.assign_relation, "Treat unknown link types as Relation");

  MetricsArgs metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "Graph metrics of a repository slice.");
  metrics_cmd->add_option("repo", metrics.repo, "Repository JSON")->required();
  metrics_cmd->add_option("--taxonomy", metrics.taxonomy, "Taxonomy JSON (default: bundled)");
  metrics_cmd->add_option("--slice", metrics.slice, "all | type:<name> | category:<name>");
  metrics_cmd->add_option("--out", metrics.out, "report.json or report.csv")->required();

  DatasetArgs ds;
  auto* ds_cmd = app.add_subcommand("dataset", "Labeled pair datasets.");
  ds_cmd->require_subcommand(1);
  auto* ds_build = ds_cmd->add_subcommand("build", "Build train and test sets from a repository.");
  ds_build->add_option("repo", ds.repo, "Repository JSON")->required();
  ds_build->add_option("--taxonomy", ds.taxonomy, "Taxonomy JSON (default: bundled)");
  ds_build->add_option("--strategy", ds.strategy, "random | cluster");
  ds_build->add_option("--test-fraction", ds.test_fraction, "Share of pairs held out for testing");
  ds_build->add_option("--seed", ds.seed, "Random seed (default: $LINKGRAPH_SEED or 0)");
  ds_build->add_option("--config", ds.config, "DvsNL | DvsOLNL | DOLvsNL");
  ds_build->add_option("--nonlinks", ds.nonlinks, "Non-link pairs to synthesize");
  ds_build->add_flag("--keep-auto-created", ds.keep_auto_created, "Keep auto-created links in training");
  ds_build->add_option("--out", ds.out, "Output directory")->required();

  TrainArgs train;
  auto* model_cmd = app.add_subcommand("model", "Similarity classifier.");
  model_cmd->require_subcommand(1);
  auto* model_train = model_cmd->add_subcommand("train", "Fit the decision threshold on a training set.");
  model_train->add_option("dataset", train.dataset, "Dataset directory")->required();
  model_train->add_option("--repo", train.repo, "Repository JSON the dataset was built from")->required();
  model_train->add_option("--tokenizer", train.tokenizer, "Tokenizer config JSON (default: built-in)");
  model_train->add_option("--out", train.out, "model.json")->required();

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score a model on traditional and new test sets.");
  eval_cmd->add_option("model", ev.model, "model.json")->required();
  eval_cmd->add_option("dataset", ev.dataset, "Dataset directory")->required();
  eval_cmd->add_option("--mode", ev.mode, "traditional | new | both");
  eval_cmd->add_option("--out", ev.out, "report.json")->required();
  eval_cmd->add_option("--curves", ev.curves, "Threshold and k sweep CSV");
  eval_cmd->add_option("--repo", ev.repo, "Repository JSON (default: path stored in the model)");
  eval_cmd->add_option("--theta-grid", ev.theta_grid, "Comma-separated thresholds");
  eval_cmd->add_option("--k-grid", ev.k_grid, "Comma-separated k values");

  std::string pipeline_config;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run every stage from a JSON config.");
  pipeline_cmd->add_option("config", pipeline_config, "Pipeline config JSON")->required();

  TablesArgs tables;
  auto* tables_cmd = app.add_subcommand("tables", "Cross-repository tables from per-repository reports.");
  tables_cmd->add_option("reports", tables.reports, "report.json files")->required();
  tables_cmd->add_option("--out", tables.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationFailure;
  }

  try {
    if (*ingest_cmd) return run_ingest(ingest);
    if (*tax_apply) return run_taxonomy_apply(tax);
    if (*metrics_cmd) return run_metrics(metrics);
    if (*ds_build) return run_dataset_build(ds);
    if (*model_train) return run_model_train(train);
    if (*eval_cmd) return run_eval(ev);
    if (*pipeline_cmd) return run_pipeline_command(pipeline_config);
    if (*tables_cmd) return run_tables(tables);
  } catch (const StageFailure& f) {
    std::cerr << "error: stage " << f.stage << " failed: " << f.message << "\n";
    return kStageFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kStageFailure;
  }
  return kValidationFailure;
}
