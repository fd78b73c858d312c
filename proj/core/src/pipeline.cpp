#include "linkgraph/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "linkgraph/errors.hpp"
#include "linkgraph/hash.hpp"
#include "linkgraph/tables.hpp"

namespace linkgraph {

namespace fs = std::filesystem;

namespace {

bool monotone(const std::vector<double>& values) {
  return std::is_sorted(values.begin(), values.end()) ||
         std::is_sorted(values.begin(), values.end(), std::greater<>{});
}

std::string directory_name(const std::string& repo_name) {
  std::string out;
  for (char c : repo_name) {
    const bool keep = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
                      c == '_' || c == '.';
    out.push_back(keep ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "repository";
  return out;
}

Json seeded(Json doc, std::uint64_t seed) {
  doc["seed"] = seed;
  return doc;
}

std::vector<double> number_list(const Json& value, const char* field) {
  if (!value.is_array()) throw ValidationError(std::string("'") + field + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : value) {
    if (!v.is_number()) throw ValidationError(std::string("'") + field + "' must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

fs::path resolve(const Json& value, const fs::path& base, const char* field) {
  if (!value.is_string() || value.get<std::string>().empty()) {
    throw ValidationError(std::string("'") + field + "' must be a non-empty path string");
  }
  fs::path p = value.get<std::string>();
  if (p.is_relative()) p = base / p;
  return p.lexically_normal();
}

std::string eval_curve_rows(const std::vector<SweepPoint>& curve, std::string_view variable) {
  std::string out;
  for (const auto& point : curve) {
    const auto& r = point.report;
    out += csv_line({std::string(variable), format_number(point.setting), std::string(to_string(r.mode)),
                     std::string(to_string(r.training)), format_number(r.accuracy), format_number(r.macro_precision),
                     format_number(r.macro_recall), format_number(r.macro_f1), format_number(r.per_label[1].f1),
                     r.degenerate ? "true" : "false"});
  }
  return out;
}

}  // namespace

LinkTaxonomy load_taxonomy(const std::optional<fs::path>& path) {
  return path ? LinkTaxonomy::load(*path) : LinkTaxonomy::bundled();
}

TokenizerConfig load_tokenizer(const std::optional<fs::path>& path) {
  return path ? TokenizerConfig::from_json(read_text_file(*path)) : TokenizerConfig::defaults();
}

Repository load_cleaned(const fs::path& path) {
  Repository repo = clean(load_repository(path));
  if (repo.name.empty()) repo.name = path.stem().string();
  return repo;
}

TrainedModel train_model(const LoadedDataset& dataset, const TfIdfIndex& index, const Repository& repo,
                         const fs::path& repo_path) {
  TrainedModel model;
  model.classifier = train_threshold(dataset.train, index);
  model.training = dataset.training;
  model.tokenizer = index.tokenizer();
  model.corpus_hash = index.corpus_hash();
  model.repository_name = repo.name;
  model.repository_path = repo_path.generic_string();
  model.training_pairs = dataset.train.size();
  return model;
}

std::optional<EvalModes> parse_eval_modes(std::string_view text) {
  if (text == "traditional") return EvalModes::Traditional;
  if (text == "new") return EvalModes::New;
  if (text == "both") return EvalModes::Both;
  return std::nullopt;
}

std::vector<double> default_theta_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  return grid;
}

std::vector<double> default_k_grid() { return {1, 2, 3, 5, 10}; }

EvalOutputs run_evaluation(const TrainedModel& model, const TfIdfIndex& index, const LoadedDataset& dataset,
                           EvalModes modes, std::span<const double> theta_grid, std::span<const double> k_grid) {
  if (model.corpus_hash != index.corpus_hash()) {
    throw ValidationError("corpus hash mismatch: the model was trained on " + model.corpus_hash +
                          " but the index was fit on " + index.corpus_hash());
  }
  if (!(model.tokenizer == index.tokenizer())) {
    throw ValidationError("tokenizer mismatch between the model and the index");
  }
  if (model.training != dataset.training) {
    throw ValidationError(fmt::format("the model was trained for {} but the dataset was built for {}",
                                      to_string(model.training), to_string(dataset.training)));
  }

  std::vector<EvalMode> selected;
  if (modes != EvalModes::New) selected.push_back(EvalMode::Traditional);
  if (modes != EvalModes::Traditional) selected.push_back(EvalMode::New);

  Json report;
  report["training_config"] = std::string(to_string(model.training));
  report["theta"] = model.classifier.theta;
  report["corpus_hash"] = model.corpus_hash;
  if (auto it = dataset.provenance.find("split"); it != dataset.provenance.end() && it->contains("seed")) {
    report["seed"] = it->at("seed");
  }
  report["macro_average_over"] = "binary labels 0 and 1";
  report["classifier_degenerate"] = model.classifier.degenerate;
  report["results"] = Json::object();

  bool degenerate = model.classifier.degenerate;
  std::optional<EvalReport> traditional, fresh;
  std::optional<ConfusionMatrix> new_matrix;
  std::string curves = csv_line({"variable", "setting", "mode", "training_config", "accuracy", "macro_precision",
                                 "macro_recall", "macro_f1", "positive_f1", "degenerate"});
  for (auto mode : selected) {
    const auto& test = mode == EvalMode::Traditional ? dataset.test_traditional : dataset.test_new;
    auto result = evaluate(predict_threshold(index, test, model.classifier.theta), test, model.training, mode);
    degenerate = degenerate || result.report.degenerate;
    report["results"][std::string(to_string(mode))] = {{"metrics", to_json(result.report)},
                                                       {"confusion_matrix", to_json(result.matrix)}};
    if (mode == EvalMode::Traditional) {
      traditional = result.report;
    } else {
      fresh = result.report;
      new_matrix = result.matrix;
    }
    const std::vector<double> thetas(theta_grid.begin(), theta_grid.end());
    const std::vector<double> ks(k_grid.begin(), k_grid.end());
    if (!thetas.empty()) {
      curves += eval_curve_rows(sweep(index, test, model.training, mode, {SweepGrid::Variable::Theta, thetas}),
                                "theta");
    }
    if (!ks.empty()) {
      curves += eval_curve_rows(sweep(index, test, model.training, mode, {SweepGrid::Variable::K, ks}), "k");
    }
  }

  report["delta"] = traditional && fresh ? to_json(robustness_delta(*traditional, *fresh)) : Json(nullptr);
  report["degenerate"] = degenerate;
  report["ol_confusion_rate"] = nullptr;
  report["ol_confusion_by_category"] = Json::object();
  if (new_matrix && model.training != TrainingConfig::DOLvsNL) {
    try {
      report["ol_confusion_rate"] = ol_confusion_rate(*new_matrix);
    } catch (const UndefinedValueError&) {
      // no OtherLink pairs scored; stays null
    }
    for (const auto& [category, rate] : ol_confusion_by_category(*new_matrix)) {
      report["ol_confusion_by_category"][std::string(to_string(category))] = rate;
    }
  }
  return {std::move(report), std::move(curves)};
}

PipelineConfig PipelineConfig::from_json(const Json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ValidationError("pipeline config must be a JSON object");
  static const std::set<std::string> known = {"repositories", "taxonomy", "tokenizer", "split",
                                              "training_configs", "seed", "nonlinks", "theta_grid",
                                              "k_grid", "output_dir"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw ValidationError("unknown config key '" + key + "'");
  }

  PipelineConfig cfg;
  const auto repos = doc.find("repositories");
  if (repos == doc.end() || !repos->is_array() || repos->empty()) {
    throw ValidationError("'repositories' must be a non-empty array of paths");
  }
  for (const auto& r : *repos) cfg.repositories.push_back(resolve(r, base_dir, "repositories"));
  if (auto it = doc.find("taxonomy"); it != doc.end() && !it->is_null()) cfg.taxonomy = resolve(*it, base_dir, "taxonomy");
  if (auto it = doc.find("tokenizer"); it != doc.end() && !it->is_null()) {
    cfg.tokenizer = resolve(*it, base_dir, "tokenizer");
  }

  if (auto it = doc.find("split"); it != doc.end()) {
    if (!it->is_object()) throw ValidationError("'split' must be an object");
    for (const auto& [key, value] : it->items()) {
      if (key == "strategy") {
        const auto s = value.is_string() ? parse_split_strategy(value.get<std::string>()) : std::nullopt;
        if (!s) throw ValidationError("split.strategy must be \"random\" or \"cluster\"");
        cfg.split.strategy = *s;
      } else if (key == "test_fraction") {
        if (!value.is_number()) throw ValidationError("split.test_fraction must be a number");
        cfg.split.test_fraction = value.get<double>();
      } else if (key == "exclude_auto_created") {
        if (!value.is_boolean()) throw ValidationError("split.exclude_auto_created must be a boolean");
        cfg.split.exclude_auto_created = value.get<bool>();
      } else {
        throw ValidationError("unknown config key 'split." + key + "'");
      }
    }
  }
  if (auto it = doc.find("training_configs"); it != doc.end()) {
    if (!it->is_array()) throw ValidationError("'training_configs' must be an array");
    cfg.training_configs.clear();
    for (const auto& v : *it) {
      const auto tc = v.is_string() ? parse_training_config(v.get<std::string>()) : std::nullopt;
      if (!tc) throw ValidationError("training_configs entries must be DvsNL, DvsOLNL or DOLvsNL");
      cfg.training_configs.push_back(*tc);
    }
  }
  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned()) throw ValidationError("'seed' must be a non-negative integer");
    cfg.seed = it->get<std::uint64_t>();
  }
  if (auto it = doc.find("nonlinks"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_unsigned()) throw ValidationError("'nonlinks' must be a non-negative integer");
    cfg.nonlinks = it->get<std::size_t>();
  }
  if (auto it = doc.find("theta_grid"); it != doc.end()) cfg.theta_grid = number_list(*it, "theta_grid");
  if (auto it = doc.find("k_grid"); it != doc.end()) cfg.k_grid = number_list(*it, "k_grid");
  const auto out = doc.find("output_dir");
  if (out == doc.end()) throw ValidationError("'output_dir' is required");
  cfg.output_dir = resolve(*out, base_dir, "output_dir");
  return cfg;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  Json doc;
  try {
    doc = read_json_file(path);
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
  return from_json(doc, path.parent_path());
}

void PipelineConfig::apply_seed_override(const char* env_value) {
  if (env_value == nullptr) return;
  const std::string_view text(env_value);
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
    throw ValidationError("LINKGRAPH_SEED must be an unsigned integer, got '" + std::string(text) + "'");
  }
  seed = value;
}

void PipelineConfig::validate() const {
  if (repositories.empty()) throw ValidationError("no repositories configured");
  std::set<fs::path> seen;
  for (const auto& repo : repositories) {
    if (!fs::is_regular_file(repo)) throw ValidationError("repository file not found: " + repo.string());
    if (!seen.insert(repo).second) throw ValidationError("repository listed twice: " + repo.string());
  }
  if (taxonomy) {
    if (!fs::is_regular_file(*taxonomy)) throw ValidationError("taxonomy file not found: " + taxonomy->string());
    try {
      (void)LinkTaxonomy::load(*taxonomy);
    } catch (const Error& e) {
      throw ValidationError("taxonomy " + taxonomy->string() + ": " + e.what());
    }
  }
  if (tokenizer) {
    if (!fs::is_regular_file(*tokenizer)) throw ValidationError("tokenizer file not found: " + tokenizer->string());
    try {
      (void)load_tokenizer(tokenizer);
    } catch (const Error& e) {
      throw ValidationError("tokenizer " + tokenizer->string() + ": " + e.what());
    }
  }
  split.validate();
  if (training_configs.empty()) throw ValidationError("no training configurations selected");
  if (std::set<TrainingConfig>(training_configs.begin(), training_configs.end()).size() != training_configs.size()) {
    throw ValidationError("training configuration listed twice");
  }
  if (nonlinks && *nonlinks == 0) throw ValidationError("'nonlinks' must be positive");
  if (!monotone(theta_grid)) throw ValidationError("theta_grid must be monotone");
  for (double t : theta_grid) {
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("theta_grid values must lie in [0, 1]");
  }
  if (!monotone(k_grid)) throw ValidationError("k_grid must be monotone");
  for (double k : k_grid) {
    if (k < 1.0 || std::floor(k) != k) throw ValidationError("k_grid values must be positive integers");
  }
  if (output_dir.empty()) throw ValidationError("'output_dir' is empty");
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();
  PipelineResult result;
  const fs::path& out = config.output_dir;
  std::string stage = "setup";

  auto emit = [&](const std::string& rel, std::string_view contents) {
    write_text_file(out / rel, contents);
    result.files.push_back({rel, sha256_hex(contents), stage});
  };
  auto emit_json = [&](const std::string& rel, const Json& doc) { emit(rel, doc.dump(2) + "\n"); };

  try {
    fs::create_directories(out);
    const auto taxonomy = load_taxonomy(config.taxonomy);
    const auto tokenizer = load_tokenizer(config.tokenizer);
    std::vector<RepositoryAnalysis> analyses;
    std::set<std::string> dirs;

    for (const auto& repo_path : config.repositories) {
      stage = "ingest";
      const Repository repo = load_cleaned(repo_path);
      const std::string dir = directory_name(repo.name);
      if (!dirs.insert(dir).second) throw IntegrityError("two repositories map to output directory '" + dir + "'");
      emit_json(dir + "/cleaned.json", seeded(to_json(repo), config.seed));
      emit_json(dir + "/cleaning_report.json", seeded(to_json(repo.cleaning_report), config.seed));

      stage = "taxonomy";
      emit(dir + "/types.csv", prevalence_csv(type_prevalence(repo, taxonomy), taxonomy));
      emit(dir + "/categories.csv", prevalence_csv(category_prevalence(repo, taxonomy)));

      stage = "metrics";
      analyses.push_back(analyze_repository(repo, taxonomy));
      const auto& analysis = analyses.back();
      std::vector<std::pair<std::string, GraphMetricsReport>> rows = {{"all", analysis.whole_graph}};
      for (const auto& [category, report] : analysis.by_category) {
        rows.emplace_back(GraphSlice::of_category(category).to_string(), report);
      }
      emit(dir + "/metrics.csv", metrics_csv(rows));
      emit_json(dir + "/report.json", seeded(to_json(analysis), config.seed));

      stage = "model";
      const auto index = fit_tfidf(issue_corpus(repo), tokenizer);

      for (auto training : config.training_configs) {
        const std::string tc(to_string(training));
        stage = "dataset";
        DatasetOptions options;
        options.split = config.split;
        options.split.seed = config.seed;
        options.training = training;
        options.nonlinks = config.nonlinks;
        const auto bundle = build_dataset(repo, taxonomy, options);
        const fs::path dataset_dir = out / dir / "dataset" / tc;
        for (const auto& file : write_dataset(dataset_dir, bundle)) {
          result.files.push_back({fs::relative(file, out).generic_string(), sha256_file(file), stage});
        }

        stage = "model";
        const auto dataset = read_dataset(dataset_dir);
        const auto model = train_model(dataset, index, repo, repo_path);
        emit_json(dir + "/model_" + tc + ".json", seeded(to_json(model), config.seed));

        stage = "eval";
        auto outputs = run_evaluation(model, index, dataset, EvalModes::Both, config.theta_grid, config.k_grid);
        emit_json(dir + "/eval_" + tc + ".json", seeded(std::move(outputs.report), config.seed));
        emit(dir + "/curves_" + tc + ".csv", outputs.curves_csv);
      }
    }

    stage = "tables";
    for (const auto& table : emit_tables(analyses)) {
      emit("tables/" + table.name + ".csv", table.to_csv());
      emit("tables/" + table.name + ".md", table.to_markdown());
    }
  } catch (const std::exception& e) {
    result.exit_code = 2;
    result.failed_stage = stage;
    result.error = e.what();
  }

  Json manifest;
  manifest["seed"] = config.seed;
  manifest["status"] = result.exit_code == 0 ? "ok" : "failed";
  if (result.failed_stage) {
    manifest["failed_stage"] = *result.failed_stage;
    manifest["error"] = result.error;
  }
  manifest["files"] = Json::array();
  for (const auto& f : result.files) {
    manifest["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"stage", f.stage}});
  }
  try {
    write_json_file(out / "manifest.json", manifest);
  } catch (const std::exception& e) {
    result.exit_code = 2;
    if (!result.failed_stage) {
      result.failed_stage = "manifest";
      result.error = e.what();
    }
  }
  return result;
}

std::vector<std::string> verify_manifest(const fs::path& output_dir) {
  const auto manifest = read_json_file(output_dir / "manifest.json");
  std::vector<std::string> mismatched;
  for (const auto& entry : manifest.at("files")) {
    const auto rel = entry.at("path").get<std::string>();
    const auto path = output_dir / rel;
    if (!fs::is_regular_file(path) || sha256_file(path) != entry.at("sha256").get<std::string>()) {
      mismatched.push_back(rel);
    }
  }
  return mismatched;
}

}  // namespace linkgraph
