#include "linkgraph/serialize.hpp"

#include <fmt/format.h>

#include <fstream>
#include <iterator>
#include <sstream>

#include "linkgraph/errors.hpp"

namespace linkgraph {

namespace {

Json nullable(std::optional<double> value) { return value ? Json(*value) : Json(nullptr); }

std::optional<double> optional_number(const Json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw ParseError(std::string("field '") + field + "' must be a number or null");
  return it->get<double>();
}

std::string required_string(const Json& doc, const char* field, const std::string& where) {
  auto it = doc.find(field);
  if (it == doc.end() || !it->is_string()) {
    throw ParseError(where + ": missing string field '" + field + "'");
  }
  return it->get<std::string>();
}

Json label_metrics_json(const LabelMetrics& m) {
  return Json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

Json parse_line(const std::string& line, const std::filesystem::path& path, std::size_t number) {
  try {
    return Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ":" + std::to_string(number) + ": " + e.what());
  }
}

}  // namespace

Json to_json(const CleaningReport& r) {
  return Json{{"raw_links", r.raw_links},
              {"retained_links", r.raw_links - r.removed()},
              {"private_endpoint", r.private_endpoint},
              {"missing_endpoint", r.missing_endpoint},
              {"self_link", r.self_link},
              {"multi_typed_pair", r.multi_typed_pair},
              {"duplicate_edge", r.duplicate_edge}};
}

Json to_json(const Repository& repo) {
  Json doc;
  doc["name"] = repo.name;
  doc["issues"] = Json::array();
  for (const auto& [key, issue] : repo.issues) {
    doc["issues"].push_back(Json{{"key", issue.key},
                                 {"project", issue.project},
                                 {"title", issue.title},
                                 {"description", issue.description},
                                 {"issue_type", issue.issue_type},
                                 {"status", issue.status},
                                 {"resolution", issue.resolution ? Json(*issue.resolution) : Json(nullptr)},
                                 {"created", format_timestamp(issue.created)},
                                 {"is_private", issue.is_private}});
  }
  doc["links"] = Json::array();
  for (const auto& link : repo.links) {
    doc["links"].push_back(Json{{"source", link.source},
                                {"target", link.target},
                                {"type", link.raw_type},
                                {"direction", link.directed_role ? Json(*link.directed_role) : Json(nullptr)}});
  }
  if (repo.cleaned) doc["cleaning_report"] = to_json(repo.cleaning_report);
  return doc;
}

Json to_json(const RepositorySummary& s) {
  return Json{{"name", s.name},
              {"issues", s.issues},
              {"links", s.links},
              {"distinct_types", s.distinct_types},
              {"coverage", nullable(s.coverage)},
              {"cross_project_share", s.cross_project_share}};
}

Json to_json(const CategoryPrevalence& p) {
  Json shares = Json::object();
  for (const auto& [category, share] : p.shares) shares[std::string(to_string(category))] = share;
  return Json{{"shares", shares}, {"categorized", p.categorized}, {"uncategorized", p.uncategorized}};
}

Json to_json(const TypePrevalence& p) {
  Json shares = Json::object();
  for (const auto& [type, share] : p.shares) shares[type] = share;
  return Json{{"shares", shares}, {"categorized", p.categorized}, {"uncategorized", p.uncategorized}};
}

Json to_json(const GraphMetricsReport& r) {
  return Json{{"vertices", r.vertices},
              {"edges", r.edges},
              {"components", r.components},
              {"complex_components", r.complex_components},
              {"pct_isolated", nullable(r.pct_isolated)},
              {"pct_2comp", nullable(r.pct_2comp)},
              {"pct_3comp_plus", nullable(r.pct_3comp_plus)},
              {"avg_density", nullable(r.avg_density)},
              {"pct_trees", nullable(r.pct_trees)},
              {"pct_stars", nullable(r.pct_stars)},
              {"assortativity", nullable(r.assortativity)},
              {"transitivity", r.transitivity}};
}

GraphMetricsReport graph_metrics_from_json(const Json& doc) {
  GraphMetricsReport r;
  r.vertices = doc.at("vertices").get<std::size_t>();
  r.edges = doc.at("edges").get<std::size_t>();
  r.components = doc.value("components", std::size_t{0});
  r.complex_components = doc.value("complex_components", std::size_t{0});
  r.pct_isolated = optional_number(doc, "pct_isolated");
  r.pct_2comp = optional_number(doc, "pct_2comp");
  r.pct_3comp_plus = optional_number(doc, "pct_3comp_plus");
  r.avg_density = optional_number(doc, "avg_density");
  r.pct_trees = optional_number(doc, "pct_trees");
  r.pct_stars = optional_number(doc, "pct_stars");
  r.assortativity = optional_number(doc, "assortativity");
  r.transitivity = doc.at("transitivity").get<double>();
  return r;
}

Json to_json(const LabeledPair& p) {
  Json doc{{"a", p.a}, {"b", p.b}, {"class", std::string(to_string(p.klass))}};
  doc["type"] = p.canonical_type ? Json(*p.canonical_type) : Json(nullptr);
  doc["category"] = p.category ? Json(std::string(to_string(*p.category))) : Json(nullptr);
  if (p.auto_created) doc["auto_created"] = true;
  return doc;
}

LabeledPair labeled_pair_from_json(const Json& doc) {
  const auto klass = parse_pair_class(required_string(doc, "class", "pair"));
  if (!klass) throw ParseError("pair: unknown class '" + doc.at("class").get<std::string>() + "'");
  std::optional<std::string> type;
  if (auto it = doc.find("type"); it != doc.end() && it->is_string()) type = it->get<std::string>();
  std::optional<LinkCategory> category;
  if (auto it = doc.find("category"); it != doc.end() && it->is_string()) {
    category = parse_category(it->get<std::string>());
    if (!category) throw ParseError("pair: unknown category '" + it->get<std::string>() + "'");
  }
  return make_pair(required_string(doc, "a", "pair"), required_string(doc, "b", "pair"), *klass, type, category,
                   doc.value("auto_created", false));
}

Json to_json(const TrainingExample& ex) {
  Json doc = to_json(ex.pair);
  doc["label"] = ex.label;
  return doc;
}

Json to_json(const ClassCounts& c) {
  return Json{{"Dup", c.dup}, {"OtherLink", c.other_link}, {"NonLink", c.non_link}};
}

Json to_json(const SplitStats& s) {
  return Json{{"shared_issues", s.shared_issues},
              {"linked_total", s.linked_total},
              {"linked_test", s.linked_test},
              {"discarded_nonlinks", s.discarded_nonlinks},
              {"resynthesized_nonlinks", s.resynthesized_nonlinks},
              {"nonlink_shortfall", s.nonlink_shortfall},
              {"achieved_test_fraction", s.achieved_test_fraction}};
}

Json to_json(const DatasetProvenance& p) {
  return Json{{"repository", p.repository},
              {"split",
               {{"strategy", std::string(to_string(p.split.strategy))},
                {"test_fraction", p.split.test_fraction},
                {"seed", p.split.seed},
                {"exclude_auto_created", p.split.exclude_auto_created}}},
              {"training_config", std::string(to_string(p.training))},
              {"nonlinks_requested", p.nonlinks_requested},
              {"pool", to_json(p.pool)},
              {"train_pool", to_json(p.train_pool)},
              {"test_pool", to_json(p.test_pool)},
              {"train_labels", {{"positive", p.train_positive}, {"negative", p.train_negative}}},
              {"test_new", to_json(p.test_new)},
              {"test_traditional", to_json(p.test_traditional)},
              {"split_stats", to_json(p.split_stats)}};
}

Json to_json(const EvalReport& r) {
  return Json{{"mode", std::string(to_string(r.mode))},
              {"training_config", std::string(to_string(r.training))},
              {"labels", {{"1", label_metrics_json(r.per_label[1])}, {"0", label_metrics_json(r.per_label[0])}}},
              {"macro_precision", r.macro_precision},
              {"macro_recall", r.macro_recall},
              {"macro_f1", r.macro_f1},
              {"accuracy", r.accuracy},
              {"scored", r.scored},
              {"degenerate", r.degenerate},
              {"macro_average_over", "binary labels 0 and 1"}};
}

Json to_json(const ConfusionMatrix& m) {
  Json rows = Json::object();
  for (auto klass : kAllPairClasses) {
    rows[std::string(to_string(klass))] = {{"predicted_0", m.at(klass, 0)}, {"predicted_1", m.at(klass, 1)}};
  }
  Json by_category = Json::object();
  for (const auto& [category, row] : m.other_link_by_category) {
    by_category[std::string(to_string(category))] = {{"predicted_0", row[0]}, {"predicted_1", row[1]}};
  }
  return Json{{"mode", std::string(to_string(m.mode))},
              {"training_config", std::string(to_string(m.training))},
              {"rows", rows},
              {"other_link_by_category", by_category}};
}

Json to_json(const RobustnessDelta& d) {
  return Json{{"accuracy", d.accuracy},
              {"macro_precision", d.macro_precision},
              {"macro_recall", d.macro_recall},
              {"macro_f1", d.macro_f1}};
}

Json to_json(const TrainedModel& m) {
  return Json{{"theta", m.classifier.theta},
              {"training_f1", m.classifier.training_f1},
              {"degenerate", m.classifier.degenerate},
              {"training_config", std::string(to_string(m.training))},
              {"tokenizer", Json::parse(m.tokenizer.to_json())},
              {"corpus_hash", m.corpus_hash},
              {"repository", m.repository_name},
              {"repository_path", m.repository_path},
              {"training_pairs", m.training_pairs}};
}

TrainedModel trained_model_from_json(const Json& doc) {
  TrainedModel m;
  try {
    m.classifier.theta = doc.at("theta").get<double>();
    m.classifier.training_f1 = doc.at("training_f1").get<double>();
    m.classifier.degenerate = doc.value("degenerate", false);
    const auto config = parse_training_config(doc.at("training_config").get<std::string>());
    if (!config) throw ParseError("model: unknown training_config");
    m.training = *config;
    m.tokenizer = TokenizerConfig::from_json(doc.at("tokenizer").dump());
    m.corpus_hash = doc.at("corpus_hash").get<std::string>();
    m.repository_name = doc.value("repository", std::string{});
    m.repository_path = doc.value("repository_path", std::string{});
    m.training_pairs = doc.value("training_pairs", std::size_t{0});
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
  if (m.classifier.theta < 0.0 || m.classifier.theta > 1.0) throw ParseError("model: theta outside [0, 1]");
  return m;
}

const std::vector<std::string>& graph_metric_columns() {
  static const std::vector<std::string> columns = {"#Vertices", "#Edges",   "%Isolated",     "%2Comp",
                                                   "%3Comp+",   "AvgDensity", "%Trees",      "%Stars",
                                                   "Assortativity", "Transitivity"};
  return columns;
}

std::vector<std::string> graph_metric_cells(const GraphMetricsReport& r) {
  return {std::to_string(r.vertices),   std::to_string(r.edges),      format_number(r.pct_isolated),
          format_number(r.pct_2comp),   format_number(r.pct_3comp_plus), format_number(r.avg_density),
          format_number(r.pct_trees),   format_number(r.pct_stars),   format_number(r.assortativity),
          format_number(r.transitivity)};
}

std::string format_number(std::optional<double> value) {
  if (!value) return {};
  return fmt::format("{}", *value);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line.push_back(',');
    line += csv_escape(fields[i]);
  }
  line.push_back('\n');
  return line;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("short write to '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

Json read_json_file(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<std::filesystem::path> write_dataset(const std::filesystem::path& dir, const DatasetBundle& bundle) {
  std::filesystem::create_directories(dir);
  auto jsonl = [](const auto& items) {
    std::string out;
    for (const auto& item : items) out += to_json(item).dump() + "\n";
    return out;
  };
  const std::vector<std::filesystem::path> files = {dir / "train.jsonl", dir / "test_new.jsonl",
                                                    dir / "test_traditional.jsonl", dir / "provenance.json"};
  write_text_file(files[0], jsonl(bundle.train));
  write_text_file(files[1], jsonl(bundle.test_new));
  write_text_file(files[2], jsonl(bundle.test_traditional));
  write_json_file(files[3], to_json(bundle.provenance));
  return files;
}

LoadedDataset read_dataset(const std::filesystem::path& dir) {
  LoadedDataset out;
  out.provenance = read_json_file(dir / "provenance.json");
  const auto config = parse_training_config(out.provenance.value("training_config", std::string{}));
  if (!config) throw ParseError((dir / "provenance.json").string() + ": missing or unknown training_config");
  out.training = *config;

  auto pairs = [&](const char* name) {
    std::vector<LabeledPair> result;
    const auto path = dir / name;
    std::size_t number = 0;
    for (const auto& line : read_lines(path)) result.push_back(labeled_pair_from_json(parse_line(line, path, ++number)));
    return result;
  };
  {
    const auto path = dir / "train.jsonl";
    std::size_t number = 0;
    for (const auto& line : read_lines(path)) {
      const auto doc = parse_line(line, path, ++number);
      const int label = doc.value("label", -1);
      if (label != 0 && label != 1) {
        throw ParseError(path.string() + ":" + std::to_string(number) + ": label must be 0 or 1");
      }
      out.train.push_back({labeled_pair_from_json(doc), label});
    }
  }
  out.test_new = pairs("test_new.jsonl");
  out.test_traditional = pairs("test_traditional.jsonl");
  return out;
}

}  // namespace linkgraph
