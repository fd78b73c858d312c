#include "linkgraph/tables.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "linkgraph/errors.hpp"

namespace linkgraph {

namespace {

std::string fixed(std::optional<double> value) {
  return value ? fmt::format("{:.3f}", *value) : std::string{};
}

/// Appends Min/Max/Mean/StdDev rows over the numeric columns starting at
/// `first_numeric`. Blank cells are skipped. Sample standard deviation.
void append_summary_rows(Table& table, std::size_t first_numeric) {
  if (table.rows.size() < 2) return;
  const std::size_t columns = table.header.size();
  std::vector<std::vector<std::string>> summary(4, std::vector<std::string>(columns));
  summary[0][0] = "Min";
  summary[1][0] = "Max";
  summary[2][0] = "Mean";
  summary[3][0] = "StdDev";
  for (std::size_t c = first_numeric; c < columns; ++c) {
    std::vector<double> values;
    for (const auto& row : table.rows) {
      if (!row[c].empty()) values.push_back(std::stod(row[c]));
    }
    if (values.empty()) continue;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    summary[0][c] = fixed(*lo);
    summary[1][c] = fixed(*hi);
    summary[2][c] = fixed(mean);
    if (values.size() >= 2) {
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      summary[3][c] = fixed(std::sqrt(ss / static_cast<double>(values.size() - 1)));
    }
  }
  for (auto& row : summary) table.rows.push_back(std::move(row));
}

std::optional<double> mean_of(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

RepositoryAnalysis analyze_repository(const Repository& cleaned, const LinkTaxonomy& taxonomy) {
  RepositoryAnalysis a;
  a.summary = summarize(cleaned);
  try {
    a.categories = category_prevalence(cleaned, taxonomy);
    a.types = type_prevalence(cleaned, taxonomy);
  } catch (const UndefinedValueError&) {
    // no categorizable links; tables leave these cells blank
  }
  a.whole_graph = metrics_report(build_graph(cleaned, taxonomy, GraphSlice::all()));
  for (auto category : kAllCategories) {
    a.by_category[category] = metrics_report(build_graph(cleaned, taxonomy, GraphSlice::of_category(category)));
  }
  return a;
}

Json to_json(const RepositoryAnalysis& a) {
  Json doc;
  doc["summary"] = to_json(a.summary);
  doc["category_prevalence"] = a.categories ? to_json(*a.categories) : Json(nullptr);
  doc["type_prevalence"] = a.types ? to_json(*a.types) : Json(nullptr);
  doc["whole_graph"] = to_json(a.whole_graph);
  doc["by_category"] = Json::object();
  for (const auto& [category, report] : a.by_category) doc["by_category"][std::string(to_string(category))] = to_json(report);
  return doc;
}

RepositoryAnalysis repository_analysis_from_json(const Json& doc) {
  RepositoryAnalysis a;
  try {
    const auto& s = doc.at("summary");
    a.summary.name = s.at("name").get<std::string>();
    a.summary.issues = s.at("issues").get<std::size_t>();
    a.summary.links = s.at("links").get<std::size_t>();
    a.summary.distinct_types = s.at("distinct_types").get<std::size_t>();
    if (!s.at("coverage").is_null()) a.summary.coverage = s.at("coverage").get<double>();
    a.summary.cross_project_share = s.at("cross_project_share").get<double>();

    if (const auto& c = doc.at("category_prevalence"); !c.is_null()) {
      CategoryPrevalence p;
      for (const auto& [name, share] : c.at("shares").items()) {
        const auto category = parse_category(name);
        if (!category) throw ParseError("unknown category '" + name + "'");
        p.shares[*category] = share.get<double>();
      }
      p.categorized = c.at("categorized").get<std::size_t>();
      p.uncategorized = c.at("uncategorized").get<std::size_t>();
      a.categories = p;
    }
    if (const auto& t = doc.at("type_prevalence"); !t.is_null()) {
      TypePrevalence p;
      for (const auto& [name, share] : t.at("shares").items()) p.shares[name] = share.get<double>();
      p.categorized = t.at("categorized").get<std::size_t>();
      p.uncategorized = t.at("uncategorized").get<std::size_t>();
      a.types = p;
    }
    a.whole_graph = graph_metrics_from_json(doc.at("whole_graph"));
    for (const auto& [name, report] : doc.at("by_category").items()) {
      const auto category = parse_category(name);
      if (!category) throw ParseError("unknown category '" + name + "'");
      a.by_category[*category] = graph_metrics_from_json(report);
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed repository report: ") + e.what());
  }
  return a;
}

std::string prevalence_csv(const TypePrevalence& prevalence, const LinkTaxonomy& taxonomy) {
  std::string out = csv_line({"type", "category", "share"});
  for (const auto& [type, share] : prevalence.shares) {
    out += csv_line({type, std::string(to_string(taxonomy.categorize(type))), format_number(share)});
  }
  return out;
}

std::string prevalence_csv(const CategoryPrevalence& prevalence) {
  std::string out = csv_line({"category", "share"});
  for (auto category : kAllCategories) {
    out += csv_line({std::string(to_string(category)), format_number(prevalence.shares.at(category))});
  }
  return out;
}

std::string metrics_csv(const std::vector<std::pair<std::string, GraphMetricsReport>>& rows) {
  std::vector<std::string> header = {"slice"};
  header.insert(header.end(), graph_metric_columns().begin(), graph_metric_columns().end());
  std::string out = csv_line(header);
  for (const auto& [slice, report] : rows) {
    std::vector<std::string> cells = {slice};
    for (auto& cell : graph_metric_cells(report)) cells.push_back(std::move(cell));
    out += csv_line(cells);
  }
  return out;
}

std::string Table::to_csv() const {
  std::string out = csv_line(header);
  for (const auto& row : rows) out += csv_line(row);
  return out;
}

std::string Table::to_markdown() const {
  auto line = [](const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const auto& cell : cells) out += " " + cell + " |";
    return out + "\n";
  };
  std::string out = line(header);
  out += "|";
  for (std::size_t i = 0; i < header.size(); ++i) out += i == 0 ? " --- |" : " ---: |";
  out += "\n";
  for (const auto& row : rows) out += line(row);
  return out;
}

Table descriptive_table(std::span<const RepositoryAnalysis> analyses) {
  Table t{"descriptive", {"Source", "#Issues", "#Links", "#Types", "%Coverage", "%CrossProject"}, {}};
  for (const auto& a : analyses) {
    const auto& s = a.summary;
    t.rows.push_back({s.name, std::to_string(s.issues), std::to_string(s.links), std::to_string(s.distinct_types),
                      fixed(s.coverage), fixed(s.cross_project_share)});
  }
  append_summary_rows(t, 1);
  return t;
}

Table type_share_table(std::span<const RepositoryAnalysis> analyses) {
  std::set<std::string> types;
  for (const auto& a : analyses) {
    if (!a.types) continue;
    for (const auto& [type, share] : a.types->shares) types.insert(type);
  }
  Table t{"type_shares", {"Source"}, {}};
  t.header.insert(t.header.end(), types.begin(), types.end());
  for (const auto& a : analyses) {
    std::vector<std::string> row = {a.summary.name};
    for (const auto& type : types) {
      std::optional<double> share;
      if (a.types) {
        auto it = a.types->shares.find(type);
        share = it == a.types->shares.end() ? 0.0 : it->second;
      }
      row.push_back(fixed(share));
    }
    t.rows.push_back(std::move(row));
  }
  append_summary_rows(t, 1);
  return t;
}

Table category_share_table(std::span<const RepositoryAnalysis> analyses) {
  Table t{"category_shares", {"Source"}, {}};
  for (auto c : kAllCategories) t.header.emplace_back(to_string(c));
  for (const auto& a : analyses) {
    std::vector<std::string> row = {a.summary.name};
    for (auto c : kAllCategories) {
      row.push_back(a.categories ? fixed(a.categories->shares.at(c)) : std::string{});
    }
    t.rows.push_back(std::move(row));
  }
  append_summary_rows(t, 1);
  return t;
}

Table whole_graph_table(std::span<const RepositoryAnalysis> analyses) {
  Table t{"whole_graph", {"Source", "%Isolated", "%2Comp", "%3Comp+", "AvgDensity", "%Trees", "%Stars",
                                 "Assortativity"},
          {}};
  for (const auto& a : analyses) {
    const auto& r = a.whole_graph;
    t.rows.push_back({a.summary.name, fixed(r.pct_isolated), fixed(r.pct_2comp), fixed(r.pct_3comp_plus),
                      fixed(r.avg_density), fixed(r.pct_trees), fixed(r.pct_stars), fixed(r.assortativity)});
  }
  append_summary_rows(t, 1);
  return t;
}

Table category_metrics_table(std::span<const RepositoryAnalysis> analyses) {
  Table t{"category_metrics", {"Category", "%Isolated", "%2Comp", "%3Comp+", "AvgDensity", "%Trees",
                                      "%Stars", "Assortativity", "Transitivity"},
          {}};
  using Field = std::optional<double> GraphMetricsReport::*;
  const Field fields[] = {&GraphMetricsReport::pct_isolated, &GraphMetricsReport::pct_2comp,
                          &GraphMetricsReport::pct_3comp_plus, &GraphMetricsReport::avg_density,
                          &GraphMetricsReport::pct_trees,    &GraphMetricsReport::pct_stars,
                          &GraphMetricsReport::assortativity};
  for (auto category : kAllCategories) {
    std::vector<std::string> row = {std::string(to_string(category))};
    for (auto field : fields) {
      std::vector<double> values;
      for (const auto& a : analyses) {
        auto it = a.by_category.find(category);
        if (it != a.by_category.end() && it->second.*field) values.push_back(*(it->second.*field));
      }
      row.push_back(fixed(mean_of(values)));
    }
    std::vector<double> transitivities;
    for (const auto& a : analyses) {
      auto it = a.by_category.find(category);
      if (it != a.by_category.end() && it->second.edges > 0) transitivities.push_back(it->second.transitivity);
    }
    row.push_back(fixed(mean_of(transitivities)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<Table> emit_tables(std::span<const RepositoryAnalysis> analyses) {
  if (analyses.empty()) throw PreconditionError("emit_tables needs at least one repository report");
  return {descriptive_table(analyses), type_share_table(analyses), category_share_table(analyses),
          whole_graph_table(analyses), category_metrics_table(analyses)};
}

}  // namespace linkgraph
