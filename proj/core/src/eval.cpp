#include "linkgraph/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "linkgraph/errors.hpp"

namespace linkgraph {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

LabelMetrics label_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
  LabelMetrics m;
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f1 = ratio(2 * tp, 2 * tp + fp + fn);
  m.support = tp + fn;
  return m;
}

bool grid_is_monotone(const std::vector<double>& values) {
  const bool up = std::is_sorted(values.begin(), values.end());
  const bool down = std::is_sorted(values.begin(), values.end(), std::greater<>{});
  return up || down;
}

}  // namespace

std::string_view to_string(EvalMode mode) { return mode == EvalMode::Traditional ? "traditional" : "new"; }

std::optional<EvalMode> parse_eval_mode(std::string_view text) {
  if (text == "traditional") return EvalMode::Traditional;
  if (text == "new") return EvalMode::New;
  return std::nullopt;
}

PairId pair_id(std::string_view a, std::string_view b) {
  return a < b ? PairId{std::string(a), std::string(b)} : PairId{std::string(b), std::string(a)};
}

std::size_t ConfusionMatrix::total() const {
  std::size_t sum = 0;
  for (const auto& row : counts) sum += row[0] + row[1];
  return sum;
}

EvalReport report_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  EvalReport r;
  r.per_label[1] = label_metrics(tp, fp, fn);
  r.per_label[0] = label_metrics(tn, fn, fp);
  r.macro_precision = (r.per_label[0].precision + r.per_label[1].precision) / 2.0;
  r.macro_recall = (r.per_label[0].recall + r.per_label[1].recall) / 2.0;
  r.macro_f1 = (r.per_label[0].f1 + r.per_label[1].f1) / 2.0;
  r.scored = tp + fp + fn + tn;
  r.accuracy = ratio(tp + tn, r.scored);
  r.degenerate = (tp + fp == 0) || (tn + fn == 0);
  return r;
}

Evaluation evaluate(const Predictions& predictions, std::span<const LabeledPair> test, TrainingConfig config,
                    EvalMode mode) {
  Evaluation out;
  out.matrix.training = config;
  out.matrix.mode = mode;

  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (const auto& pair : test) {
    if (mode == EvalMode::Traditional && pair.klass == PairClass::OtherLink) continue;
    auto it = predictions.find(pair_id(pair.a, pair.b));
    if (it == predictions.end()) {
      throw PreconditionError("no prediction for test pair {" + pair.a + ", " + pair.b + "}");
    }
    const int predicted = it->second != 0 ? 1 : 0;
    ++out.matrix.counts[static_cast<std::size_t>(pair.klass)][static_cast<std::size_t>(predicted)];
    if (pair.klass == PairClass::OtherLink && pair.category) {
      ++out.matrix.other_link_by_category[*pair.category][static_cast<std::size_t>(predicted)];
    }
    const int truth = evaluation_label(pair.klass, config);
    if (truth == 1) {
      (predicted == 1 ? tp : fn)++;
    } else {
      (predicted == 1 ? fp : tn)++;
    }
  }
  if (tp + fp + fn + tn == 0) throw PreconditionError("nothing to score: the test set is empty");

  out.report = report_from_counts(tp, fp, fn, tn);
  out.report.mode = mode;
  out.report.training = config;
  return out;
}

RobustnessDelta robustness_delta(const EvalReport& traditional, const EvalReport& fresh) {
  if (traditional.mode != EvalMode::Traditional || fresh.mode != EvalMode::New) {
    throw PreconditionError("robustness delta needs a traditional report and a new report");
  }
  if (traditional.training != fresh.training) {
    throw PreconditionError("robustness delta needs reports from the same training configuration");
  }
  RobustnessDelta d;
  d.accuracy = fresh.accuracy - traditional.accuracy;
  d.macro_precision = fresh.macro_precision - traditional.macro_precision;
  d.macro_recall = fresh.macro_recall - traditional.macro_recall;
  d.macro_f1 = fresh.macro_f1 - traditional.macro_f1;
  return d;
}

double ol_confusion_rate(const ConfusionMatrix& matrix) {
  if (matrix.training == TrainingConfig::DOLvsNL) {
    throw PreconditionError("OtherLink confusion is only meaningful for Dup-positive training configurations");
  }
  const auto positive = matrix.at(PairClass::OtherLink, 1);
  const auto total = positive + matrix.at(PairClass::OtherLink, 0);
  if (total == 0) throw UndefinedValueError("no OtherLink pairs were scored");
  return static_cast<double>(positive) / static_cast<double>(total);
}

std::map<LinkCategory, double> ol_confusion_by_category(const ConfusionMatrix& matrix) {
  std::map<LinkCategory, double> out;
  for (const auto& [category, row] : matrix.other_link_by_category) {
    if (row[0] + row[1] > 0) out[category] = ratio(row[1], row[0] + row[1]);
  }
  return out;
}

Predictions predict_threshold(const TfIdfIndex& index, std::span<const LabeledPair> test, double theta) {
  Predictions out;
  for (const auto& pair : test) {
    out[pair_id(pair.a, pair.b)] = pair_similarity(index, pair.a, pair.b) > theta ? 1 : 0;
  }
  return out;
}

Predictions predict_ktop(const TfIdfIndex& index, std::span<const LabeledPair> test, std::size_t k) {
  std::set<std::string> keys;
  for (const auto& pair : test) {
    keys.insert(pair.a);
    keys.insert(pair.b);
  }
  const std::vector<std::string> candidates(keys.begin(), keys.end());
  std::map<std::string, std::set<std::string>> top;
  for (const auto& key : candidates) {
    auto& hits = top[key];
    for (auto& [hit, sim] : ktop_retrieve(index, key, candidates, k)) hits.insert(std::move(hit));
  }
  Predictions out;
  for (const auto& pair : test) {
    const bool linked = top[pair.a].count(pair.b) || top[pair.b].count(pair.a);
    out[pair_id(pair.a, pair.b)] = linked ? 1 : 0;
  }
  return out;
}

std::vector<SweepPoint> sweep(const TfIdfIndex& index, std::span<const LabeledPair> test, TrainingConfig config,
                              EvalMode mode, const SweepGrid& grid) {
  if (grid.values.empty()) throw PreconditionError("sweep grid is empty");
  if (!grid_is_monotone(grid.values)) throw PreconditionError("sweep grid must be monotone");

  std::vector<SweepPoint> curve;
  curve.reserve(grid.values.size());
  for (double value : grid.values) {
    Predictions predictions;
    if (grid.variable == SweepGrid::Variable::Theta) {
      predictions = predict_threshold(index, test, value);
    } else {
      if (value < 1.0 || std::floor(value) != value) {
        throw PreconditionError("k grid values must be positive integers");
      }
      predictions = predict_ktop(index, test, static_cast<std::size_t>(value));
    }
    curve.push_back({value, evaluate(predictions, test, config, mode).report});
  }
  return curve;
}

}  // namespace linkgraph
