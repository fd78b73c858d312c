#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linkgraph/dataset.hpp"
#include "linkgraph/model.hpp"

namespace linkgraph {

enum class EvalMode { Traditional, New };
std::string_view to_string(EvalMode mode);
std::optional<EvalMode> parse_eval_mode(std::string_view text);

/// Unordered pair key used to look up predictions.
using PairId = std::pair<std::string, std::string>;
PairId pair_id(std::string_view a, std::string_view b);

using Predictions = std::map<PairId, int>;

/// Counts indexed by (true pair class, predicted binary label). OtherLink
/// rows can additionally be broken down by link category.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, 2>, 3> counts{};
  std::map<LinkCategory, std::array<std::size_t, 2>> other_link_by_category;
  TrainingConfig training = TrainingConfig::DvsNL;
  EvalMode mode = EvalMode::New;

  std::size_t at(PairClass klass, int predicted) const {
    return counts[static_cast<std::size_t>(klass)][static_cast<std::size_t>(predicted)];
  }
  std::size_t total() const;
};

struct LabelMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

/// Metrics of the binary task. Zero denominators give 0; macro values are the
/// unweighted mean over the two labels.
struct EvalReport {
  EvalMode mode = EvalMode::New;
  TrainingConfig training = TrainingConfig::DvsNL;
  std::array<LabelMetrics, 2> per_label{};  // index = label
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t scored = 0;
  /// All predictions share one label.
  bool degenerate = false;
};

struct Evaluation {
  EvalReport report;
  ConfusionMatrix matrix;
};

/// Binary confusion counts to metrics; exposed for direct arithmetic checks.
EvalReport report_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn);

/// Scores predictions against a 3-class test set. Ground truth follows
/// evaluation_label; traditional mode drops OtherLink pairs first. A test
/// pair without a prediction raises PreconditionError naming it.
Evaluation evaluate(const Predictions& predictions, std::span<const LabeledPair> test, TrainingConfig config,
                    EvalMode mode);

struct RobustnessDelta {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

/// new - traditional, per metric.
RobustnessDelta robustness_delta(const EvalReport& traditional, const EvalReport& fresh);

/// Share of OtherLink pairs predicted positive.
double ol_confusion_rate(const ConfusionMatrix& matrix);

/// Per-category share of OtherLink pairs predicted positive.
std::map<LinkCategory, double> ol_confusion_by_category(const ConfusionMatrix& matrix);

/// Threshold predictions: positive iff similarity > theta.
Predictions predict_threshold(const TfIdfIndex& index, std::span<const LabeledPair> test, double theta);

/// kTop predictions: a pair is positive when either issue is among the k most
/// similar issues of the other, retrieving over every issue in the test set.
Predictions predict_ktop(const TfIdfIndex& index, std::span<const LabeledPair> test, std::size_t k);

struct SweepGrid {
  enum class Variable { Theta, K };
  Variable variable = Variable::Theta;
  std::vector<double> values;
};

struct SweepPoint {
  double setting = 0.0;
  EvalReport report;
};

/// One evaluation per grid value, in grid order. The grid must be non-empty
/// and monotone; K values must be positive integers.
std::vector<SweepPoint> sweep(const TfIdfIndex& index, std::span<const LabeledPair> test, TrainingConfig config,
                              EvalMode mode, const SweepGrid& grid);

}  // namespace linkgraph
