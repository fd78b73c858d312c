#include "linkgraph/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "linkgraph/errors.hpp"
#include "linkgraph/hash.hpp"

namespace linkgraph {

Corpus issue_corpus(const Repository& repo) {
  Corpus corpus;
  for (const auto& [key, issue] : repo.issues) {
    if (issue.is_private) continue;
    corpus.emplace(key, issue.description.empty() ? issue.title : issue.title + "\n" + issue.description);
  }
  return corpus;
}

std::string corpus_hash(const Corpus& corpus) {
  std::string buffer;
  for (const auto& [key, text] : corpus) {
    buffer += std::to_string(key.size()) + ':' + key + std::to_string(text.size()) + ':' + text;
  }
  return sha256_hex(buffer);
}

bool TfIdfIndex::contains(std::string_view key) const { return vectors_.find(key) != vectors_.end(); }

std::int64_t TfIdfIndex::term_id(std::string_view token) const {
  auto it = vocabulary_.find(std::string(token));
  return it == vocabulary_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

double TfIdfIndex::idf(std::string_view token) const {
  const auto id = term_id(token);
  if (id < 0) throw PreconditionError("token '" + std::string(token) + "' is not in the vocabulary");
  return idf_[static_cast<std::size_t>(id)];
}

std::span<const SparseEntry> TfIdfIndex::vector(std::string_view key) const {
  auto it = vectors_.find(key);
  if (it == vectors_.end()) throw UnknownKeyError(std::string(key));
  return it->second;
}

TfIdfIndex fit_tfidf(const Corpus& corpus, const TokenizerConfig& config) {
  if (corpus.empty()) throw PreconditionError("cannot fit an index on an empty corpus");

  std::map<std::string, std::map<std::string, std::size_t>> counts;  // key -> token -> tf
  std::map<std::string, std::size_t> document_frequency;
  for (const auto& [key, text] : corpus) {
    auto& tf = counts[key];
    for (auto& token : preprocess(text, config)) ++tf[std::move(token)];
    for (const auto& [token, n] : tf) ++document_frequency[token];
  }
  if (document_frequency.empty()) {
    throw EmptyVocabularyError("no document in the corpus produced a token");
  }

  TfIdfIndex index;
  index.tokenizer_ = config;
  index.corpus_hash_ = corpus_hash(corpus);
  const double n_docs = static_cast<double>(corpus.size());
  for (const auto& [token, df] : document_frequency) {
    index.vocabulary_.emplace(token, static_cast<std::uint32_t>(index.idf_.size()));
    index.idf_.push_back(std::log((1.0 + n_docs) / (1.0 + static_cast<double>(df))) + 1.0);
  }

  for (const auto& [key, tf] : counts) {
    std::vector<SparseEntry> vec;
    vec.reserve(tf.size());
    double norm_sq = 0.0;
    for (const auto& [token, n] : tf) {
      const auto id = index.vocabulary_.at(token);
      const double w = static_cast<double>(n) * index.idf_[id];
      vec.push_back({id, w});
      norm_sq += w * w;
    }
    if (norm_sq > 0.0) {
      const double norm = std::sqrt(norm_sq);
      for (auto& e : vec) e.weight /= norm;
    }
    // Vocabulary ids follow token order, so vec is already sorted by term.
    index.vectors_.emplace(key, std::move(vec));
  }
  return index;
}

double pair_similarity(const TfIdfIndex& index, std::string_view a, std::string_view b) {
  const auto va = index.vector(a);
  const auto vb = index.vector(b);
  double dot = 0.0;
  auto i = va.begin();
  auto j = vb.begin();
  while (i != va.end() && j != vb.end()) {
    if (i->term < j->term) {
      ++i;
    } else if (j->term < i->term) {
      ++j;
    } else {
      dot += i->weight * j->weight;
      ++i;
      ++j;
    }
  }
  return std::clamp(dot, 0.0, 1.0);
}

namespace {

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

double f1_of(const Counts& c) {
  const auto denom = 2 * c.tp + c.fp + c.fn;
  return denom == 0 ? 0.0 : static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

void check_labels(std::span<const double> similarities, std::span<const int> labels) {
  if (similarities.size() != labels.size()) {
    throw PreconditionError("similarity and label counts differ");
  }
  bool has_pos = false, has_neg = false;
  for (int label : labels) {
    if (label != 0 && label != 1) throw PreconditionError("labels must be 0 or 1");
    (label == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw InsufficientDataError(std::string("threshold training needs both labels; no ") +
                                (has_pos ? "negative" : "positive") + " pairs present");
  }
}

}  // namespace

double positive_f1(std::span<const double> similarities, std::span<const int> labels, double theta) {
  Counts c;
  for (std::size_t i = 0; i < similarities.size(); ++i) {
    const bool predicted = similarities[i] > theta;
    const bool actual = labels[i] == 1;
    if (predicted && actual) ++c.tp;
    if (predicted && !actual) ++c.fp;
    if (!predicted && actual) ++c.fn;
  }
  return f1_of(c);
}

ThresholdClassifier train_threshold(std::span<const double> similarities, std::span<const int> labels) {
  check_labels(similarities, labels);

  std::vector<std::size_t> order(similarities.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return similarities[x] < similarities[y]; });

  std::vector<double> distinct;
  for (auto i : order) {
    if (distinct.empty() || similarities[i] != distinct.back()) distinct.push_back(similarities[i]);
  }

  ThresholdClassifier classifier;
  auto degenerate_at = [&](double theta) {
    const int first = similarities[0] > theta;
    return std::all_of(similarities.begin(), similarities.end(), [&](double s) { return (s > theta) == first; });
  };
  if (distinct.size() == 1) {
    classifier.theta = 1.0;
    classifier.training_f1 = positive_f1(similarities, labels, 1.0);
    classifier.degenerate = true;
    return classifier;
  }

  std::vector<double> candidates = {0.0, 1.0};
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) candidates.push_back((distinct[i] + distinct[i + 1]) / 2.0);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // Suffix sums over the sorted order give TP/FP for "similarity > theta".
  const std::size_t n = order.size();
  std::vector<std::size_t> positives_from(n + 1, 0);
  for (std::size_t r = n; r-- > 0;) positives_from[r] = positives_from[r + 1] + (labels[order[r]] == 1);
  const std::size_t total_pos = positives_from[0];

  double best_f1 = -1.0;
  for (double theta : candidates) {
    const auto first_above = static_cast<std::size_t>(
        std::upper_bound(order.begin(), order.end(), theta,
                         [&](double t, std::size_t idx) { return t < similarities[idx]; }) -
        order.begin());
    Counts c;
    c.tp = positives_from[first_above];
    c.fp = (n - first_above) - c.tp;
    c.fn = total_pos - c.tp;
    const double f1 = f1_of(c);
    if (f1 >= best_f1) {
      best_f1 = f1;
      classifier.theta = theta;
    }
  }
  classifier.training_f1 = best_f1;
  classifier.degenerate = degenerate_at(classifier.theta);
  return classifier;
}

ThresholdClassifier train_threshold(std::span<const TrainingExample> train, const TfIdfIndex& index) {
  std::vector<double> similarities;
  std::vector<int> labels;
  similarities.reserve(train.size());
  labels.reserve(train.size());
  for (const auto& ex : train) {
    similarities.push_back(pair_similarity(index, ex.pair.a, ex.pair.b));
    labels.push_back(ex.label);
  }
  if (train.empty()) throw InsufficientDataError("threshold training needs a non-empty training set");
  return train_threshold(similarities, labels);
}

std::vector<std::pair<std::string, double>> ktop_retrieve(const TfIdfIndex& index, std::string_view query,
                                                          std::span<const std::string> candidates,
                                                          std::size_t k) {
  if (k == 0) throw PreconditionError("k must be at least 1");
  if (!index.contains(query)) throw UnknownKeyError(std::string(query));

  std::set<std::string_view> unique(candidates.begin(), candidates.end());
  std::vector<std::pair<std::string, double>> ranked;
  ranked.reserve(unique.size());
  for (auto key : unique) {
    if (key == query) continue;
    ranked.emplace_back(std::string(key), pair_similarity(index, query, key));
  }
  const auto keep = std::min(k, ranked.size());
  auto better = [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second > y.second : x.first < y.first;
  };
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(), better);
  ranked.resize(keep);
  return ranked;
}

}  // namespace linkgraph
