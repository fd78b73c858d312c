#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "linkgraph/dataset.hpp"
#include "linkgraph/ingest.hpp"
#include "linkgraph/text.hpp"

namespace linkgraph {

using Corpus = std::map<std::string, std::string>;  // issue key -> text

/// Title and description of every non-private issue.
Corpus issue_corpus(const Repository& repo);

/// Hash over the (key, text) entries; identifies the corpus an index was fit on.
std::string corpus_hash(const Corpus& corpus);

struct SparseEntry {
  std::uint32_t term = 0;
  double weight = 0.0;
};

/// Term-frequency / inverse-document-frequency vectors, L2-normalized.
///
///   tf(t, d) = raw count of t in d
///   idf(t)   = ln((1 + N) / (1 + df(t))) + 1
class TfIdfIndex {
 public:
  std::size_t document_count() const { return vectors_.size(); }
  std::size_t vocabulary_size() const { return vocabulary_.size(); }

  bool contains(std::string_view key) const;
  /// Term id of a token, or -1 when it is not in the vocabulary.
  std::int64_t term_id(std::string_view token) const;
  double idf(std::string_view token) const;
  std::span<const SparseEntry> vector(std::string_view key) const;
  const std::map<std::string, std::uint32_t>& vocabulary() const { return vocabulary_; }
  const std::string& corpus_hash() const { return corpus_hash_; }
  const TokenizerConfig& tokenizer() const { return tokenizer_; }

  friend TfIdfIndex fit_tfidf(const Corpus& corpus, const TokenizerConfig& config);

 private:
  std::map<std::string, std::uint32_t> vocabulary_;
  std::vector<double> idf_;
  std::map<std::string, std::vector<SparseEntry>, std::less<>> vectors_;
  std::string corpus_hash_;
  TokenizerConfig tokenizer_;
};

/// Throws PreconditionError on an empty corpus and EmptyVocabularyError when
/// no document yields a token.
TfIdfIndex fit_tfidf(const Corpus& corpus, const TokenizerConfig& config);

/// Cosine of the stored vectors; 0 when either is the zero vector.
double pair_similarity(const TfIdfIndex& index, std::string_view a, std::string_view b);

struct ThresholdClassifier {
  double theta = 1.0;
  double training_f1 = 0.0;
  /// True when every training pair received the same prediction.
  bool degenerate = false;

  /// Positive iff similarity exceeds theta.
  int predict(double similarity) const { return similarity > theta ? 1 : 0; }
};

/// F1 of the positive label when predicting `similarity > theta`.
double positive_f1(std::span<const double> similarities, std::span<const int> labels, double theta);

/// Chooses theta among {0, 1} and the midpoints between consecutive distinct
/// training similarities, maximizing positive-class F1; ties go to the larger
/// theta. When all similarities coincide, theta is 1 and the result is
/// flagged degenerate.
ThresholdClassifier train_threshold(std::span<const double> similarities, std::span<const int> labels);
ThresholdClassifier train_threshold(std::span<const TrainingExample> train, const TfIdfIndex& index);

/// Top-k candidates by similarity to `query` (excluded from the candidates),
/// descending, ties by ascending key. k larger than the candidate set returns
/// every candidate.
std::vector<std::pair<std::string, double>> ktop_retrieve(const TfIdfIndex& index, std::string_view query,
                                                          std::span<const std::string> candidates,
                                                          std::size_t k);

/// What `model train` writes: the classifier plus enough to rebuild and
/// verify the index it was trained on.
struct TrainedModel {
  ThresholdClassifier classifier;
  TrainingConfig training = TrainingConfig::DvsNL;
  TokenizerConfig tokenizer;
  std::string corpus_hash;
  std::string repository_name;
  std::string repository_path;
  std::size_t training_pairs = 0;
};

}  // namespace linkgraph
