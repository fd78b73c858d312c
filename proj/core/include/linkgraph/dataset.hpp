#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "linkgraph/graph.hpp"
#include "linkgraph/ingest.hpp"
#include "linkgraph/taxonomy.hpp"

namespace linkgraph {

enum class PairClass { Dup, OtherLink, NonLink };

inline constexpr std::array<PairClass, 3> kAllPairClasses = {PairClass::Dup, PairClass::OtherLink,
                                                             PairClass::NonLink};

std::string_view to_string(PairClass klass);
std::optional<PairClass> parse_pair_class(std::string_view text);

/// Canonical type name that marks the Dup class.
inline constexpr std::string_view kDuplicateType = "Duplicate";

struct LabeledPair {
  std::string a;  // a < b
  std::string b;
  PairClass klass = PairClass::NonLink;
  std::optional<std::string> canonical_type;
  std::optional<LinkCategory> category;
  bool auto_created = false;

  friend bool operator==(const LabeledPair&, const LabeledPair&) = default;
};

/// Orders the endpoints and validates a != b.
LabeledPair make_pair(std::string a, std::string b, PairClass klass,
                      std::optional<std::string> canonical_type = std::nullopt,
                      std::optional<LinkCategory> category = std::nullopt, bool auto_created = false);

enum class SplitStrategy { Random, Cluster };
std::string_view to_string(SplitStrategy strategy);
std::optional<SplitStrategy> parse_split_strategy(std::string_view text);

struct SplitConfig {
  SplitStrategy strategy = SplitStrategy::Random;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  bool exclude_auto_created = true;

  /// Throws ValidationError unless 0 < test_fraction < 1.
  void validate() const;
};

enum class TrainingConfig { DvsNL, DvsOLNL, DOLvsNL };

inline constexpr std::array<TrainingConfig, 3> kAllTrainingConfigs = {
    TrainingConfig::DvsNL, TrainingConfig::DvsOLNL, TrainingConfig::DOLvsNL};

std::string_view to_string(TrainingConfig config);
std::optional<TrainingConfig> parse_training_config(std::string_view text);

/// Binary ground truth of a pair class under a training configuration. Returns
/// nullopt only for OtherLink under DvsNL, where those pairs are left out of
/// training. For scoring, use evaluation_label instead.
std::optional<int> training_label(PairClass klass, TrainingConfig config);

/// Binary ground truth used when scoring: OtherLink counts as a negative for
/// the two Dup-positive configurations.
int evaluation_label(PairClass klass, TrainingConfig config);

/// Which issues may serve as non-link endpoints.
struct NonLinkPolicy {
  std::set<std::string> closed_statuses = {"closed", "done", "resolved"};  // case-folded
  std::string excluded_resolution = "duplicate";                           // case-folded

  bool eligible(const IssueRecord& issue) const;
};

/// Retained links of a cleaned repository as Dup / OtherLink pairs.
std::vector<LabeledPair> labeled_links(const Repository& repo, const LinkTaxonomy& taxonomy);

/// Draws `count` distinct unordered pairs of eligible issues that are not
/// linked. Raises ExhaustionError when fewer pairs exist.
std::vector<LabeledPair> synthesize_nonlinks(const Repository& repo, std::size_t count,
                                             std::uint64_t seed, const NonLinkPolicy& policy = {});

struct SplitStats {
  std::size_t shared_issues = 0;  // issue keys present in both pools
  std::size_t linked_total = 0;
  std::size_t linked_test = 0;
  std::size_t discarded_nonlinks = 0;
  std::size_t resynthesized_nonlinks = 0;
  std::size_t nonlink_shortfall = 0;
  double achieved_test_fraction = 0.0;  // over all pairs (random) or linked pairs (cluster)
};

struct SplitResult {
  std::vector<LabeledPair> train;
  std::vector<LabeledPair> test;
  SplitStats stats;
};

/// Number of issue keys occurring in both pools.
std::size_t shared_issue_count(std::span<const LabeledPair> first, std::span<const LabeledPair> second);

/// Seeded shuffle and cut; pools may share issues, which is measured.
SplitResult split_random(std::vector<LabeledPair> pairs, const SplitConfig& config);

/// Assigns whole connected components of `graph` (built over all link types)
/// to one pool, so the pools are issue-disjoint. Non-links straddling the
/// pools are dropped and redrawn within each pool from `repo`.
SplitResult split_cluster(const Repository& repo, std::vector<LabeledPair> pairs,
                          const IssueGraph& graph, const SplitConfig& config,
                          const NonLinkPolicy& policy = {});

/// Relative tolerance on the linked-pair test fraction of a cluster split.
inline constexpr double kClusterSplitTolerance = 0.05;

struct TrainingExample {
  LabeledPair pair;
  int label = 0;
};

/// Balanced binary training set: the larger side is downsampled (stratified
/// by pair class) to the size of the smaller one.
std::vector<TrainingExample> make_training_set(std::span<const LabeledPair> pool, TrainingConfig config,
                                               std::uint64_t seed, bool exclude_auto_created = true);

struct TestSets {
  std::vector<LabeledPair> new_set;      // balanced over the three classes
  std::vector<LabeledPair> traditional;  // new_set without OtherLink
};

TestSets make_test_sets(std::span<const LabeledPair> pool, std::uint64_t seed);

struct ClassCounts {
  std::size_t dup = 0;
  std::size_t other_link = 0;
  std::size_t non_link = 0;

  std::size_t& operator[](PairClass klass);
  std::size_t operator[](PairClass klass) const;
  std::size_t total() const { return dup + other_link + non_link; }
};

ClassCounts count_classes(std::span<const LabeledPair> pairs);

struct DatasetProvenance {
  std::string repository;
  SplitConfig split;
  TrainingConfig training = TrainingConfig::DvsNL;
  std::size_t nonlinks_requested = 0;
  ClassCounts pool;
  ClassCounts train_pool;
  ClassCounts test_pool;
  std::size_t train_positive = 0;
  std::size_t train_negative = 0;
  ClassCounts test_new;
  ClassCounts test_traditional;
  SplitStats split_stats;
};

struct DatasetBundle {
  std::vector<TrainingExample> train;
  std::vector<LabeledPair> test_new;
  std::vector<LabeledPair> test_traditional;
  DatasetProvenance provenance;
};

struct DatasetOptions {
  SplitConfig split;
  TrainingConfig training = TrainingConfig::DvsNL;
  /// Non-links to synthesize; defaults to the size of the larger link class.
  std::optional<std::size_t> nonlinks;
  NonLinkPolicy policy;
};

/// labeled_links + synthesize_nonlinks + split + make_training_set +
/// make_test_sets with independent seed streams.
DatasetBundle build_dataset(const Repository& repo, const LinkTaxonomy& taxonomy,
                            const DatasetOptions& options);

}  // namespace linkgraph
