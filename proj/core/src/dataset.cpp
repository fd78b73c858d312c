#include "linkgraph/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "linkgraph/errors.hpp"
#include "linkgraph/rng.hpp"

namespace linkgraph {

namespace {

// Seed streams; one per seeded stage so stages stay independent.
constexpr std::uint64_t kStreamNonlinks = 1;
constexpr std::uint64_t kStreamSplit = 2;
constexpr std::uint64_t kStreamResynthesis = 3;
constexpr std::uint64_t kStreamTraining = 4;
constexpr std::uint64_t kStreamTest = 5;

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

/// Draws up to `count` unlinked pairs among `keys` (sorted, distinct),
/// avoiding every pair in `forbidden`. Returns fewer only when the supply runs
/// out.
class PairSampler {
 public:
  PairSampler(std::vector<std::string> keys, const std::vector<std::pair<std::string, std::string>>& forbidden)
      : keys_(std::move(keys)) {
    for (std::uint32_t i = 0; i < keys_.size(); ++i) index_.emplace(keys_[i], i);
    for (const auto& [a, b] : forbidden) {
      auto ia = index_.find(a);
      auto ib = index_.find(b);
      if (ia == index_.end() || ib == index_.end() || ia->second == ib->second) continue;
      taken_.insert(code(ia->second, ib->second));
    }
  }

  std::uint64_t available() const {
    const std::uint64_t n = keys_.size();
    return n * (n - (n > 0 ? 1 : 0)) / 2 - taken_.size();
  }

  std::vector<std::pair<std::string, std::string>> draw(std::size_t count, Rng& rng) {
    std::vector<std::pair<std::string, std::string>> out;
    count = static_cast<std::size_t>(std::min<std::uint64_t>(count, available()));
    if (count == 0) return out;
    out.reserve(count);
    const std::uint64_t n = keys_.size();

    if (available() <= 4 * static_cast<std::uint64_t>(count)) {
      // Dense request: enumerate what is left and take a seeded prefix.
      std::vector<std::uint64_t> free;
      free.reserve(static_cast<std::size_t>(available()));
      for (std::uint64_t i = 0; i < n; ++i) {
        for (std::uint64_t j = i + 1; j < n; ++j) {
          if (!taken_.count(i * n + j)) free.push_back(i * n + j);
        }
      }
      for (std::size_t k = 0; k < count; ++k) {
        const auto pick = k + static_cast<std::size_t>(rng.below(free.size() - k));
        std::swap(free[k], free[pick]);
        taken_.insert(free[k]);
        out.emplace_back(keys_[free[k] / n], keys_[free[k] % n]);
      }
      return out;
    }

    while (out.size() < count) {
      auto i = rng.below(n);
      auto j = rng.below(n);
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      if (!taken_.insert(i * n + j).second) continue;
      out.emplace_back(keys_[i], keys_[j]);
    }
    return out;
  }

 private:
  std::uint64_t code(std::uint64_t i, std::uint64_t j) const {
    if (i > j) std::swap(i, j);
    return i * keys_.size() + j;
  }

  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::unordered_set<std::uint64_t> taken_;
};

std::vector<std::pair<std::string, std::string>> link_pairs(const Repository& repo) {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(repo.links.size());
  for (const auto& link : repo.links) out.emplace_back(link.source, link.target);
  return out;
}

std::vector<std::string> eligible_keys(const Repository& repo, const NonLinkPolicy& policy,
                                       const std::unordered_set<std::string>* restrict_to = nullptr) {
  std::vector<std::string> keys;
  for (const auto& [key, issue] : repo.issues) {
    if (restrict_to && !restrict_to->count(key)) continue;
    if (policy.eligible(issue)) keys.push_back(key);
  }
  return keys;
}

template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> items, std::size_t count, Rng& rng) {
  count = std::min(count, items.size());
  for (std::size_t k = 0; k < count; ++k) {
    const auto pick = k + static_cast<std::size_t>(rng.below(items.size() - k));
    std::swap(items[k], items[pick]);
  }
  items.resize(count);
  return items;
}

/// Takes `total` items across the groups, proportionally to group size with
/// largest-remainder rounding, keeping at least one per group when possible.
std::vector<LabeledPair> stratified_take(const std::vector<std::vector<LabeledPair>>& groups,
                                         std::size_t total, Rng& rng) {
  std::size_t available = 0;
  for (const auto& g : groups) available += g.size();
  std::vector<std::size_t> quota(groups.size(), 0);
  if (total >= available) {
    for (std::size_t i = 0; i < groups.size(); ++i) quota[i] = groups[i].size();
  } else {
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const double exact = static_cast<double>(total) * static_cast<double>(groups[i].size()) /
                           static_cast<double>(available);
      quota[i] = static_cast<std::size_t>(std::floor(exact));
      assigned += quota[i];
      remainders.emplace_back(exact - static_cast<double>(quota[i]), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < total; ++r, ++assigned) ++quota[remainders[r % remainders.size()].second];
    if (total >= groups.size()) {
      for (std::size_t i = 0; i < groups.size(); ++i) {
        if (quota[i] > 0 || groups[i].empty()) continue;
        auto donor = std::max_element(quota.begin(), quota.end()) - quota.begin();
        --quota[static_cast<std::size_t>(donor)];
        ++quota[i];
      }
    }
  }
  std::vector<LabeledPair> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto taken = sample_without_replacement(groups[i], quota[i], rng);
    out.insert(out.end(), std::make_move_iterator(taken.begin()), std::make_move_iterator(taken.end()));
  }
  return out;
}

std::vector<PairClass> positive_classes(TrainingConfig config) {
  switch (config) {
    case TrainingConfig::DvsNL:
    case TrainingConfig::DvsOLNL: return {PairClass::Dup};
    case TrainingConfig::DOLvsNL: return {PairClass::Dup, PairClass::OtherLink};
  }
  return {};
}

std::vector<PairClass> negative_classes(TrainingConfig config) {
  switch (config) {
    case TrainingConfig::DvsNL:
    case TrainingConfig::DOLvsNL: return {PairClass::NonLink};
    case TrainingConfig::DvsOLNL: return {PairClass::OtherLink, PairClass::NonLink};
  }
  return {};
}

std::unordered_set<std::string> keys_of(std::span<const LabeledPair> pairs) {
  std::unordered_set<std::string> keys;
  for (const auto& p : pairs) {
    keys.insert(p.a);
    keys.insert(p.b);
  }
  return keys;
}

}  // namespace

std::string_view to_string(PairClass klass) {
  switch (klass) {
    case PairClass::Dup: return "Dup";
    case PairClass::OtherLink: return "OtherLink";
    case PairClass::NonLink: return "NonLink";
  }
  return "NonLink";
}

std::optional<PairClass> parse_pair_class(std::string_view text) {
  const auto folded = lower(text);
  if (folded == "dup" || folded == "duplicate") return PairClass::Dup;
  if (folded == "otherlink" || folded == "ol") return PairClass::OtherLink;
  if (folded == "nonlink" || folded == "nl") return PairClass::NonLink;
  return std::nullopt;
}

LabeledPair make_pair(std::string a, std::string b, PairClass klass, std::optional<std::string> canonical_type,
                      std::optional<LinkCategory> category, bool auto_created) {
  if (a == b) throw PreconditionError("a labeled pair needs two distinct issues, got '" + a + "' twice");
  if (b < a) std::swap(a, b);
  return LabeledPair{std::move(a), std::move(b), klass, std::move(canonical_type), category, auto_created};
}

std::string_view to_string(SplitStrategy strategy) {
  return strategy == SplitStrategy::Random ? "random" : "cluster";
}

std::optional<SplitStrategy> parse_split_strategy(std::string_view text) {
  const auto folded = lower(text);
  if (folded == "random") return SplitStrategy::Random;
  if (folded == "cluster") return SplitStrategy::Cluster;
  return std::nullopt;
}

void SplitConfig::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ValidationError("test fraction must lie strictly between 0 and 1, got " +
                          std::to_string(test_fraction));
  }
}

std::string_view to_string(TrainingConfig config) {
  switch (config) {
    case TrainingConfig::DvsNL: return "DvsNL";
    case TrainingConfig::DvsOLNL: return "DvsOLNL";
    case TrainingConfig::DOLvsNL: return "DOLvsNL";
  }
  return "DvsNL";
}

std::optional<TrainingConfig> parse_training_config(std::string_view text) {
  for (auto c : kAllTrainingConfigs) {
    if (lower(to_string(c)) == lower(text)) return c;
  }
  return std::nullopt;
}

std::optional<int> training_label(PairClass klass, TrainingConfig config) {
  if (klass == PairClass::OtherLink && config == TrainingConfig::DvsNL) return std::nullopt;
  return evaluation_label(klass, config);
}

int evaluation_label(PairClass klass, TrainingConfig config) {
  switch (klass) {
    case PairClass::Dup: return 1;
    case PairClass::NonLink: return 0;
    case PairClass::OtherLink: return config == TrainingConfig::DOLvsNL ? 1 : 0;
  }
  return 0;
}

bool NonLinkPolicy::eligible(const IssueRecord& issue) const {
  if (issue.is_private) return false;
  if (!closed_statuses.count(lower(issue.status))) return false;
  return !(issue.resolution && lower(*issue.resolution) == excluded_resolution);
}

std::vector<LabeledPair> labeled_links(const Repository& repo, const LinkTaxonomy& taxonomy) {
  if (!repo.cleaned) throw PreconditionError("labeled_links expects a cleaned repository");
  std::vector<LabeledPair> out;
  out.reserve(repo.links.size());
  for (const auto& link : repo.links) {
    auto canonical = taxonomy.normalize_type(link.raw_type);
    const auto category = taxonomy.categorize(canonical);
    const auto klass = canonical == kDuplicateType ? PairClass::Dup : PairClass::OtherLink;
    const bool automatic = taxonomy.is_auto_created(canonical);
    out.push_back(make_pair(link.source, link.target, klass, std::move(canonical), category, automatic));
  }
  return out;
}

std::vector<LabeledPair> synthesize_nonlinks(const Repository& repo, std::size_t count, std::uint64_t seed,
                                             const NonLinkPolicy& policy) {
  if (count == 0) return {};
  PairSampler sampler(eligible_keys(repo, policy), link_pairs(repo));
  if (sampler.available() < count) {
    const auto produced = static_cast<std::size_t>(sampler.available());
    throw ExhaustionError("requested " + std::to_string(count) + " non-links but only " +
                              std::to_string(produced) + " unlinked eligible pairs exist",
                          produced);
  }
  Rng rng(seed);
  std::vector<LabeledPair> out;
  out.reserve(count);
  for (auto& [a, b] : sampler.draw(count, rng)) out.push_back(make_pair(std::move(a), std::move(b), PairClass::NonLink));
  return out;
}

std::size_t shared_issue_count(std::span<const LabeledPair> first, std::span<const LabeledPair> second) {
  const auto a = keys_of(first);
  std::unordered_set<std::string> shared;
  for (const auto& p : second) {
    if (a.count(p.a)) shared.insert(p.a);
    if (a.count(p.b)) shared.insert(p.b);
  }
  return shared.size();
}

SplitResult split_random(std::vector<LabeledPair> pairs, const SplitConfig& config) {
  config.validate();
  Rng rng(config.seed);
  rng.shuffle(std::span<LabeledPair>(pairs));
  const auto test_count = static_cast<std::size_t>(
      std::llround(static_cast<double>(pairs.size()) * config.test_fraction));

  SplitResult result;
  result.test.assign(std::make_move_iterator(pairs.begin()),
                     std::make_move_iterator(pairs.begin() + static_cast<std::ptrdiff_t>(test_count)));
  result.train.assign(std::make_move_iterator(pairs.begin() + static_cast<std::ptrdiff_t>(test_count)),
                      std::make_move_iterator(pairs.end()));
  result.stats.shared_issues = shared_issue_count(result.train, result.test);
  for (const auto& p : result.train) result.stats.linked_total += p.klass != PairClass::NonLink;
  for (const auto& p : result.test) {
    result.stats.linked_total += p.klass != PairClass::NonLink;
    result.stats.linked_test += p.klass != PairClass::NonLink;
  }
  result.stats.achieved_test_fraction =
      pairs.empty() ? 0.0 : static_cast<double>(test_count) / static_cast<double>(pairs.size());
  return result;
}

SplitResult split_cluster(const Repository& repo, std::vector<LabeledPair> pairs, const IssueGraph& graph,
                          const SplitConfig& config, const NonLinkPolicy& policy) {
  config.validate();

  const auto components = connected_components(graph);
  std::unordered_map<std::string, std::size_t> component_of;
  for (std::size_t c = 0; c < components.size(); ++c) {
    for (const auto& key : components[c].vertices) component_of.emplace(key, c);
  }
  auto lookup = [&](const std::string& key) {
    auto it = component_of.find(key);
    if (it == component_of.end()) {
      throw PreconditionError("issue '" + key + "' is not a vertex of the split graph");
    }
    return it->second;
  };

  std::vector<std::size_t> linked_per_component(components.size(), 0);
  std::size_t linked_total = 0;
  for (const auto& p : pairs) {
    if (p.klass == PairClass::NonLink) continue;
    const auto c = lookup(p.a);
    if (lookup(p.b) != c) {
      throw PreconditionError("linked pair {" + p.a + ", " + p.b +
                              "} spans two components; build the split graph over all link types");
    }
    ++linked_per_component[c];
    ++linked_total;
  }
  if (linked_total == 0) throw InsufficientDataError("cluster split needs at least one linked pair");

  const double target = config.test_fraction * static_cast<double>(linked_total);
  const double upper = target * (1.0 + kClusterSplitTolerance);
  const double lower = target * (1.0 - kClusterSplitTolerance);

  std::vector<std::size_t> order(components.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(config.seed, kStreamSplit));
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<bool> in_test(components.size(), false);
  std::size_t linked_test = 0;
  for (const auto c : order) {
    const auto count = linked_per_component[c];
    if (count == 0) {
      in_test[c] = rng.unit() < config.test_fraction;
    } else if (static_cast<double>(linked_test + count) <= upper) {
      in_test[c] = true;
      linked_test += count;
    }
  }
  if (static_cast<double>(linked_test) < lower) {
    throw ExhaustionError("cluster split with seed " + std::to_string(config.seed) + " put " +
                              std::to_string(linked_test) + " of " + std::to_string(linked_total) +
                              " linked pairs in test, outside the tolerated range around " +
                              std::to_string(target) + "; try a different seed",
                          linked_test);
  }

  SplitResult result;
  std::size_t nonlinks_total = 0;
  for (auto& p : pairs) {
    const bool a_test = in_test[lookup(p.a)];
    const bool b_test = in_test[lookup(p.b)];
    if (p.klass == PairClass::NonLink) ++nonlinks_total;
    if (a_test != b_test) {
      ++result.stats.discarded_nonlinks;  // only non-links can straddle
      continue;
    }
    (a_test ? result.test : result.train).push_back(std::move(p));
  }

  // Refill each pool with within-pool non-links up to its share.
  const auto test_nonlink_target =
      static_cast<std::size_t>(std::llround(config.test_fraction * static_cast<double>(nonlinks_total)));
  const std::size_t targets[2] = {nonlinks_total - test_nonlink_target, test_nonlink_target};
  Rng resynthesis(derive_seed(config.seed, kStreamResynthesis));
  for (int side = 0; side < 2; ++side) {
    auto& pool = side == 1 ? result.test : result.train;
    std::size_t have = 0;
    for (const auto& p : pool) have += p.klass == PairClass::NonLink;
    if (have >= targets[side]) continue;

    std::unordered_set<std::string> members;
    for (const auto& [key, c] : component_of) {
      if (in_test[c] == (side == 1)) members.insert(key);
    }
    auto forbidden = link_pairs(repo);
    for (const auto& p : pool) forbidden.emplace_back(p.a, p.b);
    PairSampler sampler(eligible_keys(repo, policy, &members), forbidden);
    const auto wanted = targets[side] - have;
    auto drawn = sampler.draw(wanted, resynthesis);
    result.stats.resynthesized_nonlinks += drawn.size();
    result.stats.nonlink_shortfall += wanted - drawn.size();
    for (auto& [a, b] : drawn) pool.push_back(make_pair(std::move(a), std::move(b), PairClass::NonLink));
  }

  result.stats.shared_issues = shared_issue_count(result.train, result.test);
  result.stats.linked_total = linked_total;
  result.stats.linked_test = linked_test;
  result.stats.achieved_test_fraction = static_cast<double>(linked_test) / static_cast<double>(linked_total);
  return result;
}

std::vector<TrainingExample> make_training_set(std::span<const LabeledPair> pool, TrainingConfig config,
                                               std::uint64_t seed, bool exclude_auto_created) {
  std::vector<std::vector<LabeledPair>> by_class(3);
  for (const auto& p : pool) {
    if (exclude_auto_created && p.auto_created) continue;
    by_class[static_cast<std::size_t>(p.klass)].push_back(p);
  }

  auto gather = [&](const std::vector<PairClass>& classes) {
    std::vector<std::vector<LabeledPair>> groups;
    std::size_t size = 0;
    for (auto klass : classes) {
      auto& group = by_class[static_cast<std::size_t>(klass)];
      if (group.empty()) {
        throw InsufficientDataError("training configuration " + std::string(to_string(config)) +
                                    " needs " + std::string(to_string(klass)) +
                                    " pairs but the training pool has none");
      }
      size += group.size();
      groups.push_back(group);
    }
    return std::pair{std::move(groups), size};
  };
  auto [positives, positive_size] = gather(positive_classes(config));
  auto [negatives, negative_size] = gather(negative_classes(config));

  const auto side = std::min(positive_size, negative_size);
  Rng rng(seed);
  auto chosen_positive = stratified_take(positives, side, rng);
  auto chosen_negative = stratified_take(negatives, side, rng);

  std::vector<TrainingExample> out;
  out.reserve(chosen_positive.size() + chosen_negative.size());
  for (auto& p : chosen_positive) out.push_back({std::move(p), 1});
  for (auto& p : chosen_negative) out.push_back({std::move(p), 0});
  rng.shuffle(std::span<TrainingExample>(out));
  return out;
}

TestSets make_test_sets(std::span<const LabeledPair> pool, std::uint64_t seed) {
  std::vector<std::vector<LabeledPair>> by_class(3);
  for (const auto& p : pool) by_class[static_cast<std::size_t>(p.klass)].push_back(p);

  std::size_t per_class = pool.size();
  for (const auto& group : by_class) per_class = std::min(per_class, group.size());
  if (per_class == 0) {
    std::string missing;
    for (auto klass : kAllPairClasses) {
      if (by_class[static_cast<std::size_t>(klass)].empty()) {
        missing += (missing.empty() ? "" : ", ") + std::string(to_string(klass));
      }
    }
    throw InsufficientDataError("test pool lacks " + missing +
                                " pairs; achievable balanced test set size is 0");
  }

  Rng rng(seed);
  TestSets sets;
  for (auto& group : by_class) {
    auto taken = sample_without_replacement(std::move(group), per_class, rng);
    sets.new_set.insert(sets.new_set.end(), std::make_move_iterator(taken.begin()),
                        std::make_move_iterator(taken.end()));
  }
  rng.shuffle(std::span<LabeledPair>(sets.new_set));
  for (const auto& p : sets.new_set) {
    if (p.klass != PairClass::OtherLink) sets.traditional.push_back(p);
  }
  return sets;
}

std::size_t& ClassCounts::operator[](PairClass klass) {
  switch (klass) {
    case PairClass::Dup: return dup;
    case PairClass::OtherLink: return other_link;
    case PairClass::NonLink: return non_link;
  }
  return non_link;
}

std::size_t ClassCounts::operator[](PairClass klass) const {
  return const_cast<ClassCounts&>(*this)[klass];
}

ClassCounts count_classes(std::span<const LabeledPair> pairs) {
  ClassCounts counts;
  for (const auto& p : pairs) ++counts[p.klass];
  return counts;
}

DatasetBundle build_dataset(const Repository& repo, const LinkTaxonomy& taxonomy, const DatasetOptions& options) {
  options.split.validate();
  const auto seed = options.split.seed;

  auto pairs = labeled_links(repo, taxonomy);
  const auto link_counts = count_classes(pairs);
  const auto nonlinks = options.nonlinks.value_or(std::max(link_counts.dup, link_counts.other_link));
  auto synthesized = synthesize_nonlinks(repo, nonlinks, derive_seed(seed, kStreamNonlinks), options.policy);
  pairs.insert(pairs.end(), std::make_move_iterator(synthesized.begin()),
               std::make_move_iterator(synthesized.end()));

  DatasetBundle bundle;
  auto& prov = bundle.provenance;
  prov.repository = repo.name;
  prov.split = options.split;
  prov.training = options.training;
  prov.nonlinks_requested = nonlinks;
  prov.pool = count_classes(pairs);

  SplitConfig split = options.split;
  SplitResult pools;
  if (split.strategy == SplitStrategy::Random) {
    split.seed = derive_seed(seed, kStreamSplit);
    pools = split_random(std::move(pairs), split);
  } else {
    pools = split_cluster(repo, std::move(pairs), build_graph(repo, taxonomy, GraphSlice::all()), split,
                          options.policy);
  }
  prov.split_stats = pools.stats;
  prov.train_pool = count_classes(pools.train);
  prov.test_pool = count_classes(pools.test);

  bundle.train = make_training_set(pools.train, options.training, derive_seed(seed, kStreamTraining),
                                   options.split.exclude_auto_created);
  for (const auto& ex : bundle.train) (ex.label == 1 ? prov.train_positive : prov.train_negative)++;

  auto tests = make_test_sets(pools.test, derive_seed(seed, kStreamTest));
  bundle.test_new = std::move(tests.new_set);
  bundle.test_traditional = std::move(tests.traditional);
  prov.test_new = count_classes(bundle.test_new);
  prov.test_traditional = count_classes(bundle.test_traditional);
  return bundle;
}

}  // namespace linkgraph
