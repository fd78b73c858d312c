#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "linkgraph/ingest.hpp"

namespace linkgraph {

enum class LinkCategory { Relation, Duplication, Composition, TemporalCausal, Workflow };

inline constexpr std::array<LinkCategory, 5> kAllCategories = {
    LinkCategory::Relation, LinkCategory::Duplication, LinkCategory::Composition,
    LinkCategory::TemporalCausal, LinkCategory::Workflow};

std::string_view to_string(LinkCategory category);
/// Accepts the enumerator names case-insensitively plus "Temporal/Causal".
std::optional<LinkCategory> parse_category(std::string_view text);

enum class UnknownTypePolicy { Error, AssignRelation };

struct NormalizationRule {
  std::string pattern;
  std::string canonical;
};

/// Raw link type name -> canonical type -> category.
///
/// A raw name is case-folded, stripped of gantt decorations ("gantt: x",
/// "x [gantt]") and matched in order against the rules, each a whole-string
/// ECMAScript regex. A name that matches no rule but equals a canonical type
/// (case-insensitively) maps to that type.
class LinkTaxonomy {
 public:
  LinkTaxonomy(std::vector<NormalizationRule> rules, std::map<std::string, LinkCategory> categories,
               std::set<std::string> auto_created = {}, std::set<std::string> inferred = {},
               UnknownTypePolicy policy = UnknownTypePolicy::Error);

  static LinkTaxonomy from_json(std::string_view json_text,
                                UnknownTypePolicy policy = UnknownTypePolicy::Error);
  static LinkTaxonomy load(const std::filesystem::path& path,
                           UnknownTypePolicy policy = UnknownTypePolicy::Error);
  /// The table compiled into the library from core/data/link_taxonomy.json.
  static const LinkTaxonomy& bundled();

  LinkTaxonomy with_policy(UnknownTypePolicy policy) const;

  std::string normalize_type(std::string_view raw) const;
  LinkCategory categorize(std::string_view canonical) const;

  bool is_auto_created(std::string_view canonical) const;
  bool is_inferred(std::string_view canonical) const;
  bool knows(std::string_view canonical) const;

  UnknownTypePolicy policy() const { return policy_; }
  const std::vector<NormalizationRule>& rules() const { return rules_; }
  const std::map<std::string, LinkCategory>& categories() const { return categories_; }
  const std::set<std::string>& auto_created() const { return auto_created_; }
  const std::set<std::string>& inferred() const { return inferred_; }

  std::string to_json() const;

 private:
  std::vector<NormalizationRule> rules_;
  std::vector<std::regex> compiled_;
  std::map<std::string, LinkCategory> categories_;
  std::map<std::string, std::string> canonical_by_folded_;
  std::set<std::string> auto_created_;
  std::set<std::string> inferred_;
  UnknownTypePolicy policy_;
};

/// Case-folds and removes gantt decorations; whitespace runs collapse to one
/// space. Exposed for tests.
std::string strip_type_decorations(std::string_view raw);

/// Free-function spellings of the taxonomy lookups.
inline std::string normalize_type(std::string_view raw, const LinkTaxonomy& taxonomy) {
  return taxonomy.normalize_type(raw);
}
inline LinkCategory categorize(std::string_view canonical, const LinkTaxonomy& taxonomy) {
  return taxonomy.categorize(canonical);
}

struct CategoryPrevalence {
  std::map<LinkCategory, double> shares;  // all five categories present
  std::size_t categorized = 0;
  std::size_t uncategorized = 0;
};

struct TypePrevalence {
  std::map<std::string, double> shares;
  std::size_t categorized = 0;
  std::size_t uncategorized = 0;
};

/// Shares over retained links whose type normalizes and categorizes; links
/// with unknown types are counted separately instead of raising.
CategoryPrevalence category_prevalence(const Repository& repo, const LinkTaxonomy& taxonomy);
TypePrevalence type_prevalence(const Repository& repo, const LinkTaxonomy& taxonomy);

}  // namespace linkgraph
