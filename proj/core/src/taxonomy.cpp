#include "linkgraph/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "linkgraph/errors.hpp"

namespace linkgraph {

namespace detail {
std::string_view bundled_taxonomy_json();
}

namespace {

using nlohmann::json;

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }
bool ends_with(std::string_view s, std::string_view p) {
  return s.size() >= p.size() && s.substr(s.size() - p.size()) == p;
}

}  // namespace

std::string_view to_string(LinkCategory category) {
  switch (category) {
    case LinkCategory::Relation: return "Relation";
    case LinkCategory::Duplication: return "Duplication";
    case LinkCategory::Composition: return "Composition";
    case LinkCategory::TemporalCausal: return "TemporalCausal";
    case LinkCategory::Workflow: return "Workflow";
  }
  return "Relation";
}

std::optional<LinkCategory> parse_category(std::string_view text) {
  const auto folded = lower(text);
  if (folded == "temporal/causal" || folded == "temporal-causal") return LinkCategory::TemporalCausal;
  for (auto c : kAllCategories) {
    if (lower(to_string(c)) == folded) return c;
  }
  return std::nullopt;
}

std::string strip_type_decorations(std::string_view raw) {
  std::string s = collapse_whitespace(lower(raw));
  if (starts_with(s, "gantt")) {
    std::string_view rest = std::string_view(s).substr(5);
    if (!rest.empty() && (rest.front() == ':' || rest.front() == '-')) {
      s = collapse_whitespace(rest.substr(1));
    }
  }
  for (std::string_view suffix : {"[gantt]", "(gantt)"}) {
    if (ends_with(s, suffix)) s = collapse_whitespace(std::string_view(s).substr(0, s.size() - suffix.size()));
  }
  return s;
}

LinkTaxonomy::LinkTaxonomy(std::vector<NormalizationRule> rules,
                           std::map<std::string, LinkCategory> categories,
                           std::set<std::string> auto_created, std::set<std::string> inferred,
                           UnknownTypePolicy policy)
    : rules_(std::move(rules)),
      categories_(std::move(categories)),
      auto_created_(std::move(auto_created)),
      inferred_(std::move(inferred)),
      policy_(policy) {
  compiled_.reserve(rules_.size());
  for (const auto& rule : rules_) {
    try {
      compiled_.emplace_back(rule.pattern, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
      throw ValidationError("invalid taxonomy pattern '" + rule.pattern + "': " + e.what());
    }
    if (!categories_.count(rule.canonical)) {
      throw ValidationError("canonical type '" + rule.canonical + "' produced by a rule has no category");
    }
  }
  for (const auto& [canonical, category] : categories_) {
    auto [it, inserted] = canonical_by_folded_.emplace(strip_type_decorations(canonical), canonical);
    if (!inserted) {
      throw ValidationError("canonical types '" + it->second + "' and '" + canonical +
                            "' differ only by case");
    }
  }
  for (const auto* names : {&auto_created_, &inferred_}) {
    for (const auto& name : *names) {
      if (!categories_.count(name)) throw ValidationError("unknown canonical type '" + name + "'");
    }
  }
}

LinkTaxonomy LinkTaxonomy::from_json(std::string_view json_text, UnknownTypePolicy policy) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed taxonomy JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("taxonomy document must be an object");

  std::vector<NormalizationRule> rules;
  if (auto it = doc.find("rules"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("taxonomy 'rules' must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& r = (*it)[i];
      if (!r.is_object() || !r.contains("pattern") || !r.contains("canonical") ||
          !r["pattern"].is_string() || !r["canonical"].is_string()) {
        throw ParseError("rules[" + std::to_string(i) + "]: expected {\"pattern\": str, \"canonical\": str}");
      }
      rules.push_back({r["pattern"].get<std::string>(), r["canonical"].get<std::string>()});
    }
  }

  std::map<std::string, LinkCategory> categories;
  auto cats = doc.find("categories");
  if (cats == doc.end() || !cats->is_object()) throw ParseError("taxonomy needs a 'categories' object");
  for (const auto& [canonical, value] : cats->items()) {
    if (!value.is_string()) throw ParseError("category of '" + canonical + "' must be a string");
    auto category = parse_category(value.get<std::string>());
    if (!category) {
      throw ParseError("unknown category '" + value.get<std::string>() + "' for '" + canonical + "'");
    }
    categories.emplace(canonical, *category);
  }

  auto read_set = [&](const char* field) {
    std::set<std::string> out;
    if (auto it = doc.find(field); it != doc.end() && !it->is_null()) {
      if (!it->is_array()) throw ParseError(std::string("taxonomy '") + field + "' must be an array");
      for (const auto& v : *it) {
        if (!v.is_string()) throw ParseError(std::string("taxonomy '") + field + "' entries must be strings");
        out.insert(v.get<std::string>());
      }
    }
    return out;
  };

  return LinkTaxonomy(std::move(rules), std::move(categories), read_set("auto_created"),
                      read_set("inferred"), policy);
}

LinkTaxonomy LinkTaxonomy::load(const std::filesystem::path& path, UnknownTypePolicy policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open taxonomy file '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text, policy);
}

const LinkTaxonomy& LinkTaxonomy::bundled() {
  static const LinkTaxonomy taxonomy = from_json(detail::bundled_taxonomy_json());
  return taxonomy;
}

LinkTaxonomy LinkTaxonomy::with_policy(UnknownTypePolicy policy) const {
  LinkTaxonomy copy = *this;
  copy.policy_ = policy;
  return copy;
}

std::string LinkTaxonomy::normalize_type(std::string_view raw) const {
  const auto stripped = strip_type_decorations(raw);
  if (stripped.empty()) throw UnknownTypeError(std::string(raw));
  for (std::size_t i = 0; i < compiled_.size(); ++i) {
    if (std::regex_match(stripped, compiled_[i])) return rules_[i].canonical;
  }
  if (auto it = canonical_by_folded_.find(stripped); it != canonical_by_folded_.end()) return it->second;
  if (policy_ == UnknownTypePolicy::AssignRelation) return stripped;
  throw UnknownTypeError(std::string(raw));
}

LinkCategory LinkTaxonomy::categorize(std::string_view canonical) const {
  if (auto it = categories_.find(std::string(canonical)); it != categories_.end()) return it->second;
  if (policy_ == UnknownTypePolicy::AssignRelation) return LinkCategory::Relation;
  throw UnknownTypeError(std::string(canonical));
}

bool LinkTaxonomy::is_auto_created(std::string_view canonical) const {
  return auto_created_.count(std::string(canonical)) > 0;
}

bool LinkTaxonomy::is_inferred(std::string_view canonical) const {
  return inferred_.count(std::string(canonical)) > 0;
}

bool LinkTaxonomy::knows(std::string_view canonical) const {
  return categories_.count(std::string(canonical)) > 0;
}

std::string LinkTaxonomy::to_json() const {
  json doc;
  doc["rules"] = json::array();
  for (const auto& rule : rules_) doc["rules"].push_back({{"pattern", rule.pattern}, {"canonical", rule.canonical}});
  doc["categories"] = json::object();
  for (const auto& [canonical, category] : categories_) doc["categories"][canonical] = to_string(category);
  doc["auto_created"] = auto_created_;
  doc["inferred"] = inferred_;
  return doc.dump(2);
}

namespace {

template <typename Key, typename KeyOf>
std::map<Key, std::size_t> count_links(const Repository& repo, const LinkTaxonomy& taxonomy,
                                       std::size_t& uncategorized, KeyOf key_of) {
  std::map<Key, std::size_t> counts;
  for (const auto& link : repo.links) {
    try {
      const auto canonical = taxonomy.normalize_type(link.raw_type);
      const auto category = taxonomy.categorize(canonical);
      ++counts[key_of(canonical, category)];
    } catch (const UnknownTypeError&) {
      ++uncategorized;
    }
  }
  return counts;
}

}  // namespace

CategoryPrevalence category_prevalence(const Repository& repo, const LinkTaxonomy& taxonomy) {
  CategoryPrevalence result;
  auto counts = count_links<LinkCategory>(repo, taxonomy, result.uncategorized,
                                          [](const std::string&, LinkCategory c) { return c; });
  for (const auto& [category, n] : counts) result.categorized += n;
  if (result.categorized == 0) {
    throw UndefinedValueError("category prevalence is undefined without categorizable links");
  }
  for (auto c : kAllCategories) {
    result.shares[c] = static_cast<double>(counts[c]) / static_cast<double>(result.categorized);
  }
  return result;
}

TypePrevalence type_prevalence(const Repository& repo, const LinkTaxonomy& taxonomy) {
  TypePrevalence result;
  auto counts = count_links<std::string>(repo, taxonomy, result.uncategorized,
                                         [](const std::string& t, LinkCategory) { return t; });
  for (const auto& [type, n] : counts) result.categorized += n;
  if (result.categorized == 0) {
    throw UndefinedValueError("type prevalence is undefined without categorizable links");
  }
  for (const auto& [type, n] : counts) {
    result.shares[type] = static_cast<double>(n) / static_cast<double>(result.categorized);
  }
  return result;
}

}  // namespace linkgraph
