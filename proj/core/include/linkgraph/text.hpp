#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace linkgraph {

enum class Stemmer { None, SuffixRules };

struct TokenizerConfig {
  bool lowercase = true;
  std::set<std::string> stopwords;  // case-folded
  Stemmer stemmer = Stemmer::SuffixRules;

  /// lowercase, the bundled English stopword list and the suffix stemmer.
  static TokenizerConfig defaults();

  /// {"lowercase": bool, "stopwords": "default" | "none" | [str...], "stemmer": "none" | "suffix-rules"}
  static TokenizerConfig from_json(std::string_view json_text);
  std::string to_json() const;

  friend bool operator==(const TokenizerConfig&, const TokenizerConfig&) = default;
};

/// The stopword list compiled in from core/data/stopwords_en.txt.
const std::set<std::string>& bundled_stopwords();

/// Lowercases ASCII and Latin-1 letters in a UTF-8 string.
std::string fold_case(std::string_view text);

/// Strips the longest of {ing, ed, es, s} that leaves at least three
/// characters; returns the token unchanged when none applies.
std::string strip_suffix(std::string_view token);

/// Splits on whitespace and punctuation (ASCII, Latin-1 and the Unicode
/// general-punctuation block), then case-folds, removes stopwords and stems
/// per the config.
std::vector<std::string> preprocess(std::string_view text, const TokenizerConfig& config);

}  // namespace linkgraph
