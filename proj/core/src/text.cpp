#include "linkgraph/text.hpp"

#include <array>
#include <sstream>

#include <nlohmann/json.hpp>

#include "linkgraph/errors.hpp"

namespace linkgraph {

namespace detail {
std::string_view bundled_stopwords();
}

namespace {

using nlohmann::json;

/// Decodes one UTF-8 code point starting at text[i]; malformed bytes decode as
/// themselves so tokenization never fails.
char32_t decode(std::string_view text, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  auto continuation = [&](std::size_t k) {
    return i + k < text.size() && (static_cast<unsigned char>(text[i + k]) & 0xC0) == 0x80;
  };
  auto byte = [&](std::size_t k) { return static_cast<char32_t>(static_cast<unsigned char>(text[i + k]) & 0x3F); };
  if (b0 < 0x80) {
    i += 1;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0 && continuation(1)) {
    const char32_t cp = (static_cast<char32_t>(b0 & 0x1F) << 6) | byte(1);
    i += 2;
    return cp;
  }
  if ((b0 & 0xF0) == 0xE0 && continuation(1) && continuation(2)) {
    const char32_t cp = (static_cast<char32_t>(b0 & 0x0F) << 12) | (byte(1) << 6) | byte(2);
    i += 3;
    return cp;
  }
  if ((b0 & 0xF8) == 0xF0 && continuation(1) && continuation(2) && continuation(3)) {
    const char32_t cp =
        (static_cast<char32_t>(b0 & 0x07) << 18) | (byte(1) << 12) | (byte(2) << 6) | byte(3);
    i += 4;
    return cp;
  }
  i += 1;
  return b0;
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_separator(char32_t cp) {
  if (cp < 0x80) {
    return !((cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z'));
  }
  if (cp <= 0xBF) return cp != 0xAA && cp != 0xB5 && cp != 0xBA;  // Latin-1 symbols, NBSP
  if (cp == 0xD7 || cp == 0xF7) return true;                      // multiplication, division
  if (cp >= 0x2000 && cp <= 0x206F) return true;                  // general punctuation, spaces
  if (cp >= 0x3000 && cp <= 0x303F) return true;                  // CJK symbols and punctuation
  if (cp == 0x1680 || cp == 0xFEFF) return true;
  return false;
}

char32_t lower_cp(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  return cp;
}

std::size_t codepoint_length(std::string_view token) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < token.size();) {
    decode(token, i);
    ++n;
  }
  return n;
}

}  // namespace

const std::set<std::string>& bundled_stopwords() {
  static const std::set<std::string> words = [] {
    std::set<std::string> out;
    std::istringstream in{std::string(detail::bundled_stopwords())};
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line.front() == '#') continue;
      out.insert(fold_case(line));
    }
    return out;
  }();
  return words;
}

TokenizerConfig TokenizerConfig::defaults() {
  TokenizerConfig config;
  config.stopwords = bundled_stopwords();
  return config;
}

TokenizerConfig TokenizerConfig::from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed tokenizer config: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("tokenizer config must be an object");

  TokenizerConfig config = defaults();
  if (auto it = doc.find("lowercase"); it != doc.end()) {
    if (!it->is_boolean()) throw ParseError("tokenizer 'lowercase' must be a boolean");
    config.lowercase = it->get<bool>();
  }
  if (auto it = doc.find("stopwords"); it != doc.end()) {
    if (it->is_string() && it->get<std::string>() == "default") {
      config.stopwords = bundled_stopwords();
    } else if (it->is_null() || (it->is_string() && it->get<std::string>() == "none")) {
      config.stopwords.clear();
    } else if (it->is_array()) {
      config.stopwords.clear();
      for (const auto& w : *it) {
        if (!w.is_string()) throw ParseError("tokenizer 'stopwords' entries must be strings");
        config.stopwords.insert(fold_case(w.get<std::string>()));
      }
    } else {
      throw ParseError("tokenizer 'stopwords' must be \"default\", \"none\" or an array");
    }
  }
  if (auto it = doc.find("stemmer"); it != doc.end()) {
    const auto name = it->is_string() ? it->get<std::string>() : std::string{};
    if (name == "none") {
      config.stemmer = Stemmer::None;
    } else if (name == "suffix-rules") {
      config.stemmer = Stemmer::SuffixRules;
    } else {
      throw ParseError("tokenizer 'stemmer' must be \"none\" or \"suffix-rules\"");
    }
  }
  return config;
}

std::string TokenizerConfig::to_json() const {
  json doc;
  doc["lowercase"] = lowercase;
  if (stopwords == bundled_stopwords()) {
    doc["stopwords"] = "default";
  } else {
    doc["stopwords"] = stopwords;
  }
  doc["stemmer"] = stemmer == Stemmer::None ? "none" : "suffix-rules";
  return doc.dump();
}

std::string fold_case(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) encode(lower_cp(decode(text, i)), out);
  return out;
}

std::string strip_suffix(std::string_view token) {
  static constexpr std::array<std::string_view, 4> kSuffixes = {"ing", "ed", "es", "s"};
  const auto length = codepoint_length(token);
  for (auto suffix : kSuffixes) {
    if (token.size() >= suffix.size() && token.substr(token.size() - suffix.size()) == suffix &&
        length >= suffix.size() + 3) {
      return std::string(token.substr(0, token.size() - suffix.size()));
    }
  }
  return std::string(token);
}

std::vector<std::string> preprocess(std::string_view text, const TokenizerConfig& config) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    const auto folded = fold_case(current);
    if (!config.stopwords.count(folded)) {
      std::string token = config.lowercase ? folded : current;
      if (config.stemmer == Stemmer::SuffixRules) token = strip_suffix(token);
      tokens.push_back(std::move(token));
    }
    current.clear();
  };
  for (std::size_t i = 0; i < text.size();) {
    const std::size_t start = i;
    const char32_t cp = decode(text, i);
    if (is_separator(cp)) {
      flush();
    } else {
      current.append(text.substr(start, i - start));
    }
  }
  flush();
  return tokens;
}

}  // namespace linkgraph
