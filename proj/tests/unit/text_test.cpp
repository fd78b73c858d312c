#include <gtest/gtest.h>

#include <cmath>

#include "linkgraph/errors.hpp"
#include "linkgraph/model.hpp"
#include "linkgraph/text.hpp"
#include "test_support.hpp"

using namespace linkgraph;

namespace {

using Tokens = std::vector<std::string>;

TokenizerConfig bare() {
  TokenizerConfig c;
  c.stopwords = {};
  c.stemmer = Stemmer::None;
  return c;
}

double weight_of(const TfIdfIndex& index, const std::string& key, const std::string& token) {
  const auto id = index.term_id(token);
  for (const auto& e : index.vector(key))
    if (static_cast<std::int64_t>(e.term) == id) return e.weight;
  return 0.0;
}

}  // namespace

TEST(Preprocess, StopwordsAndSuffixRules) {
  TokenizerConfig c;
  c.stopwords = {"the"};
  c.stemmer = Stemmer::SuffixRules;
  EXPECT_EQ(preprocess("The crash CRASHES", c), (Tokens{"crash", "crash"}));
}

TEST(Preprocess, EmptyInput) { EXPECT_TRUE(preprocess("", TokenizerConfig::defaults()).empty()); }

TEST(Preprocess, LowercaseMergesCaseVariants) {
  EXPECT_EQ(preprocess("Windows windows", bare()), (Tokens{"windows", "windows"}));
  auto keep_case = bare();
  keep_case.lowercase = false;
  EXPECT_EQ(preprocess("Windows windows", keep_case), (Tokens{"Windows", "windows"}));
}

TEST(Preprocess, SplitsOnPunctuation) {
  EXPECT_EQ(preprocess("null-pointer, in foo.bar()!", bare()), (Tokens{"null", "pointer", "in", "foo", "bar"}));
  EXPECT_EQ(preprocess("a\xE2\x80\x94" "b", bare()), (Tokens{"a", "b"}));  // em dash separator
}

TEST(Preprocess, DefaultsDropCommonStopwords) {
  const auto tokens = preprocess("the build is failing on the server", TokenizerConfig::defaults());
  for (const auto& t : tokens) EXPECT_FALSE(bundled_stopwords().count(t)) << t;
  EXPECT_NE(std::find(tokens.begin(), tokens.end(), "fail"), tokens.end());
}

TEST(StripSuffix, LongestSuffixKeepingThreeCharacters) {
  EXPECT_EQ(strip_suffix("crashes"), "crash");
  EXPECT_EQ(strip_suffix("failing"), "fail");
  EXPECT_EQ(strip_suffix("failed"), "fail");
  EXPECT_EQ(strip_suffix("bugs"), "bug");
  EXPECT_EQ(strip_suffix("is"), "is");
  EXPECT_EQ(strip_suffix("ring"), "ring");
}

TEST(FoldCase, AsciiAndLatin1) {
  EXPECT_EQ(fold_case("ABC"), "abc");
  EXPECT_EQ(fold_case("\xC3\x84rger"), "\xC3\xA4rger");
}

TEST(TokenizerConfig, JsonRoundTrip) {
  const auto c = TokenizerConfig::defaults();
  EXPECT_EQ(TokenizerConfig::from_json(c.to_json()), c);
  const auto custom = TokenizerConfig::from_json(R"({"lowercase": false, "stopwords": ["x"], "stemmer": "none"})");
  EXPECT_FALSE(custom.lowercase);
  EXPECT_EQ(custom.stopwords, std::set<std::string>{"x"});
  EXPECT_EQ(custom.stemmer, Stemmer::None);
  EXPECT_THROW(TokenizerConfig::from_json(R"({"stemmer": "porter"})"), Error);
}

TEST(FitTfidf, IdfByHand) {
  const auto index = fit_tfidf({{"d1", "a b"}, {"d2", "a"}}, bare());
  EXPECT_DOUBLE_EQ(index.idf("a"), 1.0);
  EXPECT_DOUBLE_EQ(index.idf("b"), std::log(3.0 / 2.0) + 1.0);
  // d1 = (1, idf_b) normalized.
  const double idf_b = std::log(1.5) + 1.0;
  const double norm = std::sqrt(1.0 + idf_b * idf_b);
  EXPECT_NEAR(weight_of(index, "d1", "a"), 1.0 / norm, 1e-12);
  EXPECT_NEAR(weight_of(index, "d1", "b"), idf_b / norm, 1e-12);
  EXPECT_NEAR(weight_of(index, "d2", "a"), 1.0, 1e-12);
}

TEST(FitTfidf, SingleDocumentHasUnitIdf) {
  const auto index = fit_tfidf({{"d", "x y z"}}, bare());
  for (const char* t : {"x", "y", "z"}) EXPECT_DOUBLE_EQ(index.idf(t), 1.0);
}

TEST(FitTfidf, EmptyCorpusAndEmptyVocabulary) {
  EXPECT_THROW(fit_tfidf({}, bare()), PreconditionError);
  EXPECT_THROW(fit_tfidf({{"d1", ""}, {"d2", "  ,. "}}, bare()), EmptyVocabularyError);
}

TEST(FitTfidf, CorpusHashTracksContent) {
  const Corpus a = {{"d1", "a b"}, {"d2", "a"}};
  Corpus b = a;
  b["d2"] = "b";
  EXPECT_EQ(fit_tfidf(a, bare()).corpus_hash(), corpus_hash(a));
  EXPECT_NE(corpus_hash(a), corpus_hash(b));
}

TEST(IssueCorpus, SkipsPrivateIssues) {
  auto repo = testing_support::repository(testing_support::keys(3), {});
  repo.issues.at("P-2").is_private = true;
  const auto corpus = issue_corpus(repo);
  EXPECT_EQ(corpus.size(), 2u);
  EXPECT_FALSE(corpus.count("P-2"));
}

TEST(PairSimilarity, IdenticalAndDisjoint) {
  const auto index = fit_tfidf({{"a", "disk full error"}, {"b", "disk full error"}, {"c", "login page"}}, bare());
  EXPECT_NEAR(pair_similarity(index, "a", "b"), 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(pair_similarity(index, "a", "c"), 0.0);
  EXPECT_THROW(pair_similarity(index, "a", "zz"), UnknownKeyError);
}

TEST(PairSimilarity, HandComputedCosine) {
  // d1 "x y", d2 "x z", d3 "z": df x=2, y=1, z=2.
  const auto index = fit_tfidf({{"d1", "x y"}, {"d2", "x z"}, {"d3", "z"}}, bare());
  const double ix = std::log(4.0 / 3.0) + 1.0;
  const double iy = std::log(4.0 / 2.0) + 1.0;
  const double iz = ix;
  const double expected = (ix * ix) / (std::sqrt(ix * ix + iy * iy) * std::sqrt(ix * ix + iz * iz));
  EXPECT_NEAR(pair_similarity(index, "d1", "d2"), expected, 1e-12);
  EXPECT_NEAR(pair_similarity(index, "d2", "d1"), expected, 1e-12);
}

TEST(PairSimilarity, ZeroVectorGivesZero) {
  const auto index = fit_tfidf({{"a", "word"}, {"b", ""}}, bare());
  EXPECT_DOUBLE_EQ(pair_similarity(index, "a", "b"), 0.0);
}
