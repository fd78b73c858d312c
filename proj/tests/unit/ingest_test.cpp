#include <gtest/gtest.h>

#include <chrono>

#include "linkgraph/errors.hpp"
#include "linkgraph/ingest.hpp"
#include "test_support.hpp"

using namespace linkgraph;
using testing_support::keys;
using testing_support::repository;

namespace {

constexpr const char* kSixIssues = R"({
  "name": "mini",
  "issues": [
    {"key": "AB-1", "project": "AB", "title": "t", "description": "d", "issue_type": "Bug",
     "status": "Closed", "resolution": "Fixed", "created": "2020-01-02T03:04:05Z", "is_private": false},
    {"key": "AB-2", "title": "t", "status": "Open", "resolution": null, "created": "2020-01-02"},
    {"key": "AB-3", "status": "Done"},
    {"key": "AB-4", "status": "Done"},
    {"key": "CD-1", "status": "Resolved", "created": "2020-01-02T05:04:05+02:00"},
    {"key": "CD-2", "status": "Resolved", "is_private": true}
  ],
  "links": [
    {"source": "AB-1", "target": "AB-2", "type": "Duplicate", "direction": "outward"},
    {"source": "AB-2", "target": "AB-3", "type": "Relates", "direction": null},
    {"source": "AB-3", "target": "CD-1", "type": "Blocks"},
    {"source": "AB-4", "target": "CD-2", "type": "Relates"}
  ]
})";

}  // namespace

TEST(ProjectOfKey, TakesPrefixBeforeFinalNumber) {
  EXPECT_EQ(project_of_key("QTBUG-123"), "QTBUG");
  EXPECT_EQ(project_of_key("MY-PROJ-7"), "MY-PROJ");
  EXPECT_EQ(project_of_key("NOPE"), std::nullopt);
  EXPECT_EQ(project_of_key("X-"), std::nullopt);
  EXPECT_EQ(project_of_key("X-1a"), std::nullopt);
}

TEST(Timestamp, LenientFormats) {
  using namespace std::chrono;
  const auto midnight = sys_days{year{2020} / 1 / 2};
  EXPECT_EQ(parse_timestamp("2020-01-02"), midnight);
  EXPECT_EQ(parse_timestamp("2020-01-02T03:04:05Z"), midnight + hours{3} + minutes{4} + seconds{5});
  EXPECT_EQ(parse_timestamp("2020-01-02T05:04:05+02:00"), midnight + hours{3} + minutes{4} + seconds{5});
  EXPECT_EQ(parse_timestamp("2020-01-02T05:04:05.123+0200"), midnight + hours{3} + minutes{4} + seconds{5});
  EXPECT_EQ(parse_timestamp("2020-01-01T22:00:00-05:00"), midnight + hours{3});
  EXPECT_EQ(parse_timestamp("yesterday"), std::nullopt);
  EXPECT_EQ(parse_timestamp("2020-13-01"), std::nullopt);
  EXPECT_EQ(format_timestamp(midnight + hours{3}), "2020-01-02T03:00:00Z");
}

TEST(LoadRepository, CountsPassThrough) {
  const auto repo = parse_repository(kSixIssues);
  EXPECT_EQ(repo.name, "mini");
  EXPECT_EQ(repo.issues.size(), 6u);
  EXPECT_EQ(repo.links.size(), 4u);
  EXPECT_FALSE(repo.cleaned);
  EXPECT_EQ(repo.find("AB-2")->project, "AB");
  EXPECT_EQ(repo.find("AB-2")->resolution, std::nullopt);
  EXPECT_TRUE(repo.find("CD-2")->is_private);
  EXPECT_EQ(repo.links[0].directed_role, "outward");
}

TEST(LoadRepository, NameArgumentOverridesDocument) {
  EXPECT_EQ(parse_repository(kSixIssues, "other").name, "other");
}

TEST(LoadRepository, EmptyIssueArrayLoads) {
  const auto repo = parse_repository(R"({"name": "e", "issues": [], "links": []})");
  EXPECT_TRUE(repo.issues.empty());
  EXPECT_TRUE(repo.links.empty());
}

TEST(LoadRepository, MissingKeyNamesRecordIndex) {
  try {
    parse_repository(R"({"issues": [{"key": "A-1"}, {"title": "no key"}]})");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("issues[1]"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("key"), std::string::npos);
  }
}

TEST(LoadRepository, MalformedJsonReportsLine) {
  try {
    parse_repository("{\n\"issues\": [\n{\"key\": }\n]}");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(LoadRepository, DuplicateKeyIsIntegrityError) {
  EXPECT_THROW(parse_repository(R"({"issues": [{"key": "A-1"}, {"key": "A-1"}]})"), IntegrityError);
}

TEST(LoadRepository, ProjectKeyMismatchIsIntegrityError) {
  EXPECT_THROW(parse_repository(R"({"issues": [{"key": "A-1", "project": "B"}]})"), IntegrityError);
}

TEST(LoadRepository, MissingFileIsIoError) {
  EXPECT_THROW(load_repository("/nonexistent/repo.json"), IoError);
}

TEST(Clean, ConflictingTypesRemoveBothLinks) {
  auto repo = clean(repository({"A-1", "A-2"}, {{"A-1", "A-2", "Duplicate"}, {"A-1", "A-2", "Blocks"}}));
  EXPECT_TRUE(repo.links.empty());
  EXPECT_EQ(repo.cleaning_report.multi_typed_pair, 2u);
}

TEST(Clean, SelfLinkRemoved) {
  auto repo = clean(repository({"A-1"}, {{"A-1", "A-1", "Relates"}}));
  EXPECT_TRUE(repo.links.empty());
  EXPECT_EQ(repo.cleaning_report.self_link, 1u);
}

TEST(Clean, ReverseRepeatCollapses) {
  auto repo = clean(repository({"A-1", "A-2"}, {{"A-1", "A-2", "Relates"}, {"A-2", "A-1", "Relates"}}));
  ASSERT_EQ(repo.links.size(), 1u);
  EXPECT_EQ(repo.links[0].source, "A-1");
  EXPECT_EQ(repo.cleaning_report.duplicate_edge, 1u);
}

TEST(Clean, CaseVariantsOfOneTypeAreNotConflicting) {
  auto repo = clean(repository({"A-1", "A-2"}, {{"A-1", "A-2", "Relates"}, {"A-2", "A-1", " relates "}}));
  EXPECT_EQ(repo.links.size(), 1u);
  EXPECT_EQ(repo.cleaning_report.multi_typed_pair, 0u);
}

TEST(Clean, PrivateAndMissingEndpointsDropped) {
  auto repo = parse_repository(kSixIssues);
  repo.links.push_back({"AB-1", "ZZ-9", "Relates", std::nullopt});
  const auto cleaned = clean(repo);
  EXPECT_EQ(cleaned.links.size(), 3u);
  EXPECT_EQ(cleaned.cleaning_report.private_endpoint, 1u);
  EXPECT_EQ(cleaned.cleaning_report.missing_endpoint, 1u);
  EXPECT_EQ(cleaned.cleaning_report.raw_links, 5u);
  EXPECT_EQ(cleaned.issues.size(), 6u) << "private issues stay in the issue set";
}

TEST(Clean, ReportSumsToRemovedLinks) {
  auto raw = repository(keys(5), {{"P-1", "P-2", "Relates"},
                                  {"P-2", "P-1", "Relates"},
                                  {"P-3", "P-3", "Relates"},
                                  {"P-3", "P-4", "Blocks"},
                                  {"P-4", "P-3", "Duplicate"},
                                  {"P-4", "P-9", "Relates"},
                                  {"P-5", "P-1", "Epic"}});
  const auto cleaned = clean(raw);
  const auto& r = cleaned.cleaning_report;
  EXPECT_EQ(r.raw_links, raw.links.size());
  EXPECT_EQ(r.removed(), raw.links.size() - cleaned.links.size());
  EXPECT_EQ(cleaned.links.size(), 2u);
}

TEST(Clean, Idempotent) {
  const auto once = clean(parse_repository(kSixIssues));
  const auto twice = clean(once);
  EXPECT_EQ(once.cleaning_report, twice.cleaning_report);
  ASSERT_EQ(once.links.size(), twice.links.size());
  for (std::size_t i = 0; i < once.links.size(); ++i) {
    EXPECT_EQ(once.links[i].source, twice.links[i].source);
    EXPECT_EQ(once.links[i].target, twice.links[i].target);
  }
}

TEST(Clean, AllZeroIffNothingRemoved) {
  const auto kept = clean(repository(keys(3), {{"P-1", "P-2", "Relates"}, {"P-2", "P-3", "Blocks"}}));
  EXPECT_TRUE(kept.cleaning_report.all_zero());
  EXPECT_EQ(kept.links.size(), 2u);
  const auto dropped = clean(repository(keys(3), {{"P-1", "P-1", "Relates"}}));
  EXPECT_FALSE(dropped.cleaning_report.all_zero());
}

TEST(Coverage, OneEdgeOfTen) {
  const auto repo = clean(repository(keys(10), {{"P-1", "P-2", "Relates"}}));
  EXPECT_DOUBLE_EQ(coverage(repo), 0.2);
}

TEST(Coverage, FullAndZero) {
  const auto full = clean(repository(keys(3), {{"P-1", "P-2", "Relates"}, {"P-2", "P-3", "Relates"}}));
  EXPECT_DOUBLE_EQ(coverage(full), 1.0);
  const auto none = clean(repository(keys(3), {}));
  EXPECT_DOUBLE_EQ(coverage(none), 0.0);
}

TEST(Coverage, EmptyRepositoryIsUndefined) {
  EXPECT_THROW(coverage(clean(repository({}, {}))), UndefinedValueError);
  EXPECT_EQ(summarize(clean(repository({}, {}))).coverage, std::nullopt);
}

TEST(Summarize, CrossProjectShare) {
  const auto repo = clean(repository({"A-1", "A-2", "A-3", "B-1"},
                                     {{"A-1", "A-2", "Relates"}, {"A-2", "A-3", "Blocks"}, {"A-3", "B-1", "Relates"}}));
  const auto s = summarize(repo);
  EXPECT_EQ(s.issues, 4u);
  EXPECT_EQ(s.links, 3u);
  EXPECT_EQ(s.distinct_types, 2u);
  EXPECT_DOUBLE_EQ(s.cross_project_share, 1.0 / 3.0);
}

TEST(Summarize, SingleProjectHasNoCrossings) {
  const auto repo = clean(repository(keys(3), {{"P-1", "P-2", "Relates"}}));
  EXPECT_DOUBLE_EQ(summarize(repo).cross_project_share, 0.0);
}

TEST(Coverage, MindvilleShapedRepository) {
  // 2134 issues and 46 links touching 88 distinct issues.
  std::vector<testing_support::LinkSpec> links;
  for (int k = 0; k < 44; ++k) links.emplace_back("P-" + std::to_string(2 * k + 1), "P-" + std::to_string(2 * k + 2), "Relates");
  links.emplace_back("P-1", "P-3", "Blocks");
  links.emplace_back("P-5", "P-7", "Duplicate");
  const auto repo = clean(repository(keys(2134), links));
  const auto s = summarize(repo);
  EXPECT_EQ(s.links, 46u);
  EXPECT_NEAR(*s.coverage, 0.041, 5e-4);
}

TEST(Summarize, QtDraftCrossProjectShare) {
  std::vector<std::string> issue_keys = keys(2 * 13783, "A");
  for (const auto& k : keys(1393, "B")) issue_keys.push_back(k);
  std::vector<testing_support::LinkSpec> links;
  for (int k = 0; k < 13783; ++k) links.emplace_back("A-" + std::to_string(2 * k + 1), "A-" + std::to_string(2 * k + 2), "Relates");
  for (int k = 1; k <= 1393; ++k) links.emplace_back("A-" + std::to_string(k), "B-" + std::to_string(k), "Relates");
  const auto s = summarize(clean(repository(issue_keys, links)));
  EXPECT_EQ(s.links, 13783u + 1393u);
  EXPECT_NEAR(s.cross_project_share, 0.092, 5e-4);
}
