#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace linkgraph {

using Timestamp = std::chrono::sys_seconds;

struct IssueRecord {
  std::string key;
  std::string project;
  std::string title;
  std::string description;
  std::string issue_type;
  std::string status;
  std::optional<std::string> resolution;
  Timestamp created{};
  bool is_private = false;
};

/// A typed edge as found in the export. Direction is kept for round-tripping
/// but every consumer treats links as undirected.
struct RawLink {
  std::string source;
  std::string target;
  std::string raw_type;
  std::optional<std::string> directed_role;
};

struct CleaningReport {
  std::size_t raw_links = 0;
  std::size_t private_endpoint = 0;
  std::size_t missing_endpoint = 0;
  std::size_t self_link = 0;
  std::size_t multi_typed_pair = 0;
  std::size_t duplicate_edge = 0;

  std::size_t removed() const {
    return private_endpoint + missing_endpoint + self_link + multi_typed_pair + duplicate_edge;
  }
  bool all_zero() const { return removed() == 0; }

  friend bool operator==(const CleaningReport&, const CleaningReport&) = default;
};

struct Repository {
  std::string name;
  std::map<std::string, IssueRecord> issues;
  std::vector<RawLink> links;
  CleaningReport cleaning_report;
  bool cleaned = false;

  const IssueRecord* find(std::string_view key) const;
};

struct RepositorySummary {
  std::string name;
  std::size_t issues = 0;
  std::size_t links = 0;
  std::size_t distinct_types = 0;
  std::optional<double> coverage;  // undefined for an empty repository
  double cross_project_share = 0.0;
};

/// Project key implied by an issue key ("QTBUG-123" -> "QTBUG"), or nullopt
/// when the key has no trailing "-<digits>" segment.
std::optional<std::string> project_of_key(std::string_view key);

/// Lenient ISO-8601 parsing: date-only values map to midnight UTC; an optional
/// fractional second and a Z / +HH:MM / +HHMM offset are accepted.
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

/// Parses the JSON export. No cleaning is applied.
Repository load_repository(const std::filesystem::path& path, std::string name = {});
Repository parse_repository(std::string_view json_text, std::string name = {});

/// Drops links touching private or unknown issues, self-links, every link of
/// an unordered pair carrying more than one type, and collapses repeated
/// edges. Counts accumulate across calls, so clean is idempotent.
Repository clean(Repository repo);

/// Share of issues incident to at least one retained link.
double coverage(const Repository& repo);

RepositorySummary summarize(const Repository& repo);

/// Case-folded, whitespace-trimmed type name used to compare raw types.
std::string fold_type_name(std::string_view raw);

}  // namespace linkgraph
