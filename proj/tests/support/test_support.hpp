#pragma once

#include <filesystem>
#include <string>
#include <tuple>
#include <vector>

#include <unistd.h>

#include "linkgraph/ingest.hpp"

namespace testing_support {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(LINKGRAPH_FIXTURE_DIR) / name;
}

/// A closed, public issue with a generated title and description.
inline linkgraph::IssueRecord issue(const std::string& key, std::string text = {}, std::string status = "Closed",
                                    bool is_private = false) {
  linkgraph::IssueRecord r;
  r.key = key;
  r.project = linkgraph::project_of_key(key).value_or("P");
  r.title = text.empty() ? key : text;
  r.description = text;
  r.issue_type = "Bug";
  r.status = std::move(status);
  r.resolution = "Fixed";
  r.is_private = is_private;
  return r;
}

using LinkSpec = std::tuple<std::string, std::string, std::string>;  // source, target, type

/// Issue keys P-1 .. P-n.
inline std::vector<std::string> keys(std::size_t n, const std::string& project = "P") {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(project + "-" + std::to_string(i));
  return out;
}

/// Builds an uncleaned repository from issue keys and (source, target, type).
inline linkgraph::Repository repository(const std::vector<std::string>& keys, std::vector<LinkSpec> links,
                                        std::string name = "test") {
  linkgraph::Repository repo;
  repo.name = std::move(name);
  for (const auto& k : keys) repo.issues.emplace(k, issue(k));
  for (auto& [s, t, type] : links) repo.links.push_back({s, t, type, std::nullopt});
  return repo;
}

/// Temporary directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("linkgraph_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support
