#include "linkgraph/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>
#include <set>
#include <cstdio>
#include <utility>

#include <nlohmann/json.hpp>

#include "linkgraph/errors.hpp"

namespace linkgraph {

namespace {

using nlohmann::json;

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

std::string optional_string(const json& record, const char* field, const std::string& where) {
  auto it = record.find(field);
  if (it == record.end() || it->is_null()) return {};
  if (!it->is_string()) throw ParseError(where + ": field '" + field + "' must be a string");
  return it->get<std::string>();
}

std::string required_string(const json& record, const char* field, const std::string& where) {
  auto it = record.find(field);
  if (it == record.end() || it->is_null()) {
    throw ParseError(where + ": missing required field '" + field + "'");
  }
  if (!it->is_string()) throw ParseError(where + ": field '" + field + "' must be a string");
  auto value = it->get<std::string>();
  if (value.empty()) throw ParseError(where + ": field '" + field + "' is empty");
  return value;
}

std::optional<std::string> nullable_string(const json& record, const char* field,
                                           const std::string& where) {
  auto it = record.find(field);
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ParseError(where + ": field '" + field + "' must be a string or null");
  return it->get<std::string>();
}

IssueRecord parse_issue(const json& record, std::size_t index) {
  const std::string where = "issues[" + std::to_string(index) + "]";
  if (!record.is_object()) throw ParseError(where + ": expected an object");

  IssueRecord issue;
  issue.key = required_string(record, "key", where);
  issue.title = optional_string(record, "title", where);
  issue.description = optional_string(record, "description", where);
  issue.issue_type = optional_string(record, "issue_type", where);
  issue.status = optional_string(record, "status", where);
  issue.resolution = nullable_string(record, "resolution", where);

  const auto derived = project_of_key(issue.key);
  issue.project = optional_string(record, "project", where);
  if (issue.project.empty()) {
    if (!derived) throw ParseError(where + ": no project given and none derivable from key '" + issue.key + "'");
    issue.project = *derived;
  } else if (derived && *derived != issue.project) {
    throw IntegrityError(where + ": project '" + issue.project + "' does not match key '" +
                         issue.key + "'");
  }

  if (auto created = nullable_string(record, "created", where)) {
    auto ts = parse_timestamp(*created);
    if (!ts) throw ParseError(where + ": unparseable timestamp '" + *created + "'");
    issue.created = *ts;
  }

  if (auto it = record.find("is_private"); it != record.end() && !it->is_null()) {
    if (!it->is_boolean()) throw ParseError(where + ": field 'is_private' must be a boolean");
    issue.is_private = it->get<bool>();
  }
  return issue;
}

RawLink parse_link(const json& record, std::size_t index) {
  const std::string where = "links[" + std::to_string(index) + "]";
  if (!record.is_object()) throw ParseError(where + ": expected an object");
  RawLink link;
  link.source = required_string(record, "source", where);
  link.target = required_string(record, "target", where);
  link.raw_type = required_string(record, "type", where);
  link.directed_role = nullable_string(record, "direction", where);
  return link;
}

std::size_t read_count(const json& object, const char* field) {
  auto it = object.find(field);
  if (it == object.end()) return 0;
  if (!it->is_number_unsigned()) {
    throw ParseError(std::string("cleaning_report: field '") + field + "' must be a non-negative integer");
  }
  return it->get<std::size_t>();
}

using PairKey = std::pair<std::string, std::string>;

PairKey unordered_key(const std::string& a, const std::string& b) {
  return a < b ? PairKey{a, b} : PairKey{b, a};
}

bool parse_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

const IssueRecord* Repository::find(std::string_view key) const {
  auto it = issues.find(std::string(key));
  return it == issues.end() ? nullptr : &it->second;
}

std::optional<std::string> project_of_key(std::string_view key) {
  const auto dash = key.rfind('-');
  if (dash == std::string_view::npos || dash == 0 || dash + 1 == key.size()) return std::nullopt;
  const auto digits = key.substr(dash + 1);
  if (!std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
    return std::nullopt;
  }
  return std::string(key.substr(0, dash));
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;

  int y = 0, mo = 0, d = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) ||
      !parse_int(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;

  sys_seconds result = sys_days{ymd};
  auto rest = text.substr(10);
  if (rest.empty()) return result;
  if (rest.front() != 'T' && rest.front() != 't' && rest.front() != ' ') return std::nullopt;
  rest.remove_prefix(1);

  int h = 0, mi = 0, s = 0;
  if (rest.size() < 5 || rest[2] != ':' || !parse_int(rest.substr(0, 2), h) ||
      !parse_int(rest.substr(3, 2), mi)) {
    return std::nullopt;
  }
  rest.remove_prefix(5);
  if (!rest.empty() && rest.front() == ':') {
    if (rest.size() < 3 || !parse_int(rest.substr(1, 2), s)) return std::nullopt;
    rest.remove_prefix(3);
  }
  if (h > 23 || mi > 59 || s > 60) return std::nullopt;
  if (!rest.empty() && (rest.front() == '.' || rest.front() == ',')) {
    rest.remove_prefix(1);
    std::size_t n = 0;
    while (n < rest.size() && std::isdigit(static_cast<unsigned char>(rest[n]))) ++n;
    if (n == 0) return std::nullopt;
    rest.remove_prefix(n);
  }
  result += hours{h} + minutes{mi} + seconds{s};

  if (rest.empty() || rest == "Z" || rest == "z") return result;
  if (rest.front() != '+' && rest.front() != '-') return std::nullopt;
  const int sign = rest.front() == '+' ? 1 : -1;
  rest.remove_prefix(1);
  int oh = 0, om = 0;
  if (rest.size() == 5 && rest[2] == ':') {
    if (!parse_int(rest.substr(0, 2), oh) || !parse_int(rest.substr(3, 2), om)) return std::nullopt;
  } else if (rest.size() == 4) {
    if (!parse_int(rest.substr(0, 2), oh) || !parse_int(rest.substr(2, 2), om)) return std::nullopt;
  } else if (rest.size() == 2) {
    if (!parse_int(rest, oh)) return std::nullopt;
  } else {
    return std::nullopt;
  }
  // local time = UTC + offset
  result -= sign * (hours{oh} + minutes{om});
  return result;
}

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  const auto day_point = floor<days>(ts);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{ts - day_point};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

Repository parse_repository(std::string_view json_text, std::string name) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON at line " + std::to_string(line_of_offset(json_text, e.byte)) +
                     ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("repository document must be a JSON object");

  Repository repo;
  repo.name = std::move(name);
  if (repo.name.empty()) {
    if (auto it = doc.find("name"); it != doc.end() && it->is_string()) repo.name = it->get<std::string>();
  }

  if (auto it = doc.find("issues"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw ParseError("'issues' must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      auto issue = parse_issue((*it)[i], i);
      const auto key = issue.key;
      if (!repo.issues.emplace(key, std::move(issue)).second) {
        throw IntegrityError("issues[" + std::to_string(i) + "]: duplicate issue key '" + key + "'");
      }
    }
  }
  if (auto it = doc.find("links"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw ParseError("'links' must be an array");
    repo.links.reserve(it->size());
    for (std::size_t i = 0; i < it->size(); ++i) repo.links.push_back(parse_link((*it)[i], i));
  }

  // Files written by `ingest --out` carry their cleaning report.
  if (auto it = doc.find("cleaning_report"); it != doc.end() && it->is_object()) {
    const auto& r = *it;
    repo.cleaning_report.raw_links = read_count(r, "raw_links");
    repo.cleaning_report.private_endpoint = read_count(r, "private_endpoint");
    repo.cleaning_report.missing_endpoint = read_count(r, "missing_endpoint");
    repo.cleaning_report.self_link = read_count(r, "self_link");
    repo.cleaning_report.multi_typed_pair = read_count(r, "multi_typed_pair");
    repo.cleaning_report.duplicate_edge = read_count(r, "duplicate_edge");
    if (repo.cleaning_report.raw_links != repo.links.size() + repo.cleaning_report.removed()) {
      throw IntegrityError("cleaning_report counts do not add up to the retained links");
    }
    repo.cleaned = true;
  }
  return repo;
}

Repository load_repository(const std::filesystem::path& path, std::string name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open repository export '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (name.empty()) {
    auto repo = parse_repository(text);
    if (repo.name.empty()) repo.name = path.stem().string();
    return repo;
  }
  return parse_repository(text, std::move(name));
}

std::string fold_type_name(std::string_view raw) {
  std::size_t begin = 0, end = raw.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(raw[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(raw[end - 1]))) --end;
  std::string out(raw.substr(begin, end - begin));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

Repository clean(Repository repo) {
  CleaningReport& report = repo.cleaning_report;
  if (!repo.cleaned) {
    report = CleaningReport{};
    report.raw_links = repo.links.size();
  }

  std::vector<RawLink> endpoint_ok;
  endpoint_ok.reserve(repo.links.size());
  for (auto& link : repo.links) {
    const auto* source = repo.find(link.source);
    const auto* target = repo.find(link.target);
    if (!source || !target) {
      ++report.missing_endpoint;
    } else if (source->is_private || target->is_private) {
      ++report.private_endpoint;
    } else if (link.source == link.target) {
      ++report.self_link;
    } else {
      endpoint_ok.push_back(std::move(link));
    }
  }

  struct PairInfo {
    std::set<std::string> types;
    std::size_t count = 0;
  };
  std::map<PairKey, PairInfo> pairs;
  for (const auto& link : endpoint_ok) {
    auto& info = pairs[unordered_key(link.source, link.target)];
    info.types.insert(fold_type_name(link.raw_type));
    ++info.count;
  }

  std::vector<RawLink> retained;
  retained.reserve(pairs.size());
  std::set<PairKey> emitted;
  for (auto& link : endpoint_ok) {
    const auto key = unordered_key(link.source, link.target);
    const auto& info = pairs.at(key);
    if (info.types.size() > 1) {
      ++report.multi_typed_pair;
    } else if (!emitted.insert(key).second) {
      ++report.duplicate_edge;
    } else {
      retained.push_back(std::move(link));
    }
  }

  repo.links = std::move(retained);
  repo.cleaned = true;
  return repo;
}

double coverage(const Repository& repo) {
  if (repo.issues.empty()) {
    throw UndefinedValueError("coverage is undefined for a repository without issues");
  }
  std::set<std::string_view> linked;
  for (const auto& link : repo.links) {
    if (repo.find(link.source)) linked.insert(link.source);
    if (repo.find(link.target)) linked.insert(link.target);
  }
  return static_cast<double>(linked.size()) / static_cast<double>(repo.issues.size());
}

RepositorySummary summarize(const Repository& repo) {
  RepositorySummary summary;
  summary.name = repo.name;
  summary.issues = repo.issues.size();
  summary.links = repo.links.size();

  std::set<std::string> types;
  std::size_t cross = 0;
  for (const auto& link : repo.links) {
    types.insert(fold_type_name(link.raw_type));
    const auto* a = repo.find(link.source);
    const auto* b = repo.find(link.target);
    if (a && b && a->project != b->project) ++cross;
  }
  summary.distinct_types = types.size();
  if (!repo.issues.empty()) summary.coverage = coverage(repo);
  summary.cross_project_share =
      repo.links.empty() ? 0.0 : static_cast<double>(cross) / static_cast<double>(repo.links.size());
  return summary;
}

}  // namespace linkgraph
