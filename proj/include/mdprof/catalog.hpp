#pragma once

// On-disk catalog: one Turtle document per source plus a JSON index. Writers
// take an exclusive lock on <root>/.lock, and every file is replaced by
// write-to-temp-then-rename so readers never see partial content.

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cctype>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdprof/error.hpp"
#include "mdprof/metagraph.hpp"
#include "mdprof/profiler.hpp"
#include "mdprof/rdf_model.hpp"
#include "mdprof/rdf_parse.hpp"
#include "mdprof/rdf_write.hpp"
#include "mdprof/shape.hpp"

namespace mdprof {

// ---------------------------------------------------------------------------
// Queries

enum class CompareOp { eq, ne, lt, le, gt, ge };

inline bool compare(double lhs, CompareOp op, double rhs) {
  switch (op) {
    case CompareOp::eq: return lhs == rhs;
    case CompareOp::ne: return lhs != rhs;
    case CompareOp::lt: return lhs < rhs;
    case CompareOp::le: return lhs <= rhs;
    case CompareOp::gt: return lhs > rhs;
    case CompareOp::ge: return lhs >= rhs;
  }
  return false;
}

inline std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::eq: return "=";
    case CompareOp::ne: return "!=";
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
  }
  return "?";
}

/// One conjunct of a discovery query.
///   mapTo / level / indicator   = or != an IRI
///   items / domains             numeric comparison
///   category                    = or != a category name
///   <stat>(<attribute>)         numeric comparison on a profile statistic,
///                               stat in max min mean median distinct null words others
struct Predicate {
  enum class Kind { map_to, level, indicator, items, domains, category, stat };
  Kind kind = Kind::items;
  CompareOp op = CompareOp::eq;
  std::string text;  // IRI or category name
  double number = 0;
  std::string stat;
  std::string attribute;

  bool operator==(const Predicate&) const = default;
};

using Query = std::vector<Predicate>;

inline const std::set<std::string, std::less<>>& stat_names() {
  static const std::set<std::string, std::less<>> names{
      "max", "min", "mean", "median", "distinct", "null", "words", "others"};
  return names;
}

/// Value of a profile statistic, if the profile variant carries it.
inline std::optional<double> profile_stat(const Profile& p, std::string_view stat) {
  return std::visit(
      [&](const auto& v) -> std::optional<double> {
        using P = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<P, DProfile>) {
          if (stat == "others") return static_cast<double>(v.others);
        } else if constexpr (std::is_same_v<P, NumericProfile>) {
          if (stat == "max") return v.max;
          if (stat == "min") return v.min;
          if (stat == "mean") return v.mean;
          if (stat == "median") return v.median;
          if (stat == "distinct") return static_cast<double>(v.distinct);
          if (stat == "null") return static_cast<double>(v.null);
        } else if constexpr (std::is_same_v<P, DatetimeProfile>) {
          if (stat == "distinct") return static_cast<double>(v.distinct);
          if (stat == "null") return static_cast<double>(v.null);
        } else if constexpr (std::is_same_v<P, TextualProfile>) {
          if (stat == "words") return static_cast<double>(v.words_total);
          if (stat == "null") return static_cast<double>(v.null);
        } else {
          if (stat == "null") return static_cast<double>(v.null);
        }
        return std::nullopt;
      },
      p);
}

/// Parses `key op value`. Prefixed IRIs resolve against `prefixes`.
inline Predicate parse_predicate(std::string_view text, const rdf::PrefixMap& prefixes) {
  auto malformed = [&](const std::string& why) {
    return Error(ErrorCode::MalformedQuery, "'" + std::string(text) + "': " + why);
  };
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  auto pos = text.find_first_of("=!<>");
  if (pos == std::string_view::npos) throw malformed("missing operator");
  std::string_view key = trim(text.substr(0, pos));
  std::string_view rest = text.substr(pos);
  Predicate p;
  static constexpr std::pair<std::string_view, CompareOp> ops[] = {
      {"==", CompareOp::eq}, {"!=", CompareOp::ne}, {">=", CompareOp::ge},
      {"<=", CompareOp::le}, {"=", CompareOp::eq},  {">", CompareOp::gt},
      {"<", CompareOp::lt}};
  bool matched = false;
  for (const auto& [tok, op] : ops)
    if (rest.substr(0, tok.size()) == tok) {
      p.op = op;
      rest.remove_prefix(tok.size());
      matched = true;
      break;
    }
  if (!matched) throw malformed("bad operator");
  std::string_view value = trim(rest);
  if (key.empty() || value.empty()) throw malformed("empty key or value");

  auto resolve_iri = [&](std::string_view v) -> std::string {
    if (v.front() == '<' && v.back() == '>') return std::string(v.substr(1, v.size() - 2));
    if (v.find("://") != std::string_view::npos) return std::string(v);
    auto colon = v.find(':');
    if (colon == std::string_view::npos) throw malformed("expected an IRI or prefixed name");
    auto prefix = v.substr(0, colon);
    for (const auto& [pre, ns] : prefixes)
      if (pre == prefix) return ns + std::string(v.substr(colon + 1));
    for (const auto& [pre, ns] : rdf::standard_prefixes())
      if (pre == prefix) return ns + std::string(v.substr(colon + 1));
    throw malformed("unknown prefix '" + std::string(prefix) + "'");
  };
  auto need_number = [&] {
    auto n = parse_number(value);
    if (!n) throw malformed("expected a number");
    p.number = *n;
  };
  auto need_equality = [&] {
    if (p.op != CompareOp::eq && p.op != CompareOp::ne) throw malformed("only = and != apply");
  };

  if (key == "mapTo" || key == "level" || key == "indicator") {
    need_equality();
    p.kind = key == "mapTo" ? Predicate::Kind::map_to
             : key == "level" ? Predicate::Kind::level
                              : Predicate::Kind::indicator;
    p.text = resolve_iri(value);
  } else if (key == "items" || key == "domains") {
    p.kind = key == "items" ? Predicate::Kind::items : Predicate::Kind::domains;
    need_number();
  } else if (key == "category") {
    need_equality();
    if (!category_from_string(value)) throw malformed("unknown category");
    p.kind = Predicate::Kind::category;
    p.text = std::string(value);
  } else {
    auto open = key.find('(');
    if (open == std::string_view::npos || key.back() != ')') throw malformed("unknown key");
    p.kind = Predicate::Kind::stat;
    p.stat = std::string(trim(key.substr(0, open)));
    p.attribute = std::string(trim(key.substr(open + 1, key.size() - open - 2)));
    if (!stat_names().count(p.stat)) throw malformed("unknown statistic '" + p.stat + "'");
    if (p.attribute.empty()) throw malformed("missing attribute name");
    need_number();
  }
  return p;
}

// ---------------------------------------------------------------------------
// Store

struct CatalogEntry {
  std::string iri;
  std::string file;
  std::string registered_at;
  std::vector<std::string> levels;
  std::vector<std::string> indicators;
  std::vector<std::string> categories;
  std::size_t items = 0;
  std::size_t domains = 0;
};

struct CatalogOptions {
  /// Called after the temporary document is written and before it replaces
  /// the live one. Throwing aborts the registration.
  std::function<void(const std::filesystem::path&)> before_commit;
};

class CatalogStore {
 public:
  explicit CatalogStore(std::filesystem::path root, CatalogOptions options = {})
      : root_(std::move(root)), options_(std::move(options)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec || !std::filesystem::is_directory(root_))
      throw Error(ErrorCode::StorageError, "cannot create catalog at " + root_.string());
    FileLock lock(root_ / ".lock", false);
    load_index();
  }

  const std::filesystem::path& root() const noexcept { return root_; }
  const std::map<std::string, CatalogEntry>& entries() const noexcept { return entries_; }
  const rdf::PrefixMap& prefixes() const noexcept { return prefixes_; }

  /// Re-reads the index written by other processes.
  void refresh() {
    FileLock lock(root_ / ".lock", false);
    load_index();
  }

  std::string register_graph(const rdf::Graph& graph) {
    auto violations = validate_shape(graph);
    if (!violations.empty())
      throw Error(ErrorCode::ShapeViolation, violations.front() + (violations.size() > 1
                                                  ? " (+" + std::to_string(violations.size() - 1) + " more)"
                                                  : ""));
    SourceRecord rec = read_source(graph);

    FileLock lock(root_ / ".lock", true);
    load_index();
    const std::string file = file_name(rec.iri);
    const auto target = root_ / file;
    const auto temp = root_ / (file + ".tmp");
    write_file(temp, rdf::to_turtle(graph));
    if (options_.before_commit) {
      try {
        options_.before_commit(temp);
      } catch (...) {
        std::error_code ec;
        std::filesystem::remove(temp, ec);
        throw;
      }
    }
    commit(temp, target);

    CatalogEntry e;
    e.iri = rec.iri;
    e.file = file;
    e.registered_at = now_iso();
    e.items = rec.meta.items;
    e.domains = rec.meta.domains;
    std::set<std::string> levels, indicators, cats;
    for (const auto& a : rec.attributes) {
      cats.insert(std::string(to_string(a.category)));
      if (!a.map_to) continue;
      if (is_dimensional(a.profile))
        levels.insert(*a.map_to);
      else
        indicators.insert(*a.map_to);
    }
    e.levels.assign(levels.begin(), levels.end());
    e.indicators.assign(indicators.begin(), indicators.end());
    e.categories.assign(cats.begin(), cats.end());
    entries_[rec.iri] = std::move(e);
    for (const auto& [p, iri] : graph.prefixes) merge_prefix(p, iri);
    save_index();
    return rec.iri;
  }

  rdf::Graph load_graph(std::string_view source) const {
    auto it = entries_.find(std::string(source));
    if (it == entries_.end())
      throw Error(ErrorCode::UnknownSource, "source <" + std::string(source) + "> is not registered");
    return rdf::load_graph(root_ / it->second.file);
  }

  SourceRecord get_source(std::string_view source) const { return read_source(load_graph(source)); }

  Profile get_profile(std::string_view source, std::string_view attribute) const {
    SourceRecord rec = get_source(source);
    const auto* a = rec.find(attribute);
    if (!a)
      throw Error(ErrorCode::UnknownAttribute,
                  "source <" + std::string(source) + "> has no attribute '" + std::string(attribute) + "'");
    return a->profile;
  }

  Query parse_query(const std::vector<std::string>& clauses) const {
    Query q;
    for (const auto& c : clauses) q.push_back(parse_predicate(c, prefixes_));
    return q;
  }

  /// Sources satisfying every predicate, ordered by IRI.
  std::vector<std::string> find_sources(const Query& query) const {
    std::vector<std::string> out;
    for (const auto& [iri, e] : entries_) {
      std::optional<SourceRecord> rec;
      bool ok = true;
      for (const auto& p : query) {
        if (!(ok = matches(e, p, rec))) break;
      }
      if (ok) out.push_back(iri);
    }
    return out;
  }

 private:
  class FileLock {
   public:
    FileLock(const std::filesystem::path& path, bool exclusive) {
      fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
      if (fd_ < 0) throw Error(ErrorCode::StorageError, "cannot open lock " + path.string());
      if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
        ::close(fd_);
        throw Error(ErrorCode::StorageError, "cannot lock " + path.string());
      }
    }
    ~FileLock() {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

   private:
    int fd_ = -1;
  };

  bool matches(const CatalogEntry& e, const Predicate& p, std::optional<SourceRecord>& rec) const {
    auto contains = [](const std::vector<std::string>& v, const std::string& x) {
      return std::find(v.begin(), v.end(), x) != v.end();
    };
    const bool positive = p.op == CompareOp::eq;
    switch (p.kind) {
      case Predicate::Kind::map_to:
        return (contains(e.levels, p.text) || contains(e.indicators, p.text)) == positive;
      case Predicate::Kind::level:
        return contains(e.levels, p.text) == positive;
      case Predicate::Kind::indicator:
        return contains(e.indicators, p.text) == positive;
      case Predicate::Kind::category:
        return contains(e.categories, p.text) == positive;
      case Predicate::Kind::items:
        return compare(static_cast<double>(e.items), p.op, p.number);
      case Predicate::Kind::domains:
        return compare(static_cast<double>(e.domains), p.op, p.number);
      case Predicate::Kind::stat: {
        if (!rec) rec = get_source(e.iri);
        const auto* a = rec->find(p.attribute);
        if (!a) return false;
        auto v = profile_stat(a->profile, p.stat);
        return v && compare(*v, p.op, p.number);
      }
    }
    return false;
  }

  static std::string file_name(const std::string& iri) {
    const std::string prefix = rdf::iri_of(rdf::ns::dl, "source/");
    std::string stem = iri.rfind(prefix, 0) == 0 ? iri.substr(prefix.size()) : percent_encode(iri);
    return stem + ".ttl";
  }

  static std::string now_iso() {
    auto now = std::chrono::system_clock::now();
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    return format_timestamp(Timestamp{secs, true});
  }

  static void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::StorageError, "cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::StorageError, "short write to " + path.string());
  }

  static void commit(const std::filesystem::path& temp, const std::filesystem::path& target) {
    std::error_code ec;
    std::filesystem::rename(temp, target, ec);
    if (ec) throw Error(ErrorCode::StorageError, "cannot replace " + target.string() + ": " + ec.message());
  }

  void merge_prefix(const std::string& prefix, const std::string& iri) {
    for (const auto& [p, i] : prefixes_)
      if (p == prefix) return;
    prefixes_.emplace_back(prefix, iri);
  }

  void load_index() {
    entries_.clear();
    prefixes_.clear();
    const auto path = root_ / "index.json";
    if (!std::filesystem::exists(path)) return;
    try {
      auto j = nlohmann::json::parse(mdprof::detail::read_file(path));
      for (const auto& [p, iri] : j.at("prefixes").items()) prefixes_.emplace_back(p, iri.get<std::string>());
      for (const auto& s : j.at("sources")) {
        CatalogEntry e;
        e.iri = s.at("iri").get<std::string>();
        e.file = s.at("file").get<std::string>();
        e.registered_at = s.at("registered_at").get<std::string>();
        e.levels = s.at("levels").get<std::vector<std::string>>();
        e.indicators = s.at("indicators").get<std::vector<std::string>>();
        e.categories = s.at("categories").get<std::vector<std::string>>();
        e.items = s.at("items").get<std::size_t>();
        e.domains = s.at("domains").get<std::size_t>();
        entries_[e.iri] = std::move(e);
      }
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::StorageError, "corrupt catalog index: " + std::string(ex.what()));
    }
  }

  void save_index() const {
    nlohmann::json j;
    j["version"] = 1;
    j["prefixes"] = nlohmann::json::object();
    for (const auto& [p, iri] : prefixes_) j["prefixes"][p] = iri;
    j["sources"] = nlohmann::json::array();
    for (const auto& [iri, e] : entries_) {
      j["sources"].push_back({{"iri", e.iri},
                              {"file", e.file},
                              {"registered_at", e.registered_at},
                              {"levels", e.levels},
                              {"indicators", e.indicators},
                              {"categories", e.categories},
                              {"items", e.items},
                              {"domains", e.domains}});
    }
    const auto temp = root_ / "index.json.tmp";
    write_file(temp, j.dump(2) + "\n");
    commit(temp, root_ / "index.json");
  }

  std::filesystem::path root_;
  CatalogOptions options_;
  std::map<std::string, CatalogEntry> entries_;
  rdf::PrefixMap prefixes_;
};

}  // namespace mdprof
