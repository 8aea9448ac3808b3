#pragma once

// Knowledge Graph fragment (levels, members, indicators, roll-up edges) and
// mapping discovery from source attributes to it.

#include <algorithm>
#include <bitset>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mdprof/error.hpp"
#include "mdprof/ingest.hpp"
#include "mdprof/rdf_model.hpp"
#include "mdprof/rdf_parse.hpp"

namespace mdprof {

/// Lowercase ASCII, surrounding whitespace removed. Used for member labels.
inline std::string normalize_label(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// Lowercase with every non-alphanumeric byte dropped. Used for indicator names.
inline std::string normalize_name(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s)
    if (std::isalnum(c)) out += static_cast<char>(std::tolower(c));
  return out;
}

struct KgMember {
  std::string iri;
  /// rdfs:label values followed by the IRI local name.
  std::vector<std::string> labels;
};

/// Membership lookup for one level. Cheap length and first-byte checks reject
/// most values that cannot be labels before any hashing happens.
class LevelIndex {
 public:
  void add(std::string_view normalized, std::uint32_t member) {
    if (normalized.empty()) return;
    // First writer wins; members are added in IRI order.
    labels_.try_emplace(std::string(normalized), member);
    min_len_ = std::min(min_len_, normalized.size());
    max_len_ = std::max(max_len_, normalized.size());
    first_bytes_.set(static_cast<unsigned char>(normalized.front()));
  }

  /// Looks up a raw cell value; `scratch` avoids per-call allocation.
  std::optional<std::uint32_t> find(std::string_view raw, std::string& scratch) const {
    while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.front()))) raw.remove_prefix(1);
    while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) raw.remove_suffix(1);
    if (raw.size() < min_len_ || raw.size() > max_len_) return std::nullopt;
    if (!first_bytes_.test(static_cast<unsigned char>(
            std::tolower(static_cast<unsigned char>(raw.front())))))
      return std::nullopt;
    scratch.assign(raw);
    for (auto& c : scratch) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    auto it = labels_.find(scratch);
    if (it == labels_.end()) return std::nullopt;
    return it->second;
  }

  bool contains_normalized(const std::string& normalized) const {
    return labels_.count(normalized) != 0;
  }

 private:
  std::unordered_map<std::string, std::uint32_t> labels_;
  std::size_t min_len_ = SIZE_MAX;
  std::size_t max_len_ = 0;
  std::bitset<256> first_bytes_;
};

struct KgLevel {
  std::string iri;
  std::string name;
  /// Indices into KnowledgeGraph::members, sorted by member IRI.
  std::vector<std::uint32_t> members;
  LevelIndex index;
};

struct KgIndicator {
  std::string iri;
  std::string name;
  std::vector<std::string> names;
};

struct KgOptions {
  std::string member_level_property = rdf::iri_of(rdf::ns::kpi, "inLevel");
  std::string rollup_property = rdf::iri_of(rdf::ns::kpi, "rollsUpTo");
};

class KnowledgeGraph {
 public:
  /// Levels sorted by IRI.
  const std::vector<KgLevel>& levels() const noexcept { return levels_; }
  const std::vector<KgMember>& members() const noexcept { return members_; }
  const std::vector<KgIndicator>& indicators() const noexcept { return indicators_; }
  /// Roll-up edges (finer level IRI, coarser level IRI).
  const std::vector<std::pair<std::string, std::string>>& rollups() const noexcept {
    return rollups_;
  }
  const rdf::PrefixMap& prefixes() const noexcept { return prefixes_; }

  const KgLevel* find_level(std::string_view iri) const {
    auto it = std::lower_bound(levels_.begin(), levels_.end(), iri,
                               [](const KgLevel& l, std::string_view v) { return l.iri < v; });
    return it != levels_.end() && it->iri == iri ? &*it : nullptr;
  }

  std::size_t member_count(std::string_view level_iri) const {
    const auto* l = find_level(level_iri);
    return l ? l->members.size() : 0;
  }

  static KnowledgeGraph from_graph(const rdf::Graph& g, const KgOptions& options = {}) {
    KnowledgeGraph kg;
    kg.prefixes_ = g.prefixes;
    const rdf::Term type = rdf::rdf_type();
    const rdf::Term label = rdf::Term::iri(rdf::iri_of(rdf::ns::rdfs, "label"));
    const rdf::Term level_cls = rdf::kpi("Level");
    const rdf::Term member_cls = rdf::kpi("Member");
    const rdf::Term indicator_cls = rdf::kpi("Indicator");
    const rdf::Term in_level = rdf::Term::iri(options.member_level_property);
    const rdf::Term rollup = rdf::Term::iri(options.rollup_property);

    auto labels_of = [&](const rdf::Term& s) {
      std::vector<std::string> out;
      for (const auto& o : g.objects(s, label))
        if (o.is_literal()) out.push_back(o.value);
      std::sort(out.begin(), out.end());
      return out;
    };

    std::set<std::string> level_iris, member_iris, indicator_iris;
    for (const auto& t : g.triples) {
      if (t.predicate == type && t.subject.is_iri()) {
        if (t.object == level_cls) level_iris.insert(t.subject.value);
        else if (t.object == member_cls) member_iris.insert(t.subject.value);
        else if (t.object == indicator_cls) indicator_iris.insert(t.subject.value);
      } else if (t.predicate == in_level && t.subject.is_iri()) {
        member_iris.insert(t.subject.value);
      }
    }

    for (const auto& iri : level_iris) {
      KgLevel level;
      level.iri = iri;
      auto names = labels_of(rdf::Term::iri(iri));
      level.name = names.empty() ? std::string(rdf::local_name(iri)) : names.front();
      kg.levels_.push_back(std::move(level));
    }

    for (const auto& iri : member_iris) {
      rdf::Term subject = rdf::Term::iri(iri);
      auto targets = g.objects(subject, in_level);
      if (targets.empty()) continue;
      if (targets.size() > 1)
        throw Error(ErrorCode::MultiLevelMember,
                    "member <" + iri + "> is linked to " + std::to_string(targets.size()) +
                        " levels");
      KgLevel* level = nullptr;
      if (targets[0].is_iri())
        for (auto& l : kg.levels_)
          if (l.iri == targets[0].value) level = &l;
      if (!level)
        throw Error(ErrorCode::DanglingMember,
                    "member <" + iri + "> points at undeclared level <" + targets[0].value + ">");
      KgMember m;
      m.iri = iri;
      m.labels = labels_of(subject);
      m.labels.emplace_back(rdf::local_name(iri));
      const auto idx = static_cast<std::uint32_t>(kg.members_.size());
      level->members.push_back(idx);
      for (const auto& l : m.labels) level->index.add(normalize_label(l), idx);
      kg.members_.push_back(std::move(m));
    }

    for (const auto& iri : indicator_iris) {
      KgIndicator ind;
      ind.iri = iri;
      ind.names = labels_of(rdf::Term::iri(iri));
      ind.names.emplace_back(rdf::local_name(iri));
      ind.name = ind.names.back();
      kg.indicators_.push_back(std::move(ind));
    }

    for (const auto& level : kg.levels_)
      for (const auto& o : g.objects(rdf::Term::iri(level.iri), rollup))
        if (o.is_iri() && kg.find_level(o.value)) kg.rollups_.emplace_back(level.iri, o.value);
    kg.check_acyclic();
    return kg;
  }

 private:
  void check_acyclic() const {
    std::map<std::string_view, std::vector<std::string_view>> next;
    for (const auto& [from, to] : rollups_) next[from].push_back(to);
    std::map<std::string_view, int> state;  // 1 = on stack, 2 = done
    std::function<void(std::string_view)> visit = [&](std::string_view v) {
      state[v] = 1;
      for (auto w : next[v]) {
        if (state[w] == 1)
          throw Error(ErrorCode::HierarchyCycle,
                      "roll-up cycle through <" + std::string(w) + ">");
        if (state[w] == 0) visit(w);
      }
      state[v] = 2;
    };
    for (const auto& l : levels_)
      if (state[l.iri] == 0) visit(l.iri);
  }

  std::vector<KgLevel> levels_;
  std::vector<KgMember> members_;
  std::vector<KgIndicator> indicators_;
  std::vector<std::pair<std::string, std::string>> rollups_;
  rdf::PrefixMap prefixes_;
};

inline KnowledgeGraph load_kg(const std::filesystem::path& path, const KgOptions& options = {}) {
  return KnowledgeGraph::from_graph(rdf::load_graph(path), options);
}

enum class MappingTarget { level, indicator };

struct Mapping {
  std::string attribute;
  MappingTarget kind = MappingTarget::level;
  std::string target;
  /// Containment score for level mappings; 1 for name-matched indicators.
  double score = 0.0;

  bool operator==(const Mapping&) const = default;
};

/// Fraction of the attribute's distinct normalized values found among a
/// level's member labels, for every level with a non-zero score.
inline std::map<std::string, double> containment_scores(const Column& column,
                                                        const KnowledgeGraph& kg) {
  std::unordered_set<std::string> distinct;
  for (const auto& c : column.cells)
    if (c) distinct.insert(normalize_label(*c));
  std::map<std::string, double> scores;
  if (distinct.empty()) return scores;
  for (const auto& level : kg.levels()) {
    std::size_t hits = 0;
    for (const auto& v : distinct)
      if (level.index.contains_normalized(v)) ++hits;
    if (hits) scores[level.iri] = static_cast<double>(hits) / static_cast<double>(distinct.size());
  }
  return scores;
}

/// Best-scoring level with score >= threshold; ties go to the smaller IRI.
inline std::optional<Mapping> discover_level_mapping(const Column& column,
                                                     const KnowledgeGraph& kg,
                                                     double threshold = 0.5) {
  std::optional<Mapping> best;
  // std::map iterates in IRI order, so strict '>' keeps the smallest IRI on ties.
  for (const auto& [iri, score] : containment_scores(column, kg)) {
    if (score < threshold) continue;
    if (!best || score > best->score) best = Mapping{column.name, MappingTarget::level, iri, score};
  }
  return best;
}

inline std::optional<Mapping> discover_indicator_mapping(std::string_view attribute_name,
                                                         const KnowledgeGraph& kg) {
  const std::string key = normalize_name(attribute_name);
  if (key.empty()) return std::nullopt;
  const KgIndicator* found = nullptr;
  for (const auto& ind : kg.indicators()) {
    bool match = std::any_of(ind.names.begin(), ind.names.end(),
                             [&](const std::string& n) { return normalize_name(n) == key; });
    if (!match) continue;
    if (found)
      throw Error(ErrorCode::AmbiguousIndicator,
                  "attribute '" + std::string(attribute_name) + "' matches both <" +
                      found->iri + "> and <" + ind.iri + ">");
    found = &ind;
  }
  if (!found) return std::nullopt;
  return Mapping{std::string(attribute_name), MappingTarget::indicator, found->iri, 1.0};
}

}  // namespace mdprof
