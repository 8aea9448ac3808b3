#pragma once

#include <compare>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mdprof::rdf {

namespace ns {
inline constexpr std::string_view rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view rdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view xsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view dcterms = "http://purl.org/dc/terms/";
inline constexpr std::string_view void_ = "http://rdfs.org/ns/void#";
inline constexpr std::string_view kpi = "http://w3id.org/kpionto/";
inline constexpr std::string_view dl = "http://kdmg.dii.univpm.it/dl/";
}  // namespace ns

inline std::string iri_of(std::string_view ns, std::string_view local) {
  std::string out(ns);
  out += local;
  return out;
}

enum class TermKind { iri, blank, literal };

/// An RDF term. Simple literals carry xsd:string as datatype, language-tagged
/// literals carry rdf:langString, so equal literals compare equal.
struct Term {
  TermKind kind = TermKind::iri;
  std::string value;
  std::string datatype;
  std::string lang;

  auto operator<=>(const Term&) const = default;
  bool operator==(const Term&) const = default;

  bool is_iri() const noexcept { return kind == TermKind::iri; }
  bool is_blank() const noexcept { return kind == TermKind::blank; }
  bool is_literal() const noexcept { return kind == TermKind::literal; }
  bool is_resource() const noexcept { return kind != TermKind::literal; }

  static Term iri(std::string v) { return {TermKind::iri, std::move(v), {}, {}}; }
  static Term blank(std::string label) { return {TermKind::blank, std::move(label), {}, {}}; }
  static Term literal(std::string lexical, std::string_view datatype_local = "string") {
    return {TermKind::literal, std::move(lexical), iri_of(ns::xsd, datatype_local), {}};
  }
  static Term typed(std::string lexical, std::string datatype_iri) {
    return {TermKind::literal, std::move(lexical), std::move(datatype_iri), {}};
  }
  static Term lang_literal(std::string lexical, std::string lang) {
    return {TermKind::literal, std::move(lexical), iri_of(ns::rdf, "langString"),
            std::move(lang)};
  }
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  auto operator<=>(const Triple&) const = default;
  bool operator==(const Triple&) const = default;
};

/// Ordered prefix declarations, as (prefix, namespace IRI).
using PrefixMap = std::vector<std::pair<std::string, std::string>>;

inline PrefixMap standard_prefixes() {
  return {{"xsd", std::string(ns::xsd)},
          {"dcterms", std::string(ns::dcterms)},
          {"void", std::string(ns::void_)},
          {"kpi", std::string(ns::kpi)},
          {"dl", std::string(ns::dl)}};
}

/// A set of triples plus the prefixes used to abbreviate them in Turtle.
struct Graph {
  std::set<Triple> triples;
  PrefixMap prefixes;

  void add(Term s, Term p, Term o) {
    triples.insert(Triple{std::move(s), std::move(p), std::move(o)});
  }
  std::size_t size() const noexcept { return triples.size(); }

  void add_prefix(std::string prefix, std::string iri) {
    for (auto& [p, i] : prefixes)
      if (p == prefix) {
        i = std::move(iri);
        return;
      }
    prefixes.emplace_back(std::move(prefix), std::move(iri));
  }

  std::vector<Term> objects(const Term& s, const Term& p) const {
    std::vector<Term> out;
    auto it = triples.lower_bound(Triple{s, p, Term{TermKind::iri, {}, {}, {}}});
    for (; it != triples.end() && it->subject == s && it->predicate == p; ++it)
      out.push_back(it->object);
    return out;
  }

  const Term* object(const Term& s, const Term& p) const {
    auto it = triples.lower_bound(Triple{s, p, Term{TermKind::iri, {}, {}, {}}});
    if (it != triples.end() && it->subject == s && it->predicate == p) return &it->object;
    return nullptr;
  }

  bool has(const Term& s, const Term& p, const Term& o) const {
    return triples.count(Triple{s, p, o}) != 0;
  }
};

/// Local part of an IRI after the last '#' or '/'.
inline std::string_view local_name(std::string_view iri) {
  auto pos = iri.find_last_of("#/");
  return pos == std::string_view::npos ? iri : iri.substr(pos + 1);
}

inline Term rdf_type() { return Term::iri(iri_of(ns::rdf, "type")); }
inline Term dl(std::string_view local) { return Term::iri(iri_of(ns::dl, local)); }
inline Term kpi(std::string_view local) { return Term::iri(iri_of(ns::kpi, local)); }
inline Term dcterms(std::string_view local) { return Term::iri(iri_of(ns::dcterms, local)); }

}  // namespace mdprof::rdf
