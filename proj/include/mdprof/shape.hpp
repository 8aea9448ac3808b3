#pragma once

// Domain/range conformance of a metadata graph against the dl vocabulary,
// plus the structural invariants of a single-source document.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mdprof/rdf_model.hpp"
#include "mdprof/typing.hpp"

namespace mdprof {

struct PropertyShape {
  /// Allowed subject classes (any of); IRIs.
  std::vector<std::string> domain;
  /// Allowed object classes when the range is a node; empty means literal
  /// range or an external resource (see `external`).
  std::vector<std::string> range_classes;
  /// Allowed literal datatypes when the range is a literal.
  std::vector<std::string> datatypes;
  /// Object is an IRI defined outside the metadata graph (KG or DBpedia).
  bool external = false;
};

inline const std::map<std::string, PropertyShape>& vocabulary_shapes() {
  static const std::map<std::string, PropertyShape> shapes = [] {
    using rdf::iri_of;
    using rdf::ns::dcterms;
    using rdf::ns::dl;
    using rdf::ns::xsd;
    auto cls = [](std::string_view local) { return iri_of(dl, local); };
    auto dt = [](std::initializer_list<std::string_view> locals) {
      std::vector<std::string> out;
      for (auto l : locals) out.push_back(iri_of(xsd, l));
      return out;
    };
    const auto integer = dt({"integer"});
    const auto number = dt({"integer", "decimal"});
    const auto text = dt({"string"});
    const auto dates = dt({"date", "dateTime"});
    const std::string source = cls("Source"), domain = cls("Domain"), iprofile = cls("IProfile");

    std::map<std::string, PropertyShape> m;
    auto lit = [&](std::string_view p, std::vector<std::string> dom, std::vector<std::string> types,
                   bool in_dcterms = false) {
      m[iri_of(in_dcterms ? dcterms : dl, p)] = {std::move(dom), {}, std::move(types), false};
    };
    auto node = [&](std::string_view p, std::string dom, std::string range) {
      m[iri_of(dl, p)] = {{std::move(dom)}, {std::move(range)}, {}, false};
    };
    auto ext = [&](std::string_view p, std::string dom, bool in_dcterms = false) {
      m[iri_of(in_dcterms ? dcterms : dl, p)] = {{std::move(dom)}, {}, {}, true};
    };

    // Source
    lit("location", {source}, text);
    lit("domains", {source}, integer);
    lit("items", {source}, integer);
    node("contains", source, domain);
    for (auto p : {"description", "format", "creator", "publisher", "contributor", "license"})
      lit(p, {source}, text, true);
    lit("title", {source, domain}, text, true);
    lit("date", {source}, dt({"string", "date", "dateTime"}), true);
    ext("subject", source, true);

    // Attributes
    lit("attributeType", {domain}, text);
    ext("mapTo", domain);
    node("hasDProfile", domain, cls("DProfile"));
    node("hasIProfile", domain, iprofile);

    // Dimensional profiles
    node("hasDProfileElement", cls("DProfile"), cls("DProfileElement"));
    ext("toMember", cls("DProfileElement"));
    lit("frequency", {cls("DProfileElement")}, integer);
    lit("others", {cls("DProfileElement")}, integer);

    // Numeric
    for (auto p : {"max", "min", "mean", "median"}) lit(p, {iprofile}, number);
    lit("distinct", {iprofile}, integer);
    lit("null", {iprofile}, integer);
    node("hasDistribution", iprofile, cls("Distribution"));
    node("hasDistributionElement", cls("Distribution"), cls("DistributionElement"));
    lit("start_range", {cls("DistributionElement")}, number);
    lit("end_range", {cls("DistributionElement")}, number);
    lit("count", {cls("DistributionElement")}, integer);

    // Categorical
    node("hasCategories", iprofile, cls("Categories"));
    node("hasCategoryElement", cls("Categories"), cls("CategoryElement"));
    lit("category", {cls("CategoryElement")}, text);
    lit("categoryCount", {cls("CategoryElement")}, integer);

    // Datetime
    lit("minDate", {iprofile}, dates);
    lit("maxDate", {iprofile}, dates);
    node("hasYears", iprofile, cls("Years"));
    node("hasYearElement", cls("Years"), cls("YearElement"));
    lit("year", {cls("YearElement")}, integer);
    lit("yearCount", {cls("YearElement")}, integer);

    // Textual
    lit("words", {iprofile}, integer);
    node("hasWords", iprofile, cls("Words"));
    node("hasWordElement", cls("Words"), cls("WordElement"));
    lit("word", {cls("WordElement")}, text);
    lit("wordCount", {cls("WordElement")}, integer);
    return m;
  }();
  return shapes;
}

namespace detail {

inline bool valid_lexical(const rdf::Term& t) {
  const std::string& dt = t.datatype;
  if (dt == rdf::iri_of(rdf::ns::xsd, "integer")) {
    std::string_view v = t.value;
    if (!v.empty() && (v[0] == '-' || v[0] == '+')) v.remove_prefix(1);
    return !v.empty() && std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; });
  }
  if (dt == rdf::iri_of(rdf::ns::xsd, "decimal"))
    return parse_number(t.value).has_value() &&
           t.value.find_first_of("eE") == std::string::npos;
  if (dt == rdf::iri_of(rdf::ns::xsd, "date") || dt == rdf::iri_of(rdf::ns::xsd, "dateTime"))
    return parse_timestamp(t.value).has_value();
  return true;
}

}  // namespace detail

/// Returns one message per violation; an empty result means the graph conforms.
inline std::vector<std::string> validate_shape(const rdf::Graph& g) {
  std::vector<std::string> out;
  const auto& shapes = vocabulary_shapes();
  const rdf::Term type = rdf::rdf_type();

  std::map<rdf::Term, std::set<std::string>> types;
  for (const auto& t : g.triples)
    if (t.predicate == type) {
      if (!t.object.is_iri())
        out.push_back("rdf:type object of <" + t.subject.value + "> is not an IRI");
      else
        types[t.subject].insert(t.object.value);
    }
  auto has_any = [&](const rdf::Term& node, const std::vector<std::string>& classes) {
    auto it = types.find(node);
    if (it == types.end()) return false;
    for (const auto& c : classes)
      if (it->second.count(c)) return true;
    return false;
  };
  auto show = [](const rdf::Triple& t) {
    return "<" + t.subject.value + "> <" + t.predicate.value + "> " +
           (t.object.is_literal() ? "\"" + t.object.value + "\"" : "<" + t.object.value + ">");
  };

  // Domain and range of every predicate.
  for (const auto& t : g.triples) {
    if (t.predicate == type) continue;
    auto it = shapes.find(t.predicate.value);
    if (it == shapes.end()) {
      out.push_back("undeclared predicate: " + show(t));
      continue;
    }
    const auto& s = it->second;
    if (!has_any(t.subject, s.domain)) out.push_back("subject outside domain: " + show(t));
    if (!s.range_classes.empty()) {
      if (!t.object.is_resource() || !has_any(t.object, s.range_classes))
        out.push_back("object outside range: " + show(t));
    } else if (s.external) {
      if (!t.object.is_iri()) out.push_back("object must be an IRI: " + show(t));
    } else {
      if (!t.object.is_literal() ||
          std::find(s.datatypes.begin(), s.datatypes.end(), t.object.datatype) == s.datatypes.end())
        out.push_back("literal datatype outside range: " + show(t));
      else if (!detail::valid_lexical(t.object))
        out.push_back("malformed literal: " + show(t));
    }
  }

  // Exactly one source, also a void:Dataset, with single-valued statistics.
  const std::string source_cls = rdf::iri_of(rdf::ns::dl, "Source");
  std::vector<rdf::Term> sources;
  for (const auto& [node, cls] : types)
    if (cls.count(source_cls)) sources.push_back(node);
  if (sources.size() != 1) {
    out.push_back("expected exactly one dl:Source, found " + std::to_string(sources.size()));
    return out;
  }
  const rdf::Term& src = sources.front();
  if (!types[src].count(rdf::iri_of(rdf::ns::void_, "Dataset")))
    out.push_back("dl:Source is not typed void:Dataset");
  for (auto p : {"location", "items", "domains"})
    if (g.objects(src, rdf::dl(p)).size() != 1)
      out.push_back(std::string("dl:Source needs exactly one dl:") + p);

  // Every node other than the source hangs off exactly one parent edge.
  std::map<rdf::Term, std::size_t> incoming;
  for (const auto& t : g.triples) {
    if (t.predicate == type || !t.object.is_resource()) continue;
    auto it = shapes.find(t.predicate.value);
    if (it != shapes.end() && !it->second.range_classes.empty()) ++incoming[t.object];
  }
  std::size_t domain_count = 0;
  const std::string domain_cls = rdf::iri_of(rdf::ns::dl, "Domain");
  for (const auto& [node, cls] : types) {
    if (node == src) continue;
    if (cls.count(domain_cls)) {
      ++domain_count;
      if (!g.has(src, rdf::dl("contains"), node))
        out.push_back("dl:Domain <" + node.value + "> is not contained by the source");
      const auto profiles =
          g.objects(node, rdf::dl("hasDProfile")).size() + g.objects(node, rdf::dl("hasIProfile")).size();
      if (profiles != 1)
        out.push_back("dl:Domain <" + node.value + "> needs exactly one profile");
      if (!g.objects(node, rdf::dl("hasDProfile")).empty() &&
          g.objects(node, rdf::dl("mapTo")).size() != 1)
        out.push_back("dimensional dl:Domain <" + node.value + "> needs exactly one dl:mapTo");
      const auto* kind = g.object(node, rdf::dl("attributeType"));
      if (kind && !category_from_string(kind->value))
        out.push_back("unknown dl:attributeType on <" + node.value + ">");
    }
    if (incoming[node] != 1)
      out.push_back("node <" + node.value + "> has " + std::to_string(incoming[node]) +
                    " parent edges, expected 1");
  }
  if (const auto* d = g.object(src, rdf::dl("domains")))
    if (d->value != std::to_string(domain_count))
      out.push_back("dl:domains is " + d->value + " but the graph has " +
                    std::to_string(domain_count) + " dl:Domain nodes");
  return out;
}

}  // namespace mdprof
