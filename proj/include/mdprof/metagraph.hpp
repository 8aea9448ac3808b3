#pragma once

// Emission of the source/attribute/profile metadata graph and the inverse
// reconstruction of profiles from such a graph.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "mdprof/engine.hpp"
#include "mdprof/error.hpp"
#include "mdprof/kg.hpp"
#include "mdprof/profiler.hpp"
#include "mdprof/rdf_model.hpp"
#include "mdprof/typing.hpp"

namespace mdprof {

struct SourceMetadata {
  /// Local name of the source; determines its IRI.
  std::string name;
  std::optional<std::string> title, description, format, creator, publisher, date, license;
  std::vector<std::string> contributors;
  std::vector<std::string> subjects;
  std::string location;
  std::size_t items = 0;
  std::size_t domains = 0;

  bool operator==(const SourceMetadata&) const = default;
};

// ---------------------------------------------------------------------------
// IRIs

enum class IriKind { source, domain, profile, profile_element };

/// Keeps RFC 3986 unreserved bytes, percent-encodes the rest.
inline std::string percent_encode(std::string_view s) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xF];
    }
  }
  return out;
}

inline std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      unsigned v = 0;
      std::from_chars(s.data() + i + 1, s.data() + i + 3, v, 16);
      out += static_cast<char>(v);
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

/// Deterministic IRIs under the dl namespace:
///   source          dl:source/<name>
///   domain          <source>/domain/<name>
///   profile         <domain>/<name>          (dprofile, iprofile)
///   profile element <parent>/<name>          (e0, others, distribution, ...)
inline std::string mint_iri(IriKind kind, std::string_view parent, std::string_view local) {
  if (local.empty()) throw Error(ErrorCode::InvalidConfig, "IRI local names must be non-empty");
  switch (kind) {
    case IriKind::source:
      return rdf::iri_of(rdf::ns::dl, "source/") + percent_encode(local);
    case IriKind::domain:
      return std::string(parent) + "/domain/" + percent_encode(local);
    case IriKind::profile:
    case IriKind::profile_element:
      return std::string(parent) + "/" + percent_encode(local);
  }
  return {};
}

inline std::string element_iri(std::string_view parent, std::size_t index) {
  return mint_iri(IriKind::profile_element, parent, "e" + std::to_string(index));
}

// ---------------------------------------------------------------------------
// Literals

inline std::string format_decimal(double v) {
  char buf[512];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  std::string out = ec == std::errc{} ? std::string(buf, ptr) : std::to_string(v);
  if (out == "-0") out = "0";
  if (out.find('.') == std::string::npos) out += ".0";
  return out;
}

inline rdf::Term count_literal(std::size_t n) {
  return rdf::Term::literal(std::to_string(n), "integer");
}
inline rdf::Term decimal_literal(double v) { return rdf::Term::literal(format_decimal(v), "decimal"); }

/// Whole values of integer attributes are xsd:integer, everything else xsd:decimal.
inline rdf::Term number_literal(double v, bool integral) {
  if (integral && std::nearbyint(v) == v && std::fabs(v) < 9.2e18) {
    return rdf::Term::literal(std::to_string(static_cast<long long>(v)), "integer");
  }
  return decimal_literal(v);
}

inline rdf::Term date_literal(const Timestamp& t) {
  return rdf::Term::literal(format_timestamp(t), t.has_time ? "dateTime" : "date");
}

// ---------------------------------------------------------------------------
// Emission

struct AttributeInput {
  std::string name;
  Category category = Category::unrecognized;
  std::optional<Mapping> mapping;
  Profile profile;
};

inline std::vector<AttributeInput> to_inputs(const std::vector<AttributeResult>& results) {
  std::vector<AttributeInput> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back({r.name, r.category, r.mapping, r.profile});
  return out;
}

namespace detail {

inline void check_consistency(const AttributeInput& a) {
  auto mismatch = [&](const std::string& why) {
    return Error(ErrorCode::ProfileCategoryMismatch, "attribute '" + a.name + "': " + why);
  };
  if (const auto* d = std::get_if<DProfile>(&a.profile)) {
    if (!a.mapping || a.mapping->kind != MappingTarget::level || a.mapping->target != d->level)
      throw mismatch("dimensional profile requires a level mapping to <" + d->level + ">");
    return;
  }
  if (a.mapping && a.mapping->kind == MappingTarget::level)
    throw mismatch("level mapping without a dimensional profile");
  if (a.mapping && !std::holds_alternative<NumericProfile>(a.profile))
    throw mismatch("indicator mapping on a non-numeric attribute");
  bool ok = std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, NumericProfile>)
          return is_numeric(a.category) && p.integral == (a.category == Category::integer);
        else if constexpr (std::is_same_v<P, CategoricalProfile>)
          return a.category == Category::categorical;
        else if constexpr (std::is_same_v<P, DatetimeProfile>)
          return a.category == Category::datetime;
        else if constexpr (std::is_same_v<P, TextualProfile>)
          return a.category == Category::textual;
        else if constexpr (std::is_same_v<P, BasicProfile>)
          return a.category == Category::unrecognized;
        else
          return false;
      },
      a.profile);
  if (!ok) throw mismatch("profile does not match category " + std::string(to_string(a.category)));
}

class GraphBuilder {
 public:
  explicit GraphBuilder(rdf::Graph& g) : g_(g) {}

  void add(const std::string& s, std::string_view p_local, rdf::Term o) {
    g_.add(rdf::Term::iri(s), rdf::dl(p_local), std::move(o));
  }
  void type(const std::string& s, std::string_view cls_local) {
    g_.add(rdf::Term::iri(s), rdf::rdf_type(), rdf::dl(cls_local));
  }
  void link(const std::string& s, std::string_view p_local, const std::string& o) {
    add(s, p_local, rdf::Term::iri(o));
  }

  void counted_list(const std::string& profile, std::string_view container_name,
                    std::string_view container_cls, std::string_view has_container,
                    std::string_view element_cls, std::string_view has_element,
                    std::string_view value_prop, std::string_view count_prop,
                    const std::vector<CountedValue>& items) {
    const std::string container = mint_iri(IriKind::profile_element, profile, container_name);
    type(container, container_cls);
    link(profile, has_container, container);
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::string e = element_iri(container, i);
      type(e, element_cls);
      link(container, has_element, e);
      add(e, value_prop, rdf::Term::literal(items[i].value));
      add(e, count_prop, count_literal(items[i].count));
    }
  }

  void profile(const std::string& domain, const DProfile& p) {
    const std::string node = mint_iri(IriKind::profile, domain, "dprofile");
    type(node, "DProfile");
    link(domain, "hasDProfile", node);
    for (std::size_t i = 0; i < p.elements.size(); ++i) {
      const std::string e = element_iri(node, i);
      type(e, "DProfileElement");
      link(node, "hasDProfileElement", e);
      link(e, "toMember", p.elements[i].member);
      add(e, "frequency", count_literal(p.elements[i].frequency));
    }
    const std::string others = mint_iri(IriKind::profile_element, node, "others");
    type(others, "DProfileElement");
    link(node, "hasDProfileElement", others);
    add(others, "others", count_literal(p.others));
  }

  std::string iprofile(const std::string& domain) {
    const std::string node = mint_iri(IriKind::profile, domain, "iprofile");
    type(node, "IProfile");
    link(domain, "hasIProfile", node);
    return node;
  }

  void profile(const std::string& domain, const NumericProfile& p) {
    const std::string node = iprofile(domain);
    add(node, "max", number_literal(p.max, p.integral));
    add(node, "min", number_literal(p.min, p.integral));
    add(node, "mean", decimal_literal(p.mean));
    add(node, "median", decimal_literal(p.median));
    add(node, "distinct", count_literal(p.distinct));
    add(node, "null", count_literal(p.null));
    const std::string dist = mint_iri(IriKind::profile_element, node, "distribution");
    type(dist, "Distribution");
    link(node, "hasDistribution", dist);
    for (std::size_t i = 0; i < p.distribution.elements.size(); ++i) {
      const auto& b = p.distribution.elements[i];
      const std::string e = element_iri(dist, i);
      type(e, "DistributionElement");
      link(dist, "hasDistributionElement", e);
      add(e, "start_range", decimal_literal(b.start_range));
      add(e, "end_range", decimal_literal(b.end_range));
      add(e, "count", count_literal(b.count));
    }
  }

  void profile(const std::string& domain, const CategoricalProfile& p) {
    const std::string node = iprofile(domain);
    add(node, "null", count_literal(p.null));
    counted_list(node, "categories", "Categories", "hasCategories", "CategoryElement",
                 "hasCategoryElement", "category", "categoryCount", p.categories);
  }

  void profile(const std::string& domain, const DatetimeProfile& p) {
    const std::string node = iprofile(domain);
    add(node, "distinct", count_literal(p.distinct));
    add(node, "null", count_literal(p.null));
    add(node, "minDate", date_literal(p.min_date));
    add(node, "maxDate", date_literal(p.max_date));
    const std::string years = mint_iri(IriKind::profile_element, node, "years");
    type(years, "Years");
    link(node, "hasYears", years);
    for (std::size_t i = 0; i < p.years.size(); ++i) {
      const std::string e = element_iri(years, i);
      type(e, "YearElement");
      link(years, "hasYearElement", e);
      add(e, "year", rdf::Term::literal(std::to_string(p.years[i].year), "integer"));
      add(e, "yearCount", count_literal(p.years[i].count));
    }
  }

  void profile(const std::string& domain, const TextualProfile& p) {
    const std::string node = iprofile(domain);
    add(node, "null", count_literal(p.null));
    add(node, "words", count_literal(p.words_total));
    counted_list(node, "words", "Words", "hasWords", "WordElement", "hasWordElement", "word",
                 "wordCount", p.words);
  }

  void profile(const std::string& domain, const BasicProfile& p) {
    const std::string node = iprofile(domain);
    add(node, "null", count_literal(p.null));
  }

 private:
  rdf::Graph& g_;
};

}  // namespace detail

/// Builds the metadata graph for one profiled source.
inline rdf::Graph build_graph(const SourceMetadata& meta,
                              const std::vector<AttributeInput>& attrs,
                              const rdf::PrefixMap& extra_prefixes = {}) {
  {
    std::set<std::string_view> names;
    for (const auto& a : attrs)
      if (!names.insert(a.name).second)
        throw Error(ErrorCode::DuplicateAttributeName, "duplicate attribute '" + a.name + "'");
  }
  for (const auto& a : attrs) detail::check_consistency(a);

  rdf::Graph g;
  g.prefixes = rdf::standard_prefixes();
  for (const auto& [p, iri] : extra_prefixes) g.add_prefix(p, iri);
  detail::GraphBuilder b(g);

  const std::string source = mint_iri(IriKind::source, {}, meta.name);
  const rdf::Term src = rdf::Term::iri(source);
  b.type(source, "Source");
  g.add(src, rdf::rdf_type(), rdf::Term::iri(rdf::iri_of(rdf::ns::void_, "Dataset")));
  b.add(source, "location", rdf::Term::literal(meta.location));
  b.add(source, "items", count_literal(meta.items));
  b.add(source, "domains", count_literal(attrs.size()));

  auto dc = [&](std::string_view prop, const std::optional<std::string>& v) {
    if (v) g.add(src, rdf::dcterms(prop), rdf::Term::literal(*v));
  };
  dc("title", meta.title);
  dc("description", meta.description);
  dc("format", meta.format);
  dc("creator", meta.creator);
  dc("publisher", meta.publisher);
  dc("license", meta.license);
  if (meta.date) {
    if (auto t = parse_timestamp(*meta.date))
      g.add(src, rdf::dcterms("date"), date_literal(*t));
    else
      g.add(src, rdf::dcterms("date"), rdf::Term::literal(*meta.date));
  }
  for (const auto& c : meta.contributors)
    g.add(src, rdf::dcterms("contributor"), rdf::Term::literal(c));
  for (const auto& s : meta.subjects) g.add(src, rdf::dcterms("subject"), rdf::Term::iri(s));

  for (const auto& a : attrs) {
    const std::string domain = mint_iri(IriKind::domain, source, a.name);
    b.type(domain, "Domain");
    b.link(source, "contains", domain);
    g.add(rdf::Term::iri(domain), rdf::dcterms("title"), rdf::Term::literal(a.name));
    b.add(domain, "attributeType", rdf::Term::literal(std::string(to_string(a.category))));
    if (a.mapping) b.link(domain, "mapTo", a.mapping->target);
    std::visit([&](const auto& p) { b.profile(domain, p); }, a.profile);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Reconstruction

struct AttributeRecord {
  std::string name;
  std::string iri;
  Category category = Category::unrecognized;
  /// dl:mapTo target, if any.
  std::optional<std::string> map_to;
  Profile profile;

  bool operator==(const AttributeRecord&) const = default;
};

struct SourceRecord {
  std::string iri;
  SourceMetadata meta;
  std::vector<AttributeRecord> attributes;  // sorted by name

  const AttributeRecord* find(std::string_view attribute) const {
    for (const auto& a : attributes)
      if (a.name == attribute) return &a;
    return nullptr;
  }
};

namespace detail {

class GraphReader {
 public:
  explicit GraphReader(const rdf::Graph& g) : g_(g) {}

  const rdf::Term* one(const rdf::Term& s, std::string_view dl_prop) const {
    return g_.object(s, rdf::dl(dl_prop));
  }
  std::vector<rdf::Term> all(const rdf::Term& s, std::string_view dl_prop) const {
    return g_.objects(s, rdf::dl(dl_prop));
  }

  [[noreturn]] void fail(const rdf::Term& s, std::string_view what) const {
    throw Error(ErrorCode::ShapeViolation, "<" + s.value + ">: " + std::string(what));
  }

  const rdf::Term& need(const rdf::Term& s, std::string_view dl_prop) const {
    const auto* t = one(s, dl_prop);
    if (!t) fail(s, "missing dl:" + std::string(dl_prop));
    return *t;
  }

  std::size_t count(const rdf::Term& s, std::string_view dl_prop) const {
    const auto& t = need(s, dl_prop);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(t.value.data(), t.value.data() + t.value.size(), v);
    if (ec != std::errc{} || ptr != t.value.data() + t.value.size())
      fail(s, "dl:" + std::string(dl_prop) + " is not a count");
    return v;
  }

  double number(const rdf::Term& s, std::string_view dl_prop) const {
    const auto& t = need(s, dl_prop);
    auto v = parse_number(t.value);
    if (!v) fail(s, "dl:" + std::string(dl_prop) + " is not a number");
    return *v;
  }

  Timestamp date(const rdf::Term& s, std::string_view dl_prop) const {
    const auto& t = need(s, dl_prop);
    auto v = parse_timestamp(t.value);
    if (!v) fail(s, "dl:" + std::string(dl_prop) + " is not a date");
    v->has_time = t.datatype == rdf::iri_of(rdf::ns::xsd, "dateTime");
    return *v;
  }

  std::vector<CountedValue> counted(const rdf::Term& profile, std::string_view has_container,
                                    std::string_view has_element, std::string_view value_prop,
                                    std::string_view count_prop) const {
    std::vector<CountedValue> out;
    const auto* container = one(profile, has_container);
    if (!container) return out;
    for (const auto& e : all(*container, has_element))
      out.push_back({need(e, value_prop).value, count(e, count_prop)});
    sort_counted(out);
    return out;
  }

  Profile read_profile(const rdf::Term& domain, Category category) const {
    if (const auto* d = one(domain, "hasDProfile")) {
      DProfile p;
      p.level = need(domain, "mapTo").value;
      for (const auto& e : all(*d, "hasDProfileElement")) {
        if (one(e, "others"))
          p.others = count(e, "others");
        else
          p.elements.push_back({need(e, "toMember").value, count(e, "frequency")});
      }
      std::sort(p.elements.begin(), p.elements.end(),
                [](const DProfileElement& a, const DProfileElement& b) {
                  return a.frequency != b.frequency ? a.frequency > b.frequency
                                                    : a.member < b.member;
                });
      return p;
    }
    const rdf::Term& node = need(domain, "hasIProfile");
    switch (category) {
      case Category::integer:
      case Category::decimal: {
        NumericProfile p;
        p.integral = category == Category::integer;
        p.max = number(node, "max");
        p.min = number(node, "min");
        p.mean = number(node, "mean");
        p.median = number(node, "median");
        p.distinct = count(node, "distinct");
        p.null = count(node, "null");
        if (const auto* dist = one(node, "hasDistribution")) {
          for (const auto& e : all(*dist, "hasDistributionElement"))
            p.distribution.elements.push_back(
                {number(e, "start_range"), number(e, "end_range"), count(e, "count")});
          std::sort(p.distribution.elements.begin(), p.distribution.elements.end(),
                    [](const DistributionElement& a, const DistributionElement& b) {
                      return std::tie(a.start_range, a.end_range) <
                             std::tie(b.start_range, b.end_range);
                    });
        }
        return p;
      }
      case Category::categorical: {
        CategoricalProfile p;
        p.null = count(node, "null");
        p.categories =
            counted(node, "hasCategories", "hasCategoryElement", "category", "categoryCount");
        return p;
      }
      case Category::datetime: {
        DatetimeProfile p;
        p.distinct = count(node, "distinct");
        p.null = count(node, "null");
        p.min_date = date(node, "minDate");
        p.max_date = date(node, "maxDate");
        if (const auto* years = one(node, "hasYears")) {
          for (const auto& e : all(*years, "hasYearElement")) {
            const auto& y = need(e, "year").value;
            p.years.push_back({std::stoi(y), count(e, "yearCount")});
          }
          std::sort(p.years.begin(), p.years.end(),
                    [](const YearCount& a, const YearCount& b) { return a.year < b.year; });
        }
        return p;
      }
      case Category::textual: {
        TextualProfile p;
        p.null = count(node, "null");
        p.words_total = count(node, "words");
        p.words = counted(node, "hasWords", "hasWordElement", "word", "wordCount");
        return p;
      }
      case Category::unrecognized:
        break;
    }
    return BasicProfile{count(node, "null")};
  }

 private:
  const rdf::Graph& g_;
};

}  // namespace detail

inline std::string source_iri(const rdf::Graph& g) {
  const rdf::Term src_cls = rdf::dl("Source");
  std::optional<std::string> found;
  for (const auto& t : g.triples)
    if (t.predicate == rdf::rdf_type() && t.object == src_cls) {
      if (found && *found != t.subject.value)
        throw Error(ErrorCode::ShapeViolation, "graph has more than one dl:Source");
      found = t.subject.value;
    }
  if (!found) throw Error(ErrorCode::ShapeViolation, "graph has no dl:Source");
  return *found;
}

/// Reads the source metadata and every attribute profile back from a graph
/// produced by build_graph.
inline SourceRecord read_source(const rdf::Graph& g) {
  detail::GraphReader r(g);
  SourceRecord rec;
  rec.iri = source_iri(g);
  const rdf::Term src = rdf::Term::iri(rec.iri);
  const std::string prefix = rdf::iri_of(rdf::ns::dl, "source/");
  if (rec.iri.rfind(prefix, 0) == 0) rec.meta.name = percent_decode(rec.iri.substr(prefix.size()));
  rec.meta.location = r.need(src, "location").value;
  rec.meta.items = r.count(src, "items");
  rec.meta.domains = r.count(src, "domains");
  auto dc = [&](std::string_view prop, std::optional<std::string>& slot) {
    if (const auto* t = g.object(src, rdf::dcterms(prop))) slot = t->value;
  };
  dc("title", rec.meta.title);
  dc("description", rec.meta.description);
  dc("format", rec.meta.format);
  dc("creator", rec.meta.creator);
  dc("publisher", rec.meta.publisher);
  dc("license", rec.meta.license);
  dc("date", rec.meta.date);
  for (const auto& t : g.objects(src, rdf::dcterms("contributor"))) rec.meta.contributors.push_back(t.value);
  for (const auto& t : g.objects(src, rdf::dcterms("subject"))) rec.meta.subjects.push_back(t.value);

  for (const auto& domain : r.all(src, "contains")) {
    AttributeRecord a;
    a.iri = domain.value;
    const auto* title = g.object(domain, rdf::dcterms("title"));
    if (!title) r.fail(domain, "missing dcterms:title");
    a.name = title->value;
    auto cat = category_from_string(r.need(domain, "attributeType").value);
    if (!cat) r.fail(domain, "unknown dl:attributeType");
    a.category = *cat;
    if (const auto* m = r.one(domain, "mapTo")) a.map_to = m->value;
    a.profile = r.read_profile(domain, a.category);
    rec.attributes.push_back(std::move(a));
  }
  std::sort(rec.attributes.begin(), rec.attributes.end(),
            [](const AttributeRecord& a, const AttributeRecord& b) { return a.name < b.name; });
  return rec;
}

}  // namespace mdprof
