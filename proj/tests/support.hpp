#pragma once

// Random column generators and brute-force oracles shared by the unit and
// acceptance tests. Oracles re-derive every statistic from the raw cell
// strings with deliberately naive code.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <unistd.h>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mdprof/mdprof.hpp"

namespace testing_support {

using mdprof::Column;
using mdprof::Cell;

// ---------------------------------------------------------------------------
// Generators

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng); }
  long long range(long long lo, long long hi) { return std::uniform_int_distribution<long long>(lo, hi)(eng); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  bool chance(double p) { return std::bernoulli_distribution(p)(eng); }
};

inline Column with_nulls(Column c, Rng& rng, double p) {
  for (auto& cell : c.cells)
    if (rng.chance(p)) cell.reset();
  return c;
}

inline Column random_integer_column(Rng& rng, std::size_t rows) {
  Column c{"ints", {}};
  const long long lo = rng.range(-1000000, 1000), hi = lo + rng.range(0, 2000000);
  for (std::size_t i = 0; i < rows; ++i) c.cells.emplace_back(std::to_string(rng.range(lo, hi)));
  return with_nulls(std::move(c), rng, rng.real(0, 0.3));
}

inline Column random_decimal_column(Rng& rng, std::size_t rows) {
  Column c{"reals", {}};
  const double lo = rng.real(-1e4, 1e4), hi = lo + rng.real(0, 1e5);
  const int digits = static_cast<int>(rng.range(1, 6));
  char buf[64];
  for (std::size_t i = 0; i < rows; ++i) {
    std::snprintf(buf, sizeof buf, "%.*f", digits, rng.real(lo, hi));
    c.cells.emplace_back(buf);
  }
  c = with_nulls(std::move(c), rng, rng.real(0, 0.3));
  c.cells.push_back(std::string("0.5"));  // at least one non-integer
  return c;
}

inline Column random_categorical_column(Rng& rng, std::size_t rows) {
  static const char* labels[] = {"red", "green", "blue", "amber", "teal", "plum", "sand", "jade",
                                 "Red", "north", "south", "x y", "a,b", "", "NA?", "é"};
  Column c{"cats", {}};
  const std::size_t k = 1 + rng.below(std::size(labels));
  for (std::size_t i = 0; i < rows; ++i) c.cells.emplace_back(labels[rng.below(k)]);
  return with_nulls(std::move(c), rng, rng.real(0, 0.3));
}

/// ISO dates (or date-times, chosen per column) between 1900 and 2099.
inline Column random_datetime_column(Rng& rng, std::size_t rows) {
  Column c{"dates", {}};
  const bool with_time = rng.chance(0.5);
  char buf[64];
  for (std::size_t i = 0; i < rows; ++i) {
    int y = static_cast<int>(rng.range(1900, 2099)), m = static_cast<int>(rng.range(1, 12));
    static const int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    int dmax = mdays[m - 1] + (m == 2 && leap ? 1 : 0);
    int d = static_cast<int>(rng.range(1, dmax));
    if (with_time)
      std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d", y, m, d, static_cast<int>(rng.range(0, 23)),
                    static_cast<int>(rng.range(0, 59)), static_cast<int>(rng.range(0, 59)));
    else
      std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
    c.cells.emplace_back(buf);
  }
  return with_nulls(std::move(c), rng, rng.real(0, 0.3));
}

inline Column random_textual_column(Rng& rng, std::size_t rows) {
  static const char* words[] = {"the", "a", "of", "Car", "red", "bike", "road", "Milan", "traffic", "jam",
                                "and", "is", "blue", "slow", "fast", "caffè", "x2", "it's", "über", "NIGHT"};
  static const char* seps[] = {" ", "  ", ", ", ". ", "!", "\t", " - ", "/", "(", ")"};
  Column c{"text", {}};
  for (std::size_t i = 0; i < rows; ++i) {
    std::string s;
    const std::size_t n = rng.below(8);
    for (std::size_t w = 0; w < n; ++w) {
      if (w) s += seps[rng.below(std::size(seps))];
      s += words[rng.below(std::size(words))];
    }
    c.cells.emplace_back(std::move(s));
  }
  return with_nulls(std::move(c), rng, rng.real(0, 0.3));
}

/// A KG with two levels; members carry an rdfs:label and a local name.
inline mdprof::rdf::Graph random_kg_graph(Rng& rng, std::size_t members_per_level) {
  using namespace mdprof::rdf;
  Graph g;
  g.add_prefix("kg", "http://example.org/kg/");
  const Term label = Term::iri(iri_of(ns::rdfs, "label"));
  g.add(Term::iri("http://example.org/kg/VAT"), rdf_type(), kpi("Indicator"));
  for (const char* level : {"Alpha", "Beta"}) {
    Term l = Term::iri(std::string("http://example.org/kg/") + level);
    g.add(l, rdf_type(), kpi("Level"));
    for (std::size_t i = 0; i < members_per_level; ++i) {
      std::string local = std::string(level) + "M" + std::to_string(i);
      Term m = Term::iri("http://example.org/kg/" + local);
      g.add(m, rdf_type(), kpi("Member"));
      g.add(m, kpi("inLevel"), l);
      if (rng.chance(0.7)) g.add(m, label, Term::literal(std::string(level) + " member " + std::to_string(i)));
    }
  }
  return g;
}

/// Cells drawn from member labels and local names (with case and padding
/// noise), plus unmatched tokens and nulls.
inline Column random_dimensional_column(Rng& rng, const mdprof::rdf::Graph& kg, const std::string& level,
                                        std::size_t rows) {
  using namespace mdprof::rdf;
  std::vector<std::string> names;
  const Term label = Term::iri(iri_of(ns::rdfs, "label"));
  for (const auto& t : kg.triples)
    if (t.predicate == kpi("inLevel") && t.object.value == level) {
      names.emplace_back(local_name(t.subject.value));
      for (const auto& l : kg.objects(t.subject, label)) names.push_back(l.value);
    }
  Column c{"dim", {}};
  const double noise = rng.real(0, 0.6);
  for (std::size_t i = 0; i < rows; ++i) {
    if (rng.chance(noise)) {
      c.cells.emplace_back("unknown" + std::to_string(rng.below(50)));
      continue;
    }
    std::string v = names[rng.below(names.size())];
    if (rng.chance(0.2)) std::transform(v.begin(), v.end(), v.begin(), ::toupper);
    if (rng.chance(0.1)) v = "  " + v + " ";
    c.cells.emplace_back(std::move(v));
  }
  return with_nulls(std::move(c), rng, rng.real(0, 0.2));
}

// ---------------------------------------------------------------------------
// Oracles

inline std::vector<std::string> present(const Column& c) {
  std::vector<std::string> out;
  for (const auto& cell : c.cells)
    if (cell) out.push_back(*cell);
  return out;
}

inline std::size_t nulls(const Column& c) { return c.cells.size() - present(c).size(); }

struct NumericOracle {
  double min = 0, max = 0, mean = 0, median = 0;
  std::size_t distinct = 0, null = 0;
  std::vector<std::size_t> bin_counts;
  std::vector<std::pair<double, double>> bin_edges;
};

inline NumericOracle numeric_oracle(const Column& c, std::size_t bins) {
  NumericOracle o;
  std::vector<double> v;
  for (const auto& s : present(c)) v.push_back(std::strtod(s.c_str(), nullptr));
  o.null = nulls(c);
  o.min = *std::min_element(v.begin(), v.end());
  o.max = *std::max_element(v.begin(), v.end());
  double sum = 0;
  for (double x : v) sum += x;
  o.mean = sum / static_cast<double>(v.size());
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  o.median = n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2;
  o.distinct = std::set<double>(v.begin(), v.end()).size();
  if (o.min == o.max) {
    o.bin_edges = {{o.min, o.max}};
    o.bin_counts = {v.size()};
    return o;
  }
  const double w = (o.max - o.min) / static_cast<double>(bins);
  for (std::size_t i = 0; i < bins; ++i)
    o.bin_edges.emplace_back(o.min + static_cast<double>(i) * w,
                             i + 1 == bins ? o.max : o.min + static_cast<double>(i + 1) * w);
  o.bin_counts.assign(bins, 0);
  for (double x : v)
    for (std::size_t i = 0; i < bins; ++i) {
      const bool last = i + 1 == bins;
      if (x >= o.bin_edges[i].first && (x < o.bin_edges[i].second || (last && x <= o.bin_edges[i].second))) {
        ++o.bin_counts[i];
        break;
      }
    }
  return o;
}

/// Sorted by count descending, then value.
inline std::vector<std::pair<std::string, std::size_t>> ranked(const std::map<std::string, std::size_t>& counts) {
  std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

inline std::map<std::string, std::size_t> categorical_oracle(const Column& c) {
  std::map<std::string, std::size_t> m;
  for (const auto& s : present(c)) ++m[s];
  return m;
}

struct DatetimeOracle {
  std::string min, max;  // canonical ISO text
  std::size_t distinct = 0, null = 0;
  std::map<int, std::size_t> years;
};

/// Works on the generator's fixed-width ISO strings, whose lexicographic
/// order is chronological.
inline DatetimeOracle datetime_oracle(const Column& c) {
  DatetimeOracle o;
  auto v = present(c);
  o.null = nulls(c);
  std::set<std::string> d(v.begin(), v.end());
  o.distinct = d.size();
  o.min = *d.begin();
  o.max = *d.rbegin();
  for (const auto& s : v) ++o.years[std::atoi(s.substr(0, 4).c_str())];
  return o;
}

inline std::string canonical_iso(const std::string& s) { return s.size() == 10 ? s : s + "Z"; }

inline bool token_byte(unsigned char ch) {
  return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch >= 0x80;
}

inline std::map<std::string, std::size_t> word_oracle(const Column& c, const mdprof::StopwordSet& stop) {
  std::map<std::string, std::size_t> m;
  for (const auto& s : present(c)) {
    std::string cur;
    auto flush = [&] {
      if (!cur.empty() && !stop.count(cur)) ++m[cur];
      cur.clear();
    };
    for (unsigned char ch : s) {
      if (token_byte(ch))
        cur += (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a') : static_cast<char>(ch);
      else
        flush();
    }
    flush();
  }
  return m;
}

struct DimensionalOracle {
  std::map<std::string, std::size_t> members;  // member IRI -> frequency
  std::size_t others = 0;
};

/// Matches trimmed, lowercased cells against labels and local names read
/// straight from the triples.
inline DimensionalOracle dimensional_oracle(const Column& c, const mdprof::rdf::Graph& kg, const std::string& level) {
  using namespace mdprof::rdf;
  auto norm = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r\n"), e = s.find_last_not_of(" \t\r\n");
    s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    for (auto& ch : s)
      if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    return s;
  };
  std::map<std::string, std::set<std::string>> by_name;
  const Term label = Term::iri(iri_of(ns::rdfs, "label"));
  for (const auto& t : kg.triples)
    if (t.predicate == kpi("inLevel") && t.object.value == level) {
      by_name[norm(std::string(local_name(t.subject.value)))].insert(t.subject.value);
      for (const auto& l : kg.objects(t.subject, label)) by_name[norm(l.value)].insert(t.subject.value);
    }
  DimensionalOracle o;
  for (const auto& cell : c.cells) {
    if (!cell) {
      ++o.others;
      continue;
    }
    auto it = by_name.find(norm(*cell));
    if (it == by_name.end() || it->second.empty())
      ++o.others;
    else
      ++o.members[*it->second.begin()];
  }
  return o;
}

/// A small random table of mixed columns, profiled against `kg` and turned
/// into a metadata graph.
struct RandomSource {
  mdprof::Table table;
  std::vector<mdprof::AttributeResult> results;
  mdprof::rdf::Graph graph;
};

inline RandomSource random_source(Rng& rng, const std::string& name, const mdprof::rdf::Graph& kg_graph,
                                  const mdprof::KnowledgeGraph& kg) {
  RandomSource out;
  const std::size_t rows = rng.chance(0.05) ? 0 : 1 + rng.below(80);
  auto& t = out.table;
  t.name = name;
  t.row_count = rows;
  const std::size_t n = 1 + rng.below(7);
  for (std::size_t i = 0; i < n; ++i) {
    Column c;
    switch (rng.below(7)) {
      case 0: c = random_integer_column(rng, rows); break;
      case 1: c = random_decimal_column(rng, rows); c.cells.pop_back(); break;
      case 2: c = random_categorical_column(rng, rows); break;
      case 3: c = random_datetime_column(rng, rows); break;
      case 4: c = random_textual_column(rng, rows); break;
      case 5: c = random_dimensional_column(rng, kg_graph, rng.chance(0.5) ? "http://example.org/kg/Alpha" : "http://example.org/kg/Beta", rows); break;
      default: c.cells.assign(rows, std::nullopt); break;
    }
    c.name = (i == 0 && rng.chance(0.3) ? std::string("VAT") : "col " + std::to_string(i));
    t.columns.push_back(std::move(c));
  }
  mdprof::EngineOptions opts;
  opts.kg = &kg;
  out.results = mdprof::profile_table(t, opts);
  mdprof::SourceMetadata meta;
  meta.name = name;
  meta.location = "/data/" + name + ".csv";
  meta.items = rows;
  meta.format = "csv";
  if (rng.chance(0.5)) meta.title = "Source \"" + name + "\"\nline two";
  if (rng.chance(0.5)) meta.creator = "caffè ünd co";
  if (rng.chance(0.3)) meta.date = "2023-04-0" + std::to_string(1 + rng.below(9));
  if (rng.chance(0.3)) meta.contributors = {"ann", "bob"};
  if (rng.chance(0.3)) meta.subjects = {"http://example.org/topic/traffic"};
  out.graph = mdprof::build_graph(meta, mdprof::to_inputs(out.results), {{"kg", "http://example.org/kg/"}});
  return out;
}

/// Answers a query clause list by scanning raw triples of every graph.
/// Clauses are the textual `key op value` forms; prefixed names use kg:.
struct NaiveCatalog {
  std::vector<mdprof::rdf::Graph> graphs;

  static bool cmp(double a, const std::string& op, double b) {
    if (op == "=") return a == b;
    if (op == "!=") return a != b;
    if (op == "<") return a < b;
    if (op == "<=") return a <= b;
    if (op == ">") return a > b;
    return a >= b;
  }

  static std::string dl_iri(const std::string& local) { return "http://kdmg.dii.univpm.it/dl/" + local; }

  static std::vector<std::string> values(const mdprof::rdf::Graph& g, const std::string& s, const std::string& p) {
    std::vector<std::string> out;
    for (const auto& t : g.triples)
      if (t.subject.value == s && t.predicate.value == p) out.push_back(t.object.value);
    return out;
  }

  static bool holds(const mdprof::rdf::Graph& g, const std::string& src, const std::string& clause) {
    std::string key, op, value;
    for (const char* o : {"!=", ">=", "<=", "=", ">", "<"}) {
      auto pos = clause.find(o);
      if (pos == std::string::npos) continue;
      key = clause.substr(0, pos), op = o, value = clause.substr(pos + std::string(o).size());
      break;
    }
    if (value.rfind("kg:", 0) == 0) value = "http://example.org/kg/" + value.substr(3);
    if (value.front() == '<') value = value.substr(1, value.size() - 2);
    const bool want = op == "=";
    std::vector<std::string> domains = values(g, src, dl_iri("contains"));
    if (key == "level" || key == "indicator" || key == "mapTo") {
      bool found = false;
      for (const auto& d : domains)
        for (const auto& target : values(g, d, dl_iri("mapTo"))) {
          const bool dim = !values(g, d, dl_iri("hasDProfile")).empty();
          if (target == value && (key == "mapTo" || dim == (key == "level"))) found = true;
        }
      return found == want;
    }
    if (key == "category") {
      bool found = false;
      for (const auto& d : domains)
        for (const auto& c : values(g, d, dl_iri("attributeType"))) found |= c == value;
      return found == want;
    }
    const double number = std::strtod(value.c_str(), nullptr);
    if (key == "items") return cmp(std::strtod(values(g, src, dl_iri("items")).at(0).c_str(), nullptr), op, number);
    if (key == "domains") return cmp(static_cast<double>(domains.size()), op, number);
    const auto open = key.find('(');
    const std::string stat = key.substr(0, open), attr = key.substr(open + 1, key.size() - open - 2);
    for (const auto& d : domains) {
      if (values(g, d, "http://purl.org/dc/terms/title") != std::vector<std::string>{attr}) continue;
      std::vector<std::string> found;
      if (stat == "others") {
        for (const auto& p : values(g, d, dl_iri("hasDProfile")))
          for (const auto& e : values(g, p, dl_iri("hasDProfileElement")))
            for (const auto& v : values(g, e, dl_iri("others"))) found.push_back(v);
      } else {
        for (const auto& p : values(g, d, dl_iri("hasIProfile")))
          for (const auto& v : values(g, p, dl_iri(stat))) found.push_back(v);
      }
      return found.size() == 1 && cmp(std::strtod(found[0].c_str(), nullptr), op, number);
    }
    return false;
  }

  std::vector<std::string> find(const std::vector<std::string>& clauses) const {
    std::set<std::string> out;
    for (const auto& g : graphs) {
      std::string src;
      for (const auto& t : g.triples)
        if (t.predicate.value == "http://www.w3.org/1999/02/22-rdf-syntax-ns#type" && t.object.value == dl_iri("Source"))
          src = t.subject.value;
      bool ok = true;
      for (const auto& c : clauses) ok = ok && holds(g, src, c);
      if (ok) out.insert(src);
    }
    return {out.begin(), out.end()};
  }
};

/// One to three clauses over the attributes random_source produces.
inline std::vector<std::string> random_query(Rng& rng) {
  static const char* ops[] = {"=", "!=", "<", "<=", ">", ">="};
  static const char* stats[] = {"max", "min", "mean", "median", "distinct", "null", "words", "others"};
  std::vector<std::string> q;
  const std::size_t n = 1 + rng.below(3);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string eq = rng.chance(0.7) ? "=" : "!=";
    switch (rng.below(7)) {
      case 0: q.push_back("level" + eq + (rng.chance(0.5) ? "kg:Alpha" : "kg:Beta")); break;
      case 1: q.push_back("indicator" + eq + "kg:VAT"); break;
      case 2: q.push_back("mapTo" + eq + "<http://example.org/kg/Alpha>"); break;
      case 3: {
        static const char* cats[] = {"integer", "decimal", "categorical", "datetime", "textual", "unrecognized"};
        q.push_back("category" + eq + cats[rng.below(6)]);
        break;
      }
      case 4: q.push_back(std::string("items") + ops[rng.below(6)] + std::to_string(rng.below(80))); break;
      case 5: q.push_back(std::string("domains") + ops[rng.below(6)] + std::to_string(1 + rng.below(6))); break;
      default: {
        const std::string attr = rng.chance(0.3) ? "VAT" : "col " + std::to_string(rng.below(7));
        const double v = rng.chance(0.5) ? static_cast<double>(rng.below(40)) : rng.real(-1e4, 1e5);
        q.push_back(std::string(stats[rng.below(8)]) + "(" + attr + ")" + ops[rng.below(6)] + std::to_string(v));
      }
    }
  }
  return q;
}

inline bool rel_close(double a, double b, double tol = 1e-9) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

/// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("mdprof-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace testing_support
