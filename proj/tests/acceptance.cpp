// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "support.hpp"

using namespace mdprof;
using namespace testing_support;

#ifndef MDPROF_TEST_DATA
#define MDPROF_TEST_DATA "tests/data"
#endif
#ifndef MDPROF_CLI
#define MDPROF_CLI "mdprof"
#endif

namespace {

class Failures {
 public:
  void check(bool ok, const std::function<std::string()>& what) {
    ++checks_;
    if (!ok && messages_.size() < 20) messages_.push_back(what());
    if (!ok) ++failed_;
  }
  std::size_t checks() const { return checks_; }
  std::size_t failed() const { return failed_; }
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::size_t checks_ = 0, failed_ = 0;
  std::vector<std::string> messages_;
};

template <class T>
std::string show(const T& v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Shared corpus of random columns and their profiles

struct Sample {
  std::string label;
  Column column;
  Category category;
  Profile profile;
  std::optional<rdf::Graph> kg_graph;  // dimensional samples only
  std::string level;
};

Column non_empty(const std::function<Column()>& make) {
  for (;;) {
    Column c = make();
    if (!present(c).empty()) return c;
  }
}

std::vector<Sample> random_samples() {
  std::vector<Sample> out;
  const std::pair<Category, const char*> kinds[] = {{Category::integer, "integer"},
                                                    {Category::decimal, "decimal"},
                                                    {Category::categorical, "categorical"},
                                                    {Category::datetime, "datetime"},
                                                    {Category::textual, "textual"}};
  for (const auto& [cat, name] : kinds)
    for (std::uint64_t i = 0; i < 200; ++i) {
      Rng rng(1000 * (static_cast<std::uint64_t>(cat) + 1) + i);
      const std::size_t rows = 1 + rng.below(1000);
      Column c = non_empty([&] {
        switch (cat) {
          case Category::integer: return random_integer_column(rng, rows);
          case Category::decimal: return random_decimal_column(rng, rows);
          case Category::categorical: return random_categorical_column(rng, rows);
          case Category::datetime: return random_datetime_column(rng, rows);
          default: return random_textual_column(rng, rows);
        }
      });
      Profile p = profile_typed(parse_typed(c, cat));
      out.push_back({std::string(name) + " #" + std::to_string(i), std::move(c), cat, std::move(p), {}, {}});
    }
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(9000 + i);
    auto g = random_kg_graph(rng, 1 + rng.below(100));
    auto kg = KnowledgeGraph::from_graph(g);
    const std::string level = rng.chance(0.5) ? "http://example.org/kg/Alpha" : "http://example.org/kg/Beta";
    Column c = random_dimensional_column(rng, g, level, rng.below(1001));
    Profile p = profile_dimensional(c, Mapping{"dim", MappingTarget::level, level, 1.0}, kg);
    out.push_back({"dimensional #" + std::to_string(i), std::move(c), Category::categorical, std::move(p), g, level});
  }
  return out;
}

const std::vector<Sample>& samples() {
  static const std::vector<Sample> s = random_samples();
  return s;
}

// ---------------------------------------------------------------------------
// 1. Profiles equal brute-force recomputation

void compare(Failures& f, const Sample& s, const NumericProfile& p) {
  const auto o = numeric_oracle(s.column, 10);
  auto at = [&](const std::string& field) { return [=, &s] { return s.label + ": " + field; }; };
  f.check(p.min == o.min, at("min " + show(p.min) + " vs " + show(o.min)));
  f.check(p.max == o.max, at("max " + show(p.max) + " vs " + show(o.max)));
  f.check(rel_close(p.mean, o.mean), at("mean " + show(p.mean) + " vs " + show(o.mean)));
  f.check(rel_close(p.median, o.median), at("median " + show(p.median) + " vs " + show(o.median)));
  f.check(p.distinct == o.distinct, at("distinct"));
  f.check(p.null == o.null, at("null"));
  f.check(p.integral == (s.category == Category::integer), at("integral flag"));
  f.check(p.distribution.elements.size() == o.bin_counts.size(), at("bin count"));
  for (std::size_t i = 0; i < std::min(p.distribution.elements.size(), o.bin_counts.size()); ++i) {
    const auto& e = p.distribution.elements[i];
    f.check(e.count == o.bin_counts[i], at("bin " + std::to_string(i) + " count"));
    f.check(rel_close(e.start_range, o.bin_edges[i].first) && rel_close(e.end_range, o.bin_edges[i].second),
            at("bin " + std::to_string(i) + " range"));
  }
}

void compare(Failures& f, const Sample& s, const CategoricalProfile& p) {
  const auto expect = ranked(categorical_oracle(s.column));
  std::vector<std::pair<std::string, std::size_t>> got;
  for (const auto& c : p.categories) got.emplace_back(c.value, c.count);
  f.check(got == expect, [&] { return s.label + ": categories"; });
  f.check(p.null == nulls(s.column), [&] { return s.label + ": null"; });
}

void compare(Failures& f, const Sample& s, const DatetimeProfile& p) {
  const auto o = datetime_oracle(s.column);
  f.check(format_timestamp(p.min_date) == canonical_iso(o.min), [&] { return s.label + ": minDate"; });
  f.check(format_timestamp(p.max_date) == canonical_iso(o.max), [&] { return s.label + ": maxDate"; });
  f.check(p.distinct == o.distinct, [&] { return s.label + ": distinct"; });
  f.check(p.null == o.null, [&] { return s.label + ": null"; });
  std::map<int, std::size_t> years;
  for (const auto& y : p.years) years[y.year] = y.count;
  f.check(years == o.years, [&] { return s.label + ": years"; });
}

void compare(Failures& f, const Sample& s, const TextualProfile& p) {
  const auto counts = word_oracle(s.column, default_stopwords());
  const auto expect = ranked(counts);
  std::vector<std::pair<std::string, std::size_t>> got;
  for (const auto& w : p.words) got.emplace_back(w.value, w.count);
  std::size_t total = 0;
  for (const auto& [w, n] : counts) total += n;
  f.check(got == expect, [&] { return s.label + ": words"; });
  f.check(p.words_total == total, [&] { return s.label + ": words_total"; });
  f.check(p.null == nulls(s.column), [&] { return s.label + ": null"; });
}

void compare(Failures& f, const Sample& s, const DProfile& p) {
  const auto o = dimensional_oracle(s.column, *s.kg_graph, s.level);
  std::map<std::string, std::size_t> got;
  for (const auto& e : p.elements) got[e.member] += e.frequency;
  f.check(got == o.members, [&] { return s.label + ": member frequencies"; });
  f.check(p.others == o.others, [&] { return s.label + ": others " + show(p.others) + " vs " + show(o.others); });
  f.check(p.level == s.level, [&] { return s.label + ": level"; });
}

void compare(Failures& f, const Sample& s, const BasicProfile&) {
  f.check(false, [&] { return s.label + ": unexpected basic profile"; });
}

Failures profile_oracle() {
  Failures f;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& s : samples()) std::visit([&](const auto& p) { compare(f, s, p); }, s.profile);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  f.check(secs < 60.0, [&] { return "oracle comparison took " + show(secs) + " s"; });
  return f;
}

// ---------------------------------------------------------------------------
// 2. Conservation laws

void conserve(Failures& f, const std::string& label, std::size_t rows, const Profile& profile) {
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        std::size_t sum = 0;
        if constexpr (std::is_same_v<P, DProfile>) {
          for (const auto& e : p.elements) sum += e.frequency;
          f.check(sum + p.others == rows, [&] { return label + ": frequencies + others != rows"; });
        } else if constexpr (std::is_same_v<P, NumericProfile>) {
          for (const auto& e : p.distribution.elements) sum += e.count;
          f.check(sum == rows - p.null, [&] { return label + ": distribution != rows - null"; });
        } else if constexpr (std::is_same_v<P, CategoricalProfile>) {
          for (const auto& e : p.categories) sum += e.count;
          f.check(sum + p.null == rows, [&] { return label + ": categories + null != rows"; });
        } else if constexpr (std::is_same_v<P, DatetimeProfile>) {
          for (const auto& e : p.years) sum += e.count;
          f.check(sum == rows - p.null, [&] { return label + ": years != rows - null"; });
        } else if constexpr (std::is_same_v<P, TextualProfile>) {
          for (const auto& e : p.words) sum += e.count;
          f.check(p.words_total == sum, [&] { return label + ": words_total != sum(words)"; });
        } else {
          f.check(p.null <= rows, [&] { return label + ": null > rows"; });
        }
      },
      profile);
}

Failures conservation() {
  Failures f;
  for (const auto& s : samples()) conserve(f, s.label, s.column.cells.size(), s.profile);

  // Whole tables through the engine, including all-null and empty columns.
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(50000 + seed);
    auto g = random_kg_graph(rng, 30);
    auto kg = KnowledgeGraph::from_graph(g);
    auto src = random_source(rng, "c" + std::to_string(seed), g, kg);
    for (const auto& r : src.results)
      conserve(f, "table " + std::to_string(seed) + "/" + r.name, src.table.row_count, r.profile);
  }

  // Benchmark generators.
  const auto corpus = bench::word_corpus();
  auto kg = KnowledgeGraph::from_graph(bench::level_graph(2000));
  std::vector<std::string> members;
  for (std::size_t i = 0; i < 2000; ++i) members.push_back(bench::member_name(i));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto t = bench::gen_typed_source(5000, corpus, seed);
    for (std::size_t c = 0; c < t.columns.size(); ++c)
      conserve(f, "typed/" + t.columns[c].name, 5000,
               profile_typed(parse_typed(t.columns[c], bench::kTypedWorkloads[c])));
    for (double nu : {0.0, 0.3, 0.5}) {
      auto d = bench::gen_dimensional_source(5000, nu, members, seed);
      conserve(f, "dimensional/" + bench::format_noise(nu), 5000,
               profile_dimensional(d.columns[0], Mapping{"value", MappingTarget::level, bench::level_iri(), 1}, kg));
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// 3. Noise and containment

Failures noise_containment() {
  Failures f;
  const auto kg = KnowledgeGraph::from_graph(bench::level_graph(10000));
  std::vector<std::string> members;
  for (std::size_t i = 0; i < 10000; ++i) members.push_back(bench::member_name(i));
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
    for (int k = 0; k <= 5; ++k) {
      const double nu = k / 10.0;
      const std::string label = "seed " + std::to_string(seed) + " noise " + bench::format_noise(nu);
      auto t = bench::gen_dimensional_source(10000, nu, members, seed);
      std::set<std::string> distinct;
      for (const auto& c : t.columns[0].cells) distinct.insert(normalize_label(*c));
      auto m = discover_level_mapping(t.columns[0], kg);
      f.check(m.has_value(), [&] { return label + ": no mapping"; });
      if (!m) continue;
      const double resolution = 1.0 / static_cast<double>(distinct.size());
      f.check(std::fabs(m->score - (1.0 - nu)) <= resolution,
              [&] { return label + ": score " + show(m->score) + " resolution " + show(resolution); });
      auto p = profile_dimensional(t.columns[0], *m, kg);
      const auto expect = static_cast<std::size_t>(std::llround(nu * 10000));
      f.check(p.others == expect, [&] { return label + ": others " + show(p.others) + " != " + show(expect); });
    }
  return f;
}

// ---------------------------------------------------------------------------
// 4. Scaling properties

Failures scaling() {
  Failures f;
  bench::BenchConfig config;
  auto report = bench::run_benchmark(config, [](const bench::TimingRow& r) {
    std::printf("    %-11s %8zu %-11s mean %.6f s  std %.6f s\n", r.workload.c_str(), r.cardinality,
                r.parameter.c_str(), r.mean_s, r.std_s);
    std::fflush(stdout);
  });
  f.check(report.rows.size() == 3 * 6 + 3 * 5, [&] { return "unexpected row count " + show(report.rows.size()); });
  for (const auto& v : bench::check_properties(report)) f.check(false, [&] { return v; });

  std::map<std::string, std::map<std::size_t, double>> series;
  for (const auto& r : report.rows) series[r.workload + "/" + r.parameter][r.cardinality] = r.mean_s;
  for (const auto& [name, points] : series) {
    f.check(points.at(10000) < points.at(100000) && points.at(100000) < points.at(1000000),
            [&] { return name + ": mean time not strictly increasing"; });
    const double ratio = points.at(1000000) / points.at(10000);
    f.check(ratio < 300, [&] { return name + ": 1M/10k ratio " + show(ratio); });
  }
  const double clean = series.at("dimensional/0.0").at(1000000), noisy = series.at("dimensional/0.5").at(1000000);
  f.check(noisy <= clean, [&] { return "noise 0.5 at 1M took " + show(noisy) + " s vs " + show(clean) + " s"; });
  const double textual = series.at("typed/textual").at(1000000);
  for (const char* other : {"integer", "decimal", "categorical", "datetime"})
    f.check(series.at(std::string("typed/") + other).at(1000000) < textual,
            [&] { return std::string(other) + " is not faster than textual at 1M"; });
  return f;
}

// ---------------------------------------------------------------------------
// 5. RDF round trip and shapes

Failures rdf_round_trip() {
  Failures f;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(70000 + seed);
    auto g = random_kg_graph(rng, 25);
    auto kg = KnowledgeGraph::from_graph(g);
    auto src = random_source(rng, "source " + std::to_string(seed), g, kg);
    const std::string label = "source " + std::to_string(seed);
    for (auto syntax : {rdf::Syntax::turtle, rdf::Syntax::ntriples}) {
      auto back = rdf::parse_turtle(rdf::serialize(src.graph, syntax));
      f.check(back.triples == src.graph.triples, [&] {
        return label + (syntax == rdf::Syntax::turtle ? ": Turtle" : ": N-Triples") + " round trip differs";
      });
    }
    auto violations = validate_shape(src.graph);
    f.check(violations.empty(), [&] { return label + ": " + violations.front(); });
  }
  return f;
}

// ---------------------------------------------------------------------------
// 6. Catalog against a naive scan

Failures catalog() {
  Failures f;
  TempDir dir;
  Rng rng(424242);
  auto g = random_kg_graph(rng, 30);
  auto kg = KnowledgeGraph::from_graph(g);
  CatalogStore store(dir.path);
  NaiveCatalog naive;
  std::vector<RandomSource> sources;
  for (int i = 0; i < 50; ++i) {
    sources.push_back(random_source(rng, "source" + std::to_string(i), g, kg));
    store.register_graph(sources.back().graph);
    naive.graphs.push_back(sources.back().graph);
  }
  CatalogStore reopened(dir.path);
  f.check(reopened.entries().size() == 50, [&] { return "catalog holds " + show(reopened.entries().size()); });
  std::size_t non_trivial = 0;
  for (int i = 0; i < 30; ++i) {
    auto q = random_query(rng);
    std::string shown;
    for (const auto& c : q) shown += (shown.empty() ? "" : " and ") + c;
    auto got = reopened.find_sources(reopened.parse_query(q));
    auto expect = naive.find(q);
    non_trivial += !expect.empty() && expect.size() < 50;
    f.check(got == expect, [&] {
      return "query '" + shown + "': " + show(got.size()) + " sources vs " + show(expect.size());
    });
  }
  std::printf("    %zu of 30 queries select a proper non-empty subset\n", non_trivial);
  for (const auto& s : sources) {
    const auto iri = mint_iri(IriKind::source, {}, s.table.name);
    for (const auto& r : s.results)
      f.check(reopened.get_profile(iri, r.name) == r.profile,
              [&] { return s.table.name + "/" + r.name + ": get_profile differs"; });
  }
  return f;
}

// ---------------------------------------------------------------------------
// 7. Type inference on the generator columns

Failures type_inference() {
  Failures f;
  const auto corpus = bench::word_corpus();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto t = bench::gen_typed_source(10000, corpus, seed);
    for (const auto& c : t.columns) {
      auto got = infer_category(c);
      f.check(to_string(got) == c.name,
              [&] { return "seed " + show(seed) + ": " + c.name + " inferred as " + std::string(to_string(got)); });
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// 8. Determinism

struct Run {
  int status = -1;
  std::string output;
};

Run run_cli(const std::string& args) {
  Run r;
  FILE* p = ::popen((std::string(MDPROF_CLI) + " " + args + " 2>&1").c_str(), "r");
  if (!p) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.output.append(buf, n);
  const int st = ::pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Report rows without the two timing column pairs.
std::string stable_columns(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (cells.size() != 8) return "malformed report";
    out += cells[0] + "," + cells[1] + "," + cells[2] + "," + cells[7] + "\n";
  }
  return out;
}

Failures determinism() {
  Failures f;
  TempDir dir;
  const std::string data = MDPROF_TEST_DATA;
  std::vector<std::string> turtle;
  for (int run = 0; run < 2; ++run) {
    const auto out = dir.path / ("vehicles" + std::to_string(run) + ".ttl");
    auto r = run_cli("profile " + data + "/vehicles.csv --kg " + data + "/kg.ttl --threads 4 --out '" + out.string() +
                     "'");
    f.check(r.status == 0, [&] { return "profile run failed: " + r.output; });
    turtle.push_back(slurp(out));
  }
  f.check(!turtle[0].empty() && turtle[0] == turtle[1], [] { return "vehicles Turtle differs between runs"; });

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::string first;
    for (int run = 0; run < 2; ++run) {
      Rng rng(seed);
      auto g = random_kg_graph(rng, 20);
      auto kg = KnowledgeGraph::from_graph(g);
      auto text = rdf::to_turtle(random_source(rng, "d" + std::to_string(seed), g, kg).graph);
      if (run == 0)
        first = text;
      else
        f.check(text == first, [&] { return "random source " + show(seed) + " Turtle differs"; });
    }
  }

  std::vector<std::string> reports;
  for (int run = 0; run < 2; ++run) {
    const auto dump = dir.path / ("dump" + std::to_string(run));
    const auto report = dir.path / ("report" + std::to_string(run) + ".csv");
    auto r = run_cli("bench --cards 1000,5000 --iters 3 --members 500 --seed 7 --dump-dir '" + dump.string() +
                     "' -o '" + report.string() + "'");
    f.check(r.status == 0, [&] { return "bench run failed: " + r.output; });
    reports.push_back(stable_columns(slurp(report)));
  }
  f.check(reports[0] == reports[1] && reports[0] != "malformed report",
          [] { return "benchmark report differs outside the timing columns"; });
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path / "dump0")) {
    ++files;
    const auto other = dir.path / "dump1" / e.path().filename();
    f.check(slurp(e.path()) == slurp(other), [&] { return e.path().filename().string() + " differs between runs"; });
  }
  f.check(files == 1 + 2 * 6 + 2, [&] { return "expected 15 dumped files, found " + show(files); });
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Failures()>>> criteria{
      {"profile-oracle equivalence", profile_oracle},
      {"conservation suite", conservation},
      {"noise/containment exactness", noise_containment},
      {"scaling properties", scaling},
      {"RDF round trip and shape conformance", rdf_round_trip},
      {"catalog soundness", catalog},
      {"type-inference accuracy", type_inference},
      {"determinism", determinism}};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(n)) continue;
    const auto start = std::chrono::steady_clock::now();
    Failures f;
    std::string crash;
    try {
      f = criteria[i].second();
    } catch (const std::exception& e) {
      crash = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = crash.empty() && f.failed() == 0 && f.checks() > 0;
    failed += !ok;
    std::printf("AC%d %s  %s  (%zu checks, %zu failed, %.1f s)\n", n, ok ? "PASS" : "FAIL",
                criteria[i].first.c_str(), f.checks(), f.failed(), secs);
    if (!crash.empty()) std::printf("    exception: %s\n", crash.c_str());
    for (const auto& m : f.messages()) std::printf("    %s\n", m.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
