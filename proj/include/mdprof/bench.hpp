#pragma once

// Synthetic workloads and the timing harness. Every iteration regenerates its
// source from a seed derived from (seed, workload, cardinality, parameter,
// iteration), so reports are reproducible apart from the measured times.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "mdprof/error.hpp"
#include "mdprof/ingest.hpp"
#include "mdprof/kg.hpp"
#include "mdprof/datetime.hpp"
#include "mdprof/profiler.hpp"
#include "mdprof/rdf_model.hpp"
#include "mdprof/rdf_write.hpp"
#include "mdprof/stopwords.hpp"
#include "mdprof/typing.hpp"

namespace mdprof::bench {

inline constexpr std::string_view kBenchNamespace = "http://example.org/bench/";

// ---------------------------------------------------------------------------
// Fixtures

/// Stopwords followed by pronounceable pseudo-words (two or three
/// consonant-vowel syllables), in a fixed order.
inline std::vector<std::string> word_corpus(std::size_t size = 83740) {
  static constexpr std::string_view consonants = "bcdfghjklmnprstvwzqx";
  static constexpr std::string_view vowels = "aeiou";
  std::vector<std::string> out;
  out.reserve(size);
  std::unordered_set<std::string> seen;
  for (auto w : kEnglishStopwords) {
    if (out.size() == size) return out;
    if (seen.emplace(w).second) out.emplace_back(w);
  }
  std::vector<std::string> syllables;
  for (char c : consonants)
    for (char v : vowels) syllables.push_back(std::string{c, v});
  const std::size_t s = syllables.size();
  for (std::size_t len = 2; out.size() < size; ++len) {
    std::size_t total = 1;
    for (std::size_t k = 0; k < len; ++k) total *= s;
    for (std::size_t n = 0; n < total && out.size() < size; ++n) {
      std::string w;
      for (std::size_t k = 0, r = n; k < len; ++k, r /= s) w += syllables[r % s];
      if (seen.insert(w).second) out.push_back(std::move(w));
    }
  }
  return out;
}

inline std::string member_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "member%05zu", i);
  return buf;
}

/// A single-level knowledge graph whose members are named member00000...
inline rdf::Graph level_graph(std::size_t members) {
  rdf::Graph g;
  g.prefixes = rdf::standard_prefixes();
  g.add_prefix("bk", std::string(kBenchNamespace));
  const std::string ns(kBenchNamespace);
  const rdf::Term level = rdf::Term::iri(ns + "Level");
  const rdf::Term in_level = rdf::kpi("inLevel");
  g.add(level, rdf::rdf_type(), rdf::kpi("Level"));
  for (std::size_t i = 0; i < members; ++i) {
    rdf::Term m = rdf::Term::iri(ns + member_name(i));
    g.add(m, rdf::rdf_type(), rdf::kpi("Member"));
    g.add(m, in_level, level);
  }
  return g;
}

inline std::string level_iri() { return std::string(kBenchNamespace) + "Level"; }

// ---------------------------------------------------------------------------
// Generators

inline std::mt19937_64 make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> salt = {}) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (auto s : salt) {
    words.push_back(static_cast<std::uint32_t>(s));
    words.push_back(static_cast<std::uint32_t>(s >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

/// One column of `card` cells. Exactly round(noise * card) cells hold tokens
/// that are not member labels; the rest are drawn with replacement from
/// `members`. The number of distinct noise tokens is chosen so that the share
/// of distinct values that are members is as close to 1 - noise as possible.
inline Table gen_dimensional_source(std::size_t card, double noise,
                                    std::span<const std::string> members, std::uint64_t seed) {
  if (members.empty()) throw Error(ErrorCode::InvalidConfig, "member set is empty");
  if (!(noise >= 0.0 && noise <= 1.0)) throw Error(ErrorCode::InvalidConfig, "noise must be in [0,1]");
  auto rng = make_rng(seed);
  const auto n_noise = static_cast<std::size_t>(std::llround(noise * static_cast<double>(card)));
  const std::size_t n_members = card - n_noise;

  Column col;
  col.name = "value";
  col.cells.reserve(card);
  std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
  std::vector<bool> used(members.size(), false);
  std::size_t distinct_members = 0;
  for (std::size_t i = 0; i < n_members; ++i) {
    auto k = pick(rng);
    if (!used[k]) {
      used[k] = true;
      ++distinct_members;
    }
    col.cells.emplace_back(members[k]);
  }

  std::size_t distinct_noise = 0;
  if (n_noise > 0) {
    const double target = distinct_members == 0
                              ? static_cast<double>(n_noise)
                              : noise * static_cast<double>(distinct_members) / (1.0 - noise);
    distinct_noise = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(target)), 1, n_noise);
  }
  std::unordered_set<std::string> taken;
  for (const auto& m : members) taken.insert(normalize_label(m));
  std::vector<std::string> tokens;
  tokens.reserve(distinct_noise);
  for (std::size_t i = 0; tokens.size() < distinct_noise; ++i) {
    std::string t = "~noise" + std::to_string(i);
    if (!taken.count(normalize_label(t))) tokens.push_back(std::move(t));
  }
  std::uniform_int_distribution<std::size_t> pick_noise(0, distinct_noise ? distinct_noise - 1 : 0);
  for (std::size_t i = 0; i < n_noise; ++i)
    col.cells.emplace_back(i < distinct_noise ? tokens[i] : tokens[pick_noise(rng)]);
  std::shuffle(col.cells.begin(), col.cells.end(), rng);

  Table t;
  t.name = "dimensional";
  t.row_count = card;
  t.columns.push_back(std::move(col));
  return t;
}

inline constexpr std::array<std::string_view, 4> kCategories{"alpha", "beta", "gamma", "delta"};
inline constexpr int kFirstYear = 1954;
inline constexpr int kYearSpan = 70;

/// Five columns named after their category: integer, decimal, categorical,
/// datetime, textual.
inline Table gen_typed_source(std::size_t card, std::span<const std::string> corpus,
                              std::uint64_t seed) {
  if (corpus.empty()) throw Error(ErrorCode::InvalidConfig, "word corpus is empty");
  auto rng = make_rng(seed);
  Table t;
  t.name = "typed";
  t.row_count = card;
  for (auto name : {"integer", "decimal", "categorical", "datetime", "textual"}) {
    Column c;
    c.name = name;
    c.cells.reserve(card);
    t.columns.push_back(std::move(c));
  }
  std::uniform_int_distribution<std::uint64_t> ints(0, card);
  std::uniform_real_distribution<double> reals(0.0, static_cast<double>(card));
  std::uniform_int_distribution<std::size_t> cats(0, kCategories.size() - 1);
  const std::int64_t start = *mdprof::detail::civil_seconds(kFirstYear, 1, 1, 0, 0, 0);
  const std::int64_t stop = *mdprof::detail::civil_seconds(kFirstYear + kYearSpan, 1, 1, 0, 0, 0);
  std::uniform_int_distribution<std::int64_t> secs(start, stop - 1);
  std::uniform_int_distribution<std::size_t> words(0, corpus.size() - 1);
  char buf[64];
  for (std::size_t r = 0; r < card; ++r) {
    t.columns[0].cells.emplace_back(std::to_string(ints(rng)));
    std::snprintf(buf, sizeof buf, "%.5f", reals(rng));
    t.columns[1].cells.emplace_back(buf);
    t.columns[2].cells.emplace_back(std::string(kCategories[cats(rng)]));
    t.columns[3].cells.emplace_back(format_timestamp(Timestamp{secs(rng), true}));
    std::string text;
    for (int w = 0; w < 5; ++w) {
      if (w) text += ' ';
      text += corpus[words(rng)];
    }
    t.columns[4].cells.emplace_back(std::move(text));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Harness

struct BenchConfig {
  std::vector<std::size_t> cardinalities{10'000, 100'000, 1'000'000};
  std::vector<double> noise{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::size_t iterations = 10;
  std::uint64_t seed = 42;
  std::size_t bins = 10;
  std::size_t level_members = 10'000;
  bool dimensional = true;
  bool typed = true;
  /// Write the warm-up iteration's generated sources and the KG here.
  std::optional<std::filesystem::path> dump_dir;

  void validate() const {
    if (iterations < 1) throw Error(ErrorCode::InvalidConfig, "iterations must be >= 1");
    if (bins < 1) throw Error(ErrorCode::InvalidConfig, "bins must be >= 1");
    if (level_members < 1) throw Error(ErrorCode::InvalidConfig, "level must have members");
    for (double v : noise)
      if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::InvalidConfig, "noise must be in [0,1]");
    for (auto c : cardinalities)
      if (c < 1) throw Error(ErrorCode::InvalidConfig, "cardinality must be >= 1");
  }
};

struct TimingRow {
  std::string workload;   // dimensional | typed
  std::size_t cardinality = 0;
  std::string parameter;  // noise level or category
  double mean_s = 0, std_s = 0;
  /// Mapping discovery, timed separately; dimensional rows only.
  std::optional<double> mapping_mean_s, mapping_std_s;
  /// FNV-1a over the profiles computed in the timed iterations.
  std::uint64_t digest = 0;
};

struct TimingReport {
  std::vector<TimingRow> rows;

  const TimingRow* find(std::string_view workload, std::size_t card, std::string_view param) const {
    for (const auto& r : rows)
      if (r.workload == workload && r.cardinality == card && r.parameter == param) return &r;
    return nullptr;
  }
};

inline std::string format_noise(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

namespace detail {

class Fnv {
 public:
  void bytes(std::string_view s) {
    for (unsigned char c : s) h_ = (h_ ^ c) * 1099511628211ull;
    h_ = (h_ ^ 0xff) * 1099511628211ull;
  }
  void number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    bytes(buf);
  }
  void count(std::size_t n) { bytes(std::to_string(n)); }
  std::uint64_t value() const noexcept { return h_; }

 private:
  std::uint64_t h_ = 14695981039346656037ull;
};

inline void digest_profile(Fnv& f, const Profile& profile) {
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, DProfile>) {
          f.bytes(p.level);
          f.count(p.others);
          for (const auto& e : p.elements) f.bytes(e.member), f.count(e.frequency);
        } else if constexpr (std::is_same_v<P, NumericProfile>) {
          for (double v : {p.max, p.min, p.mean, p.median}) f.number(v);
          f.count(p.distinct), f.count(p.null);
          for (const auto& e : p.distribution.elements)
            f.number(e.start_range), f.number(e.end_range), f.count(e.count);
        } else if constexpr (std::is_same_v<P, CategoricalProfile>) {
          f.count(p.null);
          for (const auto& c : p.categories) f.bytes(c.value), f.count(c.count);
        } else if constexpr (std::is_same_v<P, DatetimeProfile>) {
          f.count(p.distinct), f.count(p.null);
          f.bytes(format_timestamp(p.min_date)), f.bytes(format_timestamp(p.max_date));
          for (const auto& y : p.years) f.count(static_cast<std::size_t>(y.year)), f.count(y.count);
        } else if constexpr (std::is_same_v<P, TextualProfile>) {
          f.count(p.null), f.count(p.words_total);
          for (const auto& w : p.words) f.bytes(w.value), f.count(w.count);
        } else {
          f.count(p.null);
        }
      },
      profile);
}

struct Stats {
  double mean = 0, std = 0;
};

inline Stats summarize(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  double sum = 0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

template <typename Fn>
double time_it(Fn&& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

inline void dump(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::StorageError, "cannot write " + path.string());
  out << text;
}

}  // namespace detail

inline constexpr std::array<Category, 5> kTypedWorkloads{
    Category::integer, Category::decimal, Category::categorical, Category::datetime,
    Category::textual};

/// Runs every configured workload sequentially. Iteration 0 is a warm-up and
/// is excluded from the statistics. `progress` receives each finished row.
inline TimingReport run_benchmark(const BenchConfig& config,
                                  const std::function<void(const TimingRow&)>& progress = {}) {
  config.validate();
  TimingReport report;
  ProfileOptions popts;
  popts.bins = config.bins;
  TypingConfig tcfg;
  const std::size_t total_iters = config.iterations + 1;
  if (config.dump_dir) std::filesystem::create_directories(*config.dump_dir);

  if (config.dimensional) {
    rdf::Graph g = level_graph(config.level_members);
    if (config.dump_dir) detail::dump(*config.dump_dir / "bench_kg.ttl", rdf::to_turtle(g));
    const KnowledgeGraph kg = KnowledgeGraph::from_graph(g);
    std::vector<std::string> members;
    members.reserve(config.level_members);
    for (std::size_t i = 0; i < config.level_members; ++i) members.push_back(member_name(i));

    for (auto card : config.cardinalities)
      for (std::size_t ni = 0; ni < config.noise.size(); ++ni) {
        const double noise = config.noise[ni];
        std::vector<double> times, map_times;
        detail::Fnv fnv;
        for (std::size_t it = 0; it < total_iters; ++it) {
          Table t = gen_dimensional_source(card, noise, members,
                                           make_rng(config.seed, {1, card, ni, it})());
          if (it == 0 && config.dump_dir)
            detail::dump(*config.dump_dir / ("dimensional_" + std::to_string(card) + "_" +
                                             format_noise(noise) + ".csv"),
                         write_csv(t));
          std::optional<Mapping> mapping;
          double mt = detail::time_it([&] { mapping = discover_level_mapping(t.columns[0], kg); });
          Mapping m = mapping.value_or(Mapping{"value", MappingTarget::level, level_iri(), 0.0});
          DProfile p;
          double pt = detail::time_it([&] { p = profile_dimensional(t.columns[0], m, kg); });
          if (it == 0) continue;
          times.push_back(pt);
          map_times.push_back(mt);
          fnv.number(m.score);
          detail::digest_profile(fnv, p);
        }
        TimingRow row;
        row.workload = "dimensional";
        row.cardinality = card;
        row.parameter = format_noise(noise);
        auto s = detail::summarize(times), ms = detail::summarize(map_times);
        row.mean_s = s.mean, row.std_s = s.std;
        row.mapping_mean_s = ms.mean, row.mapping_std_s = ms.std;
        row.digest = fnv.value();
        if (progress) progress(row);
        report.rows.push_back(std::move(row));
      }
  }

  if (config.typed) {
    const auto corpus = word_corpus();
    for (auto card : config.cardinalities) {
      std::vector<std::vector<double>> times(kTypedWorkloads.size());
      std::vector<detail::Fnv> fnv(kTypedWorkloads.size());
      for (std::size_t it = 0; it < total_iters; ++it) {
        Table t = gen_typed_source(card, corpus, make_rng(config.seed, {2, card, it})());
        if (it == 0 && config.dump_dir)
          detail::dump(*config.dump_dir / ("typed_" + std::to_string(card) + ".csv"), write_csv(t));
        for (std::size_t w = 0; w < kTypedWorkloads.size(); ++w) {
          Profile p;
          double pt = detail::time_it([&] {
            TypedColumn typed = parse_typed(t.columns[w], kTypedWorkloads[w], tcfg);
            p = profile_typed(typed, popts);
          });
          if (it == 0) continue;
          times[w].push_back(pt);
          detail::digest_profile(fnv[w], p);
        }
      }
      for (std::size_t w = 0; w < kTypedWorkloads.size(); ++w) {
        TimingRow row;
        row.workload = "typed";
        row.cardinality = card;
        row.parameter = std::string(to_string(kTypedWorkloads[w]));
        auto s = detail::summarize(times[w]);
        row.mean_s = s.mean, row.std_s = s.std;
        row.digest = fnv[w].value();
        if (progress) progress(row);
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

/// Scaling properties expected of a report; returns one message per failure.
///   - mean time strictly increases with cardinality in every series
///   - mean(largest)/mean(smallest) < 3 * cardinality ratio
///   - at the largest cardinality, the noisiest dimensional run is no slower
///     than the cleanest one
///   - at the largest cardinality, textual is the slowest typed workload
inline std::vector<std::string> check_properties(const TimingReport& report) {
  std::vector<std::string> out;
  std::map<std::pair<std::string, std::string>, std::map<std::size_t, double>> series;
  for (const auto& r : report.rows) series[{r.workload, r.parameter}][r.cardinality] = r.mean_s;
  for (const auto& [key, points] : series) {
    const std::string name = key.first + "/" + key.second;
    if (points.size() < 2) continue;
    double prev = -1;
    for (const auto& [card, mean] : points) {
      if (mean <= prev) out.push_back(name + ": time does not increase at cardinality " + std::to_string(card));
      prev = mean;
    }
    const auto& lo = *points.begin();
    const auto& hi = *points.rbegin();
    const double bound = 3.0 * static_cast<double>(hi.first) / static_cast<double>(lo.first);
    if (lo.second > 0 && hi.second / lo.second >= bound)
      out.push_back(name + ": growth ratio " + std::to_string(hi.second / lo.second) + " exceeds " +
                    std::to_string(bound));
  }
  std::size_t top = 0;
  for (const auto& r : report.rows) top = std::max(top, r.cardinality);
  const TimingRow *clean = nullptr, *noisy = nullptr;
  double clean_noise = 2, noisy_noise = -1;
  const TimingRow* textual = nullptr;
  for (const auto& r : report.rows) {
    if (r.cardinality != top) continue;
    if (r.workload == "dimensional") {
      double v = std::stod(r.parameter);
      if (v < clean_noise) clean_noise = v, clean = &r;
      if (v > noisy_noise) noisy_noise = v, noisy = &r;
    } else if (r.parameter == "textual") {
      textual = &r;
    }
  }
  if (clean && noisy && clean != noisy && noisy->mean_s > clean->mean_s)
    out.push_back("dimensional at " + std::to_string(top) + ": noise " + noisy->parameter +
                  " is slower than noise " + clean->parameter);
  if (textual)
    for (const auto& r : report.rows)
      if (r.workload == "typed" && r.cardinality == top && &r != textual && r.mean_s >= textual->mean_s)
        out.push_back("typed at " + std::to_string(top) + ": " + r.parameter + " is not faster than textual");
  return out;
}

inline std::string report_csv(const TimingReport& report) {
  std::string out = "workload,cardinality,parameter,mean_s,std_s,mapping_mean_s,mapping_std_s,digest\n";
  char buf[256];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%s,%.9f,%.9f,", r.workload.c_str(), r.cardinality,
                  r.parameter.c_str(), r.mean_s, r.std_s);
    out += buf;
    if (r.mapping_mean_s) {
      std::snprintf(buf, sizeof buf, "%.9f,%.9f", *r.mapping_mean_s, *r.mapping_std_s);
      out += buf;
    } else {
      out += ',';
    }
    std::snprintf(buf, sizeof buf, ",%016llx\n", static_cast<unsigned long long>(r.digest));
    out += buf;
  }
  return out;
}

/// Per-series files for plotting: <noise>_noise_level.csv for the dimensional
/// workload and mean_<type>_time_processing.csv for the typed ones.
inline std::vector<std::filesystem::path> write_gnuplot_data(const TimingReport& report,
                                                             const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::map<std::string, std::string> files;
  char buf[256];
  for (const auto& r : report.rows) {
    if (r.workload == "dimensional") {
      auto& f = files[r.parameter + "_noise_level.csv"];
      if (f.empty()) f = "noise,cardinality,mean_s,std_s,mapping_mean_s,mapping_std_s\n";
      std::snprintf(buf, sizeof buf, "%s,%zu,%.9f,%.9f,%.9f,%.9f\n", r.parameter.c_str(),
                    r.cardinality, r.mean_s, r.std_s, r.mapping_mean_s.value_or(0),
                    r.mapping_std_s.value_or(0));
    } else {
      auto& f = files["mean_" + r.parameter + "_time_processing.csv"];
      if (f.empty()) f = "cardinality,mean_s,std_s\n";
      std::snprintf(buf, sizeof buf, "%zu,%.9f,%.9f\n", r.cardinality, r.mean_s, r.std_s);
    }
    files[r.workload == "dimensional" ? r.parameter + "_noise_level.csv"
                                      : "mean_" + r.parameter + "_time_processing.csv"] += buf;
  }
  std::vector<std::filesystem::path> out;
  for (const auto& [name, text] : files) {
    detail::dump(dir / name, text);
    out.push_back(dir / name);
  }
  return out;
}

}  // namespace mdprof::bench
