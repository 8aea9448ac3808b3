// mdprof: profile tabular sources into RDF metadata, manage a catalog of
// profiled sources, and run the synthetic benchmarks.
//
// Settings are layered: command-line flags, then MDPROF_* environment
// variables, then a key = value config file (--config or MDPROF_CONFIG),
// then built-in defaults.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mdprof/mdprof.hpp"

namespace fs = std::filesystem;
using namespace mdprof;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::optional<char> delimiter;
  std::vector<std::string> null_tokens = LoadOptions{}.null_tokens;
  bool header = true;
  std::optional<SourceFormat> input_format;
  TypingConfig typing;
  std::string kg;
  double containment_thr = 0.5;
  KgOptions kg_options;
  std::size_t bins = 10;
  std::string stopwords;
  std::optional<std::size_t> max_words;
  rdf::Syntax syntax = rdf::Syntax::turtle;
  std::string catalog;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t seed = 42;
};

template <typename T>
T parse_as(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T out{};
  in >> out;
  if (in.fail() || !(in >> std::ws).eof()) throw UsageError("invalid value '" + v + "' for " + key);
  return out;
}

bool parse_bool(const std::string& key, std::string v) {
  for (auto& c : v) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError("invalid boolean '" + v + "' for " + key);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

using Setter = std::function<void(Settings&, const std::string&)>;

// Every layered setting, by config key. The environment variable is
// MDPROF_<KEY> with '-' replaced by '_'.
const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"delimiter",
       [](Settings& s, const std::string& v) {
         if (v == "\\t" || v == "tab") s.delimiter = '\t';
         else if (v.size() == 1) s.delimiter = v[0];
         else throw UsageError("delimiter must be a single character");
       }},
      {"null-tokens", [](Settings& s, const std::string& v) { s.null_tokens = split(v, ','); }},
      {"header", [](Settings& s, const std::string& v) { s.header = parse_bool("header", v); }},
      {"input-format",
       [](Settings& s, const std::string& v) {
         if (v == "csv") s.input_format = SourceFormat::csv;
         else if (v == "json") s.input_format = SourceFormat::json;
         else if (v == "auto") s.input_format.reset();
         else throw UsageError("input format must be csv, json or auto");
       }},
      {"cat-thr",
       [](Settings& s, const std::string& v) { s.typing.cat_thr = parse_as<std::size_t>("cat-thr", v); }},
      {"cat-ratio",
       [](Settings& s, const std::string& v) { s.typing.cat_ratio = parse_as<double>("cat-ratio", v); }},
      {"date-thr",
       [](Settings& s, const std::string& v) { s.typing.date_thr = parse_as<double>("date-thr", v); }},
      {"string-proc",
       [](Settings& s, const std::string& v) { s.typing.string_proc = parse_bool("string-proc", v); }},
      {"day-first",
       [](Settings& s, const std::string& v) { s.typing.day_first = parse_bool("day-first", v); }},
      {"kg", [](Settings& s, const std::string& v) { s.kg = v; }},
      {"containment-thr",
       [](Settings& s, const std::string& v) { s.containment_thr = parse_as<double>("containment-thr", v); }},
      {"member-level-prop",
       [](Settings& s, const std::string& v) { s.kg_options.member_level_property = v; }},
      {"rollup-prop", [](Settings& s, const std::string& v) { s.kg_options.rollup_property = v; }},
      {"bins", [](Settings& s, const std::string& v) { s.bins = parse_as<std::size_t>("bins", v); }},
      {"stopwords", [](Settings& s, const std::string& v) { s.stopwords = v; }},
      {"max-words",
       [](Settings& s, const std::string& v) { s.max_words = parse_as<std::size_t>("max-words", v); }},
      {"format",
       [](Settings& s, const std::string& v) {
         if (v == "turtle" || v == "ttl") s.syntax = rdf::Syntax::turtle;
         else if (v == "ntriples" || v == "nt") s.syntax = rdf::Syntax::ntriples;
         else throw UsageError("format must be turtle or ntriples");
       }},
      {"catalog", [](Settings& s, const std::string& v) { s.catalog = v; }},
      {"threads", [](Settings& s, const std::string& v) { s.threads = parse_as<std::size_t>("threads", v); }},
      {"seed", [](Settings& s, const std::string& v) { s.seed = parse_as<std::uint64_t>("seed", v); }},
  };
  return table;
}

void apply(Settings& s, const std::string& key, const std::string& value, const std::string& origin) {
  auto it = setters().find(key);
  if (it == setters().end()) throw UsageError(origin + ": unknown setting '" + key + "'");
  it->second(s, value);
}

void apply_config_file(Settings& s, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path.string());
  std::string line;
  std::size_t n = 0;
  auto trim = [](std::string v) {
    auto b = v.find_first_not_of(" \t\r");
    auto e = v.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++n;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == '[') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path.string() + ":" + std::to_string(n) + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    for (auto& c : key)
      if (c == '_') c = '-';
    apply(s, key, value, path.string() + ":" + std::to_string(n));
  }
}

void apply_environment(Settings& s) {
  for (const auto& [key, set] : setters()) {
    std::string var = "MDPROF_";
    for (char c : key) var += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = std::getenv(var.c_str())) apply(s, key, v, var);
  }
}

std::optional<std::string> config_path_from_args(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  if (const char* v = std::getenv("MDPROF_CONFIG")) return std::string(v);
  return std::nullopt;
}

// Registers --<key> on `app`; the value goes through the same setter as the
// config file and environment.
CLI::Option* layered(CLI::App* app, Settings& s, const std::string& key, const std::string& help) {
  return app->add_option_function<std::string>(
      "--" + key, [&s, key](const std::string& v) { apply(s, key, v, "--" + key); }, help);
}

const char* describe(ErrorCode c) {
  switch (c) {
    case ErrorCode::UnreadablePath: return "input file missing or unreadable";
    case ErrorCode::UnknownFormat: return "input is neither CSV nor JSON";
    case ErrorCode::ParseError: return "malformed CSV or JSON";
    case ErrorCode::RaggedRows: return "CSV row with the wrong number of fields";
    case ErrorCode::DuplicateAttributeName: return "two columns share a name";
    case ErrorCode::IncompatibleCategory: return "forced category does not fit the values";
    case ErrorCode::EmptyAfterNulls: return "no values left to profile";
    case ErrorCode::RdfParseError: return "malformed Turtle or N-Triples";
    case ErrorCode::DanglingMember: return "KG member points at an unknown level";
    case ErrorCode::MultiLevelMember: return "KG member belongs to several levels";
    case ErrorCode::HierarchyCycle: return "KG roll-up relation has a cycle";
    case ErrorCode::AmbiguousIndicator: return "attribute name matches several indicators";
    case ErrorCode::MappingLevelMissing: return "mapped level is not in the KG";
    case ErrorCode::ProfileCategoryMismatch: return "profile kind does not match the category";
    case ErrorCode::ShapeViolation: return "metadata graph breaks the vocabulary shape";
    case ErrorCode::StorageError: return "catalog read or write failed";
    case ErrorCode::MalformedQuery: return "query clause could not be parsed";
    case ErrorCode::UnknownSource: return "source is not in the catalog";
    case ErrorCode::UnknownAttribute: return "source has no such attribute";
    case ErrorCode::InvalidConfig: return "invalid setting or combination (exit 2)";
  }
  return "";
}

std::string error_code_help() {
  std::string out =
      "Exit status: 0 success, 1 domain error, 2 usage error.\n"
      "Diagnostics are printed to stderr as: mdprof: error [Code] file:line:col: message\n"
      "Error codes:\n";
  for (int i = 0; i <= static_cast<int>(ErrorCode::InvalidConfig); ++i) {
    auto c = static_cast<ErrorCode>(i);
    std::string name(to_string(c));
    out += "  " + name + std::string(name.size() < 26 ? 26 - name.size() : 1, ' ') + describe(c) + "\n";
  }
  out +=
      "Settings may also come from MDPROF_<KEY> variables (MDPROF_CATALOG, MDPROF_KG,\n"
      "MDPROF_THREADS, ...) or a key = value file given by --config or MDPROF_CONFIG.";
  return out;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::StorageError, "cannot write " + path);
  out << text;
  if (!out.flush()) throw Error(ErrorCode::StorageError, "short write to " + path);
}

std::string resolve_source(const std::string& s) {
  if (s.find("://") != std::string::npos) return s;
  return mint_iri(IriKind::source, {}, s);
}

const std::string& require_catalog(const Settings& s) {
  if (s.catalog.empty()) throw UsageError("no catalog given (use --catalog or MDPROF_CATALOG)");
  return s.catalog;
}

}  // namespace

int main(int argc, char** argv) {
  Settings s;
  int verbosity = 0;
  auto log = [&](int level, const std::string& msg) {
    if (verbosity >= level) std::cerr << "mdprof: " << msg << "\n";
  };

  try {
    if (auto cfg = config_path_from_args(argc, argv)) apply_config_file(s, *cfg);
    apply_environment(s);
  } catch (const UsageError& e) {
    std::cerr << "mdprof: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "mdprof: error " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"Multidimensional profiling of tabular sources into RDF metadata"};
  app.footer(error_code_help());
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", "key = value settings file (also MDPROF_CONFIG)");
  app.add_flag_function("-v,--verbose", [&](std::int64_t n) { verbosity = static_cast<int>(n); },
                        "Progress messages on stderr (repeat for more)");

  // profile
  auto* profile = app.add_subcommand("profile", "Profile a CSV or JSON source into a metadata graph");
  std::string input, out_path;
  bool do_register = false;
  std::vector<std::string> forced;
  SourceMetadata meta_flags;
  std::string location;
  profile->add_option("input", input, "CSV or JSON file")->required();
  profile->add_option("-o,--out", out_path, "Output file (default stdout)");
  layered(profile, s, "format", "turtle | ntriples");
  layered(profile, s, "kg", "Knowledge graph in Turtle (also MDPROF_KG)");
  layered(profile, s, "delimiter", "CSV delimiter (default: sniffed)");
  profile->add_option_function<std::vector<std::string>>(
      "--null-token", [&](const std::vector<std::string>& v) { s.null_tokens = v; },
      "Null token, repeatable; replaces the default set");
  profile->add_flag_callback("--no-header", [&] { s.header = false; }, "CSV has no header row");
  layered(profile, s, "input-format", "csv | json | auto");
  layered(profile, s, "cat-thr", "Max distinct values for categorical (default 20)");
  layered(profile, s, "cat-ratio", "Also require distinct/non-null <= ratio for categorical");
  layered(profile, s, "date-thr", "Max datetime parse-failure rate (default 0.05)");
  profile->add_flag_callback("--no-string-proc", [&] { s.typing.string_proc = false; },
                             "Report free text as unrecognized");
  profile->add_flag_callback("--day-first", [&] { s.typing.day_first = true; }, "Read NN/NN/YYYY as day/month");
  profile->add_flag_callback("--month-first", [&] { s.typing.day_first = false; },
                             "Read NN/NN/YYYY as month/day");
  profile->add_option("--force-type", forced, "COLUMN=CATEGORY, repeatable");
  layered(profile, s, "containment-thr", "Min containment score for a level mapping (default 0.5)");
  layered(profile, s, "member-level-prop", "KG property linking a member to its level");
  layered(profile, s, "rollup-prop", "KG property linking a level to its parent level");
  layered(profile, s, "bins", "Histogram bins for numeric attributes (default 10)");
  layered(profile, s, "stopwords", "Stopword file, one word per line");
  layered(profile, s, "max-words", "Keep only the K most frequent words");
  layered(profile, s, "threads", "Worker threads (also MDPROF_THREADS)");
  layered(profile, s, "catalog", "Catalog directory (also MDPROF_CATALOG)");
  profile->add_flag("--register", do_register, "Also register the result in the catalog");
  profile->add_option("--name", meta_flags.name, "Source name (default: file stem)");
  profile->add_option("--location", location, "dl:location value (default: the input path)");
  profile->add_option_function<std::string>("--title", [&](const std::string& v) { meta_flags.title = v; });
  profile->add_option_function<std::string>("--description",
                                             [&](const std::string& v) { meta_flags.description = v; });
  profile->add_option_function<std::string>("--creator", [&](const std::string& v) { meta_flags.creator = v; });
  profile->add_option_function<std::string>("--publisher",
                                             [&](const std::string& v) { meta_flags.publisher = v; });
  profile->add_option_function<std::string>("--date", [&](const std::string& v) { meta_flags.date = v; });
  profile->add_option_function<std::string>("--license", [&](const std::string& v) { meta_flags.license = v; });
  profile->add_option("--contributor", meta_flags.contributors, "Repeatable");
  profile->add_option("--subject", meta_flags.subjects, "Subject IRI, repeatable");

  // register
  auto* reg = app.add_subcommand("register", "Add metadata graphs to the catalog");
  std::vector<std::string> reg_files;
  reg->add_option("files", reg_files, "Turtle or N-Triples documents")->required();
  layered(reg, s, "catalog", "Catalog directory (also MDPROF_CATALOG)");

  // query
  auto* query = app.add_subcommand("query", "Find sources matching every clause");
  std::vector<std::string> clauses;
  query->add_option("clauses", clauses, "key op value, e.g. items>1000 or mapTo=kg:City");
  query->add_option("--where", clauses, "Clause, repeatable");
  layered(query, s, "catalog", "Catalog directory (also MDPROF_CATALOG)");

  // show
  auto* show = app.add_subcommand("show", "Print a registered source or one attribute profile as JSON");
  std::string show_source, show_attr;
  show->add_option("source", show_source, "Source IRI or name")->required();
  show->add_option("attribute", show_attr, "Attribute name");
  layered(show, s, "catalog", "Catalog directory (also MDPROF_CATALOG)");

  // validate
  auto* validate = app.add_subcommand("validate", "Check a metadata graph against the vocabulary shapes");
  std::string validate_file;
  validate->add_option("file", validate_file, "Turtle or N-Triples document")->required();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run the synthetic scaling benchmarks");
  bench::BenchConfig bc;
  std::string bench_out;
  bool gnuplot = false;
  std::string gnuplot_dir, dump_dir, workloads = "dimensional,typed";
  bench_cmd->add_option("--cards", bc.cardinalities, "Cardinalities, comma separated")->delimiter(',');
  bench_cmd->add_option("--noise", bc.noise, "Noise fractions, comma separated")->delimiter(',');
  bench_cmd->add_option("--iters", bc.iterations, "Timed iterations per point (default 10)");
  bench_cmd->add_option("--members", bc.level_members, "Members in the synthetic level (default 10000)");
  bench_cmd->add_option("--workloads", workloads, "dimensional, typed or both");
  layered(bench_cmd, s, "seed", "Generator seed");
  layered(bench_cmd, s, "bins", "Histogram bins (default 10)");
  bench_cmd->add_option("-o,--out", bench_out, "Report CSV (default stdout)");
  bench_cmd->add_flag("--gnuplot-data", gnuplot, "Also write per-series CSV files for plotting");
  bench_cmd->add_option("--gnuplot-dir", gnuplot_dir, "Where to put them (default: next to --out)");
  bench_cmd->add_option("--dump-dir", dump_dir, "Write the generated sources and KG here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "mdprof: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*profile) {
      EngineOptions eo;
      eo.typing = s.typing;
      eo.typing.validate();
      if (!(s.containment_thr > 0.0 && s.containment_thr <= 1.0))
        throw Error(ErrorCode::InvalidConfig, "containment threshold must be in (0, 1]");
      if (s.bins < 1) throw Error(ErrorCode::InvalidConfig, "bins must be >= 1");
      if (s.threads < 1) throw Error(ErrorCode::InvalidConfig, "threads must be >= 1");
      if (do_register) require_catalog(s);
      for (const auto& f : forced) {
        auto eq = f.find('=');
        auto cat = eq == std::string::npos ? std::nullopt : category_from_string(f.substr(eq + 1));
        if (!cat) throw UsageError("--force-type expects COLUMN=CATEGORY, got '" + f + "'");
        eo.forced[f.substr(0, eq)] = *cat;
      }
      eo.containment_thr = s.containment_thr;
      eo.threads = s.threads;
      eo.profile.bins = s.bins;
      eo.profile.max_words = s.max_words;
      if (!s.stopwords.empty()) eo.profile.stopwords = load_stopwords(s.stopwords);

      LoadOptions lo;
      lo.delimiter = s.delimiter;
      lo.null_tokens = s.null_tokens;
      lo.has_header = s.header;
      const SourceFormat fmt = s.input_format.value_or(detect_format(input));
      log(1, "loading " + input);
      Table table = load_source(input, fmt, lo);

      std::optional<KnowledgeGraph> kg;
      if (!s.kg.empty()) {
        log(1, "loading knowledge graph " + s.kg);
        kg = load_kg(s.kg, s.kg_options);
        eo.kg = &*kg;
      }
      log(1, "profiling " + std::to_string(table.columns.size()) + " attributes over " +
                 std::to_string(table.row_count) + " rows");
      auto results = profile_table(table, eo);
      for (const auto& r : results) {
        std::string line = r.name + ": " + std::string(to_string(r.category));
        if (r.all_null) line += " (all null)";
        if (r.mapping) line += " -> <" + r.mapping->target + ">";
        log(2, line);
      }

      SourceMetadata meta = meta_flags;
      if (meta.name.empty()) meta.name = table.name;
      meta.location = location.empty() ? input : location;
      meta.items = table.row_count;
      if (!meta.format) meta.format = std::string(to_string(fmt));
      rdf::Graph g = build_graph(meta, to_inputs(results), kg ? kg->prefixes() : rdf::PrefixMap{});
      write_output(out_path, rdf::serialize(g, s.syntax));
      if (do_register) {
        CatalogStore store(s.catalog);
        log(0, "registered <" + store.register_graph(g) + ">");
      }
      return 0;
    }

    if (*reg) {
      CatalogStore store(require_catalog(s));
      for (const auto& f : reg_files) std::cout << store.register_graph(rdf::load_graph(f)) << "\n";
      return 0;
    }

    if (*query) {
      CatalogStore store(require_catalog(s));
      for (const auto& iri : store.find_sources(store.parse_query(clauses))) std::cout << iri << "\n";
      return 0;
    }

    if (*show) {
      CatalogStore store(require_catalog(s));
      const std::string iri = resolve_source(show_source);
      if (show_attr.empty())
        std::cout << to_json(store.get_source(iri)).dump(2) << "\n";
      else
        std::cout << to_json(store.get_profile(iri, show_attr)).dump(2) << "\n";
      return 0;
    }

    if (*validate) {
      rdf::Graph g = rdf::load_graph(validate_file);
      auto violations = validate_shape(g);
      for (const auto& v : violations) std::cerr << "mdprof: violation: " << v << "\n";
      if (!violations.empty())
        throw Error(ErrorCode::ShapeViolation,
                    std::to_string(violations.size()) + " violation(s) in " + validate_file);
      std::cout << validate_file << ": conforms (" << g.triples.size() << " triples)\n";
      return 0;
    }

    if (*bench_cmd) {
      bc.seed = s.seed;
      bc.bins = s.bins;
      bc.dimensional = workloads.find("dimensional") != std::string::npos;
      bc.typed = workloads.find("typed") != std::string::npos;
      if (!bc.dimensional && !bc.typed) throw UsageError("--workloads must name dimensional and/or typed");
      if (!dump_dir.empty()) bc.dump_dir = dump_dir;
      auto report = bench::run_benchmark(bc, [&](const bench::TimingRow& r) {
        log(1, r.workload + " card=" + std::to_string(r.cardinality) + " " + r.parameter +
                   " mean=" + std::to_string(r.mean_s) + "s");
      });
      write_output(bench_out, bench::report_csv(report));
      if (gnuplot) {
        fs::path dir = !gnuplot_dir.empty()            ? fs::path(gnuplot_dir)
                       : !bench_out.empty() && bench_out != "-" ? fs::absolute(bench_out).parent_path()
                                                                : fs::current_path();
        for (const auto& p : bench::write_gnuplot_data(report, dir)) log(1, "wrote " + p.string());
      }
      for (const auto& msg : bench::check_properties(report)) log(0, "warning: " + msg);
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "mdprof: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "mdprof: error " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidConfig ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "mdprof: error " << e.what() << "\n";
    return 1;
  }
  return 0;
}
