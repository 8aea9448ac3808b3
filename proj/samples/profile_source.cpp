// Profiles a CSV or JSON file against a knowledge graph and prints the
// metadata graph as Turtle.
//
//   profile_source tests/data/vehicles.csv tests/data/kg.ttl

#include <iostream>

#include "mdprof/mdprof.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: profile_source <source> [kg.ttl]\n";
    return 2;
  }
  try {
    mdprof::Table table = mdprof::load_source(argv[1]);

    std::optional<mdprof::KnowledgeGraph> kg;
    mdprof::EngineOptions options;
    if (argc > 2) {
      kg = mdprof::load_kg(argv[2]);
      options.kg = &*kg;
    }
    auto results = mdprof::profile_table(table, options);

    for (const auto& r : results) {
      std::cerr << r.name << ": " << mdprof::to_string(r.category);
      if (r.mapping) std::cerr << " -> " << r.mapping->target << " (" << r.mapping->score << ")";
      std::cerr << '\n';
    }

    mdprof::SourceMetadata meta;
    meta.name = table.name;
    meta.location = argv[1];
    meta.items = table.row_count;
    std::cout << mdprof::rdf::to_turtle(
        mdprof::build_graph(meta, mdprof::to_inputs(results), kg ? kg->prefixes() : mdprof::rdf::PrefixMap{}));
  } catch (const mdprof::Error& e) {
    std::cerr << mdprof::to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  }
}
