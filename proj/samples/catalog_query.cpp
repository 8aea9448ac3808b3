// Registers profiled sources in a catalog directory, then answers a query
// and prints one attribute profile as JSON.
//
//   catalog_query /tmp/catalog tests/data/kg.ttl tests/data/vehicles.csv

#include <iostream>

#include "mdprof/mdprof.hpp"

int main(int argc, char** argv) {
  if (argc < 4) {
    std::cerr << "usage: catalog_query <catalog-dir> <kg.ttl> <source>...\n";
    return 2;
  }
  try {
    auto kg = mdprof::load_kg(argv[2]);
    mdprof::CatalogStore store(argv[1]);
    mdprof::EngineOptions options;
    options.kg = &kg;

    for (int i = 3; i < argc; ++i) {
      auto table = mdprof::load_source(argv[i]);
      mdprof::SourceMetadata meta;
      meta.name = table.name;
      meta.location = argv[i];
      meta.items = table.row_count;
      auto graph = mdprof::build_graph(meta, mdprof::to_inputs(mdprof::profile_table(table, options)),
                                       kg.prefixes());
      std::cout << "registered " << store.register_graph(graph) << '\n';
    }

    // Sources with a city dimension and more than 10 rows.
    auto query = store.parse_query({"level = kg:City", "items > 10"});
    for (const auto& iri : store.find_sources(query)) {
      std::cout << "match " << iri << '\n';
      auto source = store.get_source(iri);
      if (source.find("city"))
        std::cout << mdprof::to_json(store.get_profile(iri, "city")).dump(2) << '\n';
    }
  } catch (const mdprof::Error& e) {
    std::cerr << mdprof::to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  }
}
