#pragma once

// Per-attribute pipeline: level mapping, typing, profiling. Attributes are
// independent, so a table is profiled on a small worker pool and the results
// are merged back in column order.

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mdprof/ingest.hpp"
#include "mdprof/kg.hpp"
#include "mdprof/profiler.hpp"
#include "mdprof/typing.hpp"

namespace mdprof {

struct EngineOptions {
  TypingConfig typing;
  ProfileOptions profile;
  const KnowledgeGraph* kg = nullptr;
  double containment_thr = 0.5;
  /// User-forced categories by column name. A forced column skips level mapping.
  std::map<std::string, Category, std::less<>> forced;
  std::size_t threads = 1;
};

struct AttributeResult {
  std::string name;
  Category category = Category::unrecognized;
  /// Set when the column had no non-null cell.
  bool all_null = false;
  std::optional<Mapping> mapping;
  Profile profile;
};

inline AttributeResult profile_attribute(const Column& column, const EngineOptions& options) {
  AttributeResult out;
  out.name = column.name;
  auto forced = options.forced.find(column.name);
  const bool is_forced = forced != options.forced.end();

  if (!is_forced && options.kg) {
    if (auto m = discover_level_mapping(column, *options.kg, options.containment_thr)) {
      auto cls = classify(column, options.typing);
      out.category = cls.category;
      out.profile = profile_dimensional(column, *m, *options.kg);
      out.mapping = std::move(m);
      return out;
    }
  }

  if (is_forced) {
    out.category = forced->second;
    out.all_null = column.null_count() == column.size();
  } else {
    auto cls = classify(column, options.typing);
    out.category = cls.category;
    out.all_null = cls.all_null;
  }
  TypedColumn typed = parse_typed(column, out.category, options.typing);
  out.profile = profile_typed(typed, options.profile);
  if (options.kg && is_numeric(out.category))
    out.mapping = discover_indicator_mapping(column.name, *options.kg);
  return out;
}

inline std::vector<AttributeResult> profile_table(const Table& table,
                                                  const EngineOptions& options) {
  options.typing.validate();
  for (const auto& [name, cat] : options.forced)
    if (!table.find(name))
      throw Error(ErrorCode::InvalidConfig, "forced type for unknown column '" + name + "'");

  const std::size_t n = table.columns.size();
  std::vector<std::optional<AttributeResult>> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = profile_attribute(table.columns[i], options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  std::vector<AttributeResult> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*results[i]));
  }
  return out;
}

}  // namespace mdprof
