#pragma once

// Per-attribute profiles: member frequencies for dimensional attributes and
// typed statistics for measures and descriptive attributes.

#include <algorithm>
#include <cmath>
#include <map>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "mdprof/datetime.hpp"
#include "mdprof/error.hpp"
#include "mdprof/ingest.hpp"
#include "mdprof/kg.hpp"
#include "mdprof/stopwords.hpp"
#include "mdprof/typing.hpp"

namespace mdprof {

struct DProfileElement {
  std::string member;
  std::size_t frequency = 0;
  bool operator==(const DProfileElement&) const = default;
};

struct DProfile {
  std::string level;
  std::vector<DProfileElement> elements;
  /// Cells not associated with any member of the level, nulls included.
  std::size_t others = 0;
  bool operator==(const DProfile&) const = default;
};

struct DistributionElement {
  double start_range = 0;
  double end_range = 0;
  std::size_t count = 0;
  bool operator==(const DistributionElement&) const = default;
};

struct Distribution {
  std::vector<DistributionElement> elements;
  bool operator==(const Distribution&) const = default;
};

struct NumericProfile {
  /// Integer attribute (min/max are whole numbers) versus decimal.
  bool integral = true;
  double max = 0, min = 0, mean = 0, median = 0;
  std::size_t distinct = 0;
  std::size_t null = 0;
  Distribution distribution;
  bool operator==(const NumericProfile&) const = default;
};

struct CountedValue {
  std::string value;
  std::size_t count = 0;
  bool operator==(const CountedValue&) const = default;
};

struct CategoricalProfile {
  std::size_t null = 0;
  std::vector<CountedValue> categories;
  bool operator==(const CategoricalProfile&) const = default;
};

struct YearCount {
  int year = 0;
  std::size_t count = 0;
  bool operator==(const YearCount&) const = default;
};

struct DatetimeProfile {
  std::size_t distinct = 0;
  std::size_t null = 0;
  Timestamp min_date, max_date;
  std::vector<YearCount> years;
  bool operator==(const DatetimeProfile&) const = default;
};

struct TextualProfile {
  std::size_t null = 0;
  std::size_t words_total = 0;
  std::vector<CountedValue> words;
  bool operator==(const TextualProfile&) const = default;
};

/// Profile for unrecognized attributes: only the null count is meaningful.
struct BasicProfile {
  std::size_t null = 0;
  bool operator==(const BasicProfile&) const = default;
};

using Profile = std::variant<DProfile, NumericProfile, CategoricalProfile, DatetimeProfile,
                             TextualProfile, BasicProfile>;

inline bool is_dimensional(const Profile& p) { return std::holds_alternative<DProfile>(p); }

struct ProfileOptions {
  std::size_t bins = 10;
  StopwordSet stopwords = default_stopwords();
  /// Keep only the K most frequent words; words_total still counts all.
  std::optional<std::size_t> max_words;
};

namespace detail {

inline void sort_counted(std::vector<CountedValue>& v) {
  std::sort(v.begin(), v.end(), [](const CountedValue& a, const CountedValue& b) {
    return a.count != b.count ? a.count > b.count : a.value < b.value;
  });
}

template <typename Map>
std::vector<CountedValue> to_counted(const Map& counts) {
  std::vector<CountedValue> out;
  out.reserve(counts.size());
  for (const auto& [k, n] : counts) out.push_back(CountedValue{std::string(k), n});
  sort_counted(out);
  return out;
}

}  // namespace detail

/// Equal-width bins over [min, max]; bin i is [edge_i, edge_i+1) and the last
/// bin is closed. A zero-width range yields one bin [min, min].
inline Distribution compute_distribution(std::span<const double> values, std::size_t bins) {
  if (bins < 1) throw Error(ErrorCode::InvalidConfig, "bin count must be >= 1");
  Distribution d;
  if (values.empty()) return d;
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    d.elements.push_back({lo, hi, values.size()});
    return d;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i < bins; ++i) edges[i] = lo + static_cast<double>(i) * width;
  edges[bins] = hi;
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    auto idx = static_cast<std::size_t>(
        std::clamp((v - lo) / width, 0.0, static_cast<double>(bins - 1)));
    while (idx > 0 && v < edges[idx]) --idx;
    while (idx + 1 < bins && v >= edges[idx + 1]) ++idx;
    ++counts[idx];
  }
  d.elements.reserve(bins);
  for (std::size_t i = 0; i < bins; ++i) d.elements.push_back({edges[i], edges[i + 1], counts[i]});
  return d;
}

inline DProfile profile_dimensional(const Column& column, const Mapping& mapping,
                                    const KnowledgeGraph& kg) {
  const KgLevel* level =
      mapping.kind == MappingTarget::level ? kg.find_level(mapping.target) : nullptr;
  if (!level)
    throw Error(ErrorCode::MappingLevelMissing,
                "level <" + mapping.target + "> is not in the knowledge graph");
  std::vector<std::size_t> counts(kg.members().size(), 0);
  std::size_t others = 0;
  std::string scratch;
  for (const auto& cell : column.cells) {
    if (!cell) {
      ++others;
      continue;
    }
    if (auto m = level->index.find(*cell, scratch))
      ++counts[*m];
    else
      ++others;
  }
  DProfile p;
  p.level = level->iri;
  p.others = others;
  for (auto idx : level->members)
    if (counts[idx]) p.elements.push_back({kg.members()[idx].iri, counts[idx]});
  std::sort(p.elements.begin(), p.elements.end(),
            [](const DProfileElement& a, const DProfileElement& b) {
              return a.frequency != b.frequency ? a.frequency > b.frequency : a.member < b.member;
            });
  return p;
}

inline NumericProfile profile_numeric(const TypedColumn& column,
                                      const ProfileOptions& options = {}) {
  if (!is_numeric(column.category))
    throw Error(ErrorCode::ProfileCategoryMismatch,
                "column '" + column.name + "' is not numeric");
  std::vector<double> values;
  values.reserve(column.values.size());
  long double sum = 0;
  for (const auto& v : column.values) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
      values.push_back(static_cast<double>(*i));
      sum += static_cast<long double>(*i);
    } else if (const auto* d = std::get_if<double>(&v)) {
      values.push_back(*d);
      sum += static_cast<long double>(*d);
    }
  }
  if (values.empty())
    throw Error(ErrorCode::EmptyAfterNulls, "column '" + column.name + "' has no values");

  NumericProfile p;
  p.integral = column.category == Category::integer;
  p.null = column.null_count;
  p.distribution = compute_distribution(values, options.bins);

  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  p.min = values.front();
  p.max = values.back();
  p.median = n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
  p.mean = std::clamp(static_cast<double>(sum / static_cast<long double>(n)), p.min, p.max);
  p.distinct = static_cast<std::size_t>(std::distance(
      values.begin(), std::unique(values.begin(), values.end())));
  return p;
}

inline CategoricalProfile profile_categorical(const TypedColumn& column) {
  std::unordered_map<std::string_view, std::size_t> counts;
  CategoricalProfile p;
  p.null = column.null_count;
  for (const auto& v : column.values)
    if (const auto* s = std::get_if<std::string>(&v)) ++counts[*s];
  p.categories = detail::to_counted(counts);
  return p;
}

inline DatetimeProfile profile_datetime(const TypedColumn& column) {
  std::vector<Timestamp> stamps;
  stamps.reserve(column.values.size());
  for (const auto& v : column.values)
    if (const auto* t = std::get_if<Timestamp>(&v)) stamps.push_back(*t);
  if (stamps.empty())
    throw Error(ErrorCode::EmptyAfterNulls, "column '" + column.name + "' has no dates");
  DatetimeProfile p;
  p.null = column.null_count;
  std::sort(stamps.begin(), stamps.end());
  p.min_date = stamps.front();
  p.max_date = stamps.back();
  std::map<int, std::size_t> years;
  for (const auto& t : stamps) ++years[t.year()];
  for (const auto& [y, n] : years) p.years.push_back({y, n});
  p.distinct = static_cast<std::size_t>(
      std::distance(stamps.begin(), std::unique(stamps.begin(), stamps.end())));
  return p;
}

/// Lowercases and splits on ASCII whitespace and punctuation. Bytes >= 0x80
/// are kept inside tokens.
template <typename Fn>
void for_each_token(std::string_view text, std::string& buffer, Fn&& fn) {
  buffer.clear();
  for (unsigned char c : text) {
    if (c < 0x80 && (std::isspace(c) || std::ispunct(c) || std::iscntrl(c))) {
      if (!buffer.empty()) {
        fn(static_cast<const std::string&>(buffer));
        buffer.clear();
      }
    } else {
      buffer += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    }
  }
  if (!buffer.empty()) fn(static_cast<const std::string&>(buffer));
}

inline TextualProfile profile_textual(const TypedColumn& column,
                                      const ProfileOptions& options = {}) {
  std::unordered_map<std::string, std::size_t> counts;
  TextualProfile p;
  p.null = column.null_count;
  std::string buffer;
  for (const auto& v : column.values) {
    const auto* s = std::get_if<std::string>(&v);
    if (!s) continue;
    for_each_token(*s, buffer, [&](const std::string& token) {
      if (options.stopwords.count(token)) return;
      ++counts[token];
      ++p.words_total;
    });
  }
  p.words = detail::to_counted(counts);
  if (options.max_words && p.words.size() > *options.max_words)
    p.words.resize(*options.max_words);
  return p;
}

/// Dispatches on the column's category.
inline Profile profile_typed(const TypedColumn& column, const ProfileOptions& options = {}) {
  switch (column.category) {
    case Category::integer:
    case Category::decimal:
      return profile_numeric(column, options);
    case Category::categorical:
      return profile_categorical(column);
    case Category::datetime:
      return profile_datetime(column);
    case Category::textual:
      return profile_textual(column, options);
    case Category::unrecognized:
      break;
  }
  return BasicProfile{column.null_count};
}

}  // namespace mdprof
