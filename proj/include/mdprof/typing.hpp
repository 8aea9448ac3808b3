#pragma once

// Attribute category inference and typed parsing.

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "mdprof/datetime.hpp"
#include "mdprof/error.hpp"
#include "mdprof/ingest.hpp"

namespace mdprof {

enum class Category { integer, decimal, datetime, textual, categorical, unrecognized };

inline constexpr std::array<Category, 6> kAllCategories{
    Category::integer,  Category::decimal,     Category::datetime,
    Category::textual,  Category::categorical, Category::unrecognized};

inline constexpr std::string_view to_string(Category c) {
  switch (c) {
    case Category::integer: return "integer";
    case Category::decimal: return "decimal";
    case Category::datetime: return "datetime";
    case Category::textual: return "textual";
    case Category::categorical: return "categorical";
    case Category::unrecognized: return "unrecognized";
  }
  return "unrecognized";
}

inline std::optional<Category> category_from_string(std::string_view s) {
  for (auto c : kAllCategories)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

inline constexpr bool is_numeric(Category c) {
  return c == Category::integer || c == Category::decimal;
}

struct TypingConfig {
  /// Largest distinct-value count still considered categorical.
  std::size_t cat_thr = 20;
  /// When set, replaces cat_thr with `distinct <= cat_ratio * non_null`.
  std::optional<double> cat_ratio;
  /// Largest tolerated fraction of datetime parse failures.
  double date_thr = 0.05;
  bool string_proc = true;
  bool day_first = true;

  void validate() const {
    if (cat_thr < 1) throw Error(ErrorCode::InvalidConfig, "cat_thr must be >= 1");
    if (!(date_thr > 0.0 && date_thr <= 1.0))
      throw Error(ErrorCode::InvalidConfig, "date_thr must be in (0, 1]");
    if (cat_ratio && !(*cat_ratio > 0.0 && *cat_ratio <= 1.0))
      throw Error(ErrorCode::InvalidConfig, "categorical ratio must be in (0, 1]");
  }
};

namespace detail {

inline std::string_view trim_ascii(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Strict, locale-independent integer parse: `[+-]?[0-9]+` fitting int64.
inline std::optional<std::int64_t> parse_integer(std::string_view s) {
  s = detail::trim_ascii(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty() || s.front() == '+') return std::nullopt;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Plain decimal or scientific notation with `.` as separator. Rejects
/// thousands separators, hex, inf and nan.
inline std::optional<double> parse_number(std::string_view s) {
  s = detail::trim_ascii(s);
  const bool plus = !s.empty() && s.front() == '+';
  if (plus) s.remove_prefix(1);
  std::size_t i = (!plus && !s.empty() && s.front() == '-') ? 1 : 0;
  std::size_t digits = 0;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++digits;
  }
  if (digits == 0) return std::nullopt;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++exp_digits;
    if (exp_digits == 0) return std::nullopt;
  }
  if (i != s.size()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

struct Classification {
  Category category = Category::unrecognized;
  /// Set when the column holds no non-null cell.
  bool all_null = false;
};

/// Runs the category cascade over the non-null cells: numeric (integer or
/// decimal), categorical, datetime, textual, unrecognized. The first test
/// that passes decides.
inline Classification classify(const Column& column, const TypingConfig& config = {}) {
  std::vector<std::string_view> values;
  values.reserve(column.cells.size());
  for (const auto& c : column.cells)
    if (c) values.emplace_back(*c);
  if (values.empty()) return {Category::unrecognized, true};

  bool all_integer = true;
  bool all_numeric = true;
  for (auto v : values) {
    if (all_integer && !parse_integer(v)) all_integer = false;
    if (!all_integer && !parse_number(v)) {
      all_numeric = false;
      break;
    }
  }
  if (all_integer) return {Category::integer, false};
  if (all_numeric) return {Category::decimal, false};

  std::unordered_set<std::string_view> distinct(values.begin(), values.end());
  const double limit = config.cat_ratio
                           ? *config.cat_ratio * static_cast<double>(values.size())
                           : static_cast<double>(config.cat_thr);
  if (static_cast<double>(distinct.size()) <= limit) return {Category::categorical, false};

  std::size_t failures = 0;
  for (auto v : values)
    if (!parse_timestamp(v, config.day_first)) ++failures;
  if (static_cast<double>(failures) <= config.date_thr * static_cast<double>(values.size()))
    return {Category::datetime, false};

  if (config.string_proc) {
    for (auto v : values)
      for (unsigned char ch : v)
        if (std::isalpha(ch) || ch >= 0x80) return {Category::textual, false};
  }
  return {Category::unrecognized, false};
}

inline Category infer_category(const Column& column, const TypingConfig& config = {}) {
  return classify(column, config).category;
}

using TypedValue = std::variant<std::monostate, std::int64_t, double, Timestamp, std::string>;

struct TypedColumn {
  std::string name;
  Category category = Category::unrecognized;
  /// Aligned with the source rows; std::monostate marks a null.
  std::vector<TypedValue> values;
  std::size_t null_count = 0;

  std::size_t size() const noexcept { return values.size(); }
};

/// Converts cells under the given category. Datetime cells that fail to parse
/// become nulls as long as the failure rate stays within date_thr.
inline TypedColumn parse_typed(const Column& column, Category category,
                               const TypingConfig& config = {}) {
  TypedColumn out;
  out.name = column.name;
  out.category = category;
  out.values.reserve(column.cells.size());
  std::size_t failures = 0;
  std::size_t non_null = 0;
  auto incompatible = [&](std::string_view cell) {
    return Error(ErrorCode::IncompatibleCategory,
                 "column '" + column.name + "': value '" + std::string(cell) +
                     "' is not " + std::string(to_string(category)));
  };
  for (const auto& cell : column.cells) {
    if (!cell) {
      out.values.emplace_back(std::monostate{});
      ++out.null_count;
      continue;
    }
    ++non_null;
    switch (category) {
      case Category::integer: {
        auto v = parse_integer(*cell);
        if (!v) throw incompatible(*cell);
        out.values.emplace_back(*v);
        break;
      }
      case Category::decimal: {
        auto v = parse_number(*cell);
        if (!v) throw incompatible(*cell);
        out.values.emplace_back(*v);
        break;
      }
      case Category::datetime: {
        auto v = parse_timestamp(*cell, config.day_first);
        if (v) {
          out.values.emplace_back(*v);
        } else {
          ++failures;
          ++out.null_count;
          out.values.emplace_back(std::monostate{});
        }
        break;
      }
      case Category::textual:
      case Category::categorical:
      case Category::unrecognized:
        out.values.emplace_back(*cell);
        break;
    }
  }
  if (category == Category::datetime && non_null > 0 &&
      static_cast<double>(failures) > config.date_thr * static_cast<double>(non_null))
    throw Error(ErrorCode::IncompatibleCategory,
                "column '" + column.name + "': " + std::to_string(failures) + " of " +
                    std::to_string(non_null) + " cells are not datetimes");
  return out;
}

}  // namespace mdprof
