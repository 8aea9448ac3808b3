#pragma once

// Loading CSV and JSON sources into a columnar table with explicit nulls.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdprof/error.hpp"

namespace mdprof {

/// A cell is either a raw string or the null marker (std::nullopt). The empty
/// string and the literal "null" are ordinary values unless configured as
/// null tokens.
using Cell = std::optional<std::string>;

struct Column {
  std::string name;
  std::vector<Cell> cells;

  std::size_t size() const noexcept { return cells.size(); }
  std::size_t null_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(),
                      [](const Cell& c) { return !c.has_value(); }));
  }
};

struct Table {
  std::string name;
  std::vector<Column> columns;
  std::size_t row_count = 0;

  const Column* find(std::string_view column_name) const {
    for (const auto& c : columns)
      if (c.name == column_name) return &c;
    return nullptr;
  }
};

/// Throws if the table breaks its length or uniqueness invariants.
inline void check_table(const Table& table) {
  std::unordered_set<std::string_view> seen;
  for (const auto& col : table.columns) {
    if (!seen.insert(col.name).second)
      throw Error(ErrorCode::DuplicateAttributeName,
                  "duplicate column name '" + col.name + "' in " + table.name);
    if (col.cells.size() != table.row_count)
      throw Error(ErrorCode::ParseError,
                  "column '" + col.name + "' has " +
                      std::to_string(col.cells.size()) + " cells, expected " +
                      std::to_string(table.row_count));
  }
}

enum class SourceFormat { csv, json };

inline std::string_view to_string(SourceFormat f) {
  return f == SourceFormat::csv ? "csv" : "json";
}

struct LoadOptions {
  /// Unset means comma, or semicolon when the header has semicolons only.
  std::optional<char> delimiter;
  std::vector<std::string> null_tokens{"", "NULL", "null", "NaN", "NA"};
  bool has_header = true;
};

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw Error(ErrorCode::UnreadablePath, "cannot read " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnreadablePath, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

inline std::string_view strip_bom(std::string_view text) {
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB &&
      static_cast<unsigned char>(text[2]) == 0xBF)
    text.remove_prefix(3);
  return text;
}

inline bool looks_binary(std::string_view head) {
  std::size_t odd = 0;
  for (unsigned char c : head) {
    if (c == 0) return true;
    if (c < 0x09 || (c > 0x0D && c < 0x20)) ++odd;
  }
  return !head.empty() && odd * 10 > head.size();
}

struct CsvField {
  std::string text;
  bool quoted = false;
};

struct CsvRecord {
  std::vector<CsvField> fields;
  std::size_t line = 0;
  bool blank = false;
};

// RFC 4180 reader. Quoted fields may span lines; `""` escapes a quote.
class CsvReader {
 public:
  CsvReader(std::string_view text, char delimiter, std::string file)
      : text_(text), delim_(delimiter), file_(std::move(file)) {}

  bool next(CsvRecord& rec) {
    if (pos_ >= text_.size()) return false;
    rec.fields.clear();
    rec.line = line_;
    rec.blank = false;
    const std::size_t start = pos_;
    CsvField field;
    while (true) {
      if (pos_ >= text_.size()) {
        rec.fields.push_back(std::move(field));
        break;
      }
      char c = text_[pos_];
      if (c == '"' && field.text.empty() && !field.quoted) {
        read_quoted(field);
        continue;
      }
      if (c == delim_) {
        rec.fields.push_back(std::move(field));
        field = {};
        ++pos_;
        continue;
      }
      if (c == '\r' || c == '\n') {
        rec.fields.push_back(std::move(field));
        if (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') ++pos_;
        ++pos_;
        ++line_;
        break;
      }
      if (field.quoted)
        throw Error(ErrorCode::ParseError, "unexpected character after closing quote",
                    {file_, line_, 0});
      field.text.push_back(c);
      ++pos_;
    }
    rec.blank = rec.fields.size() == 1 && !rec.fields[0].quoted &&
                rec.fields[0].text.empty() && pos_ - start <= 2;
    return true;
  }

 private:
  void read_quoted(CsvField& field) {
    const std::size_t open_line = line_;
    field.quoted = true;
    ++pos_;
    while (true) {
      if (pos_ >= text_.size())
        throw Error(ErrorCode::ParseError, "unterminated quoted field",
                    {file_, open_line, 0});
      char c = text_[pos_];
      if (c == '"') {
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
          field.text.push_back('"');
          pos_ += 2;
          continue;
        }
        ++pos_;
        return;
      }
      if (c == '\n') ++line_;
      field.text.push_back(c);
      ++pos_;
    }
  }

  std::string_view text_;
  char delim_;
  std::string file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

inline char sniff_delimiter(std::string_view text) {
  auto eol = text.find_first_of("\r\n");
  auto first = text.substr(0, eol);
  bool comma = first.find(',') != std::string_view::npos;
  bool semi = first.find(';') != std::string_view::npos;
  return (semi && !comma) ? ';' : ',';
}

inline bool is_null_token(std::string_view value,
                          const std::vector<std::string>& tokens) {
  return std::find(tokens.begin(), tokens.end(), value) != tokens.end();
}

}  // namespace detail

/// Extension first, then content sniffing.
inline SourceFormat detect_format(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw Error(ErrorCode::UnreadablePath, "cannot read " + path.string());
  if (ext == ".csv") return SourceFormat::csv;
  if (ext == ".json") return SourceFormat::json;

  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnreadablePath, "cannot open " + path.string());
  std::string head(4096, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  std::string_view view = detail::strip_bom(head);
  if (detail::looks_binary(view))
    throw Error(ErrorCode::UnknownFormat, "binary content in " + path.string());
  auto first = view.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && (view[first] == '[' || view[first] == '{'))
    return SourceFormat::json;
  auto line = view.substr(0, view.find_first_of("\r\n"));
  if (line.find(',') != std::string_view::npos || line.find(';') != std::string_view::npos)
    return SourceFormat::csv;
  throw Error(ErrorCode::UnknownFormat, "cannot determine format of " + path.string());
}

/// Parses CSV text. Null tokens apply to unquoted fields only, so a quoted
/// "NA" stays a value.
inline Table parse_csv(std::string_view text, const LoadOptions& options,
                       std::string table_name = "source", std::string file = {}) {
  text = detail::strip_bom(text);
  const char delim = options.delimiter.value_or(detail::sniff_delimiter(text));
  detail::CsvReader reader(text, delim, file.empty() ? table_name : file);
  Table table;
  table.name = std::move(table_name);

  detail::CsvRecord rec;
  std::size_t arity = 0;
  bool have_arity = false;
  if (options.has_header) {
    if (!reader.next(rec)) return table;
    arity = rec.fields.size();
    have_arity = true;
    for (auto& f : rec.fields) table.columns.push_back(Column{std::move(f.text), {}});
  }
  while (reader.next(rec)) {
    if (!have_arity) {
      arity = rec.fields.size();
      have_arity = true;
      for (std::size_t i = 0; i < arity; ++i)
        table.columns.push_back(Column{"col" + std::to_string(i + 1), {}});
    }
    // A blank line is an empty cell for single-column sources and is skipped
    // otherwise.
    if (rec.blank && arity > 1) continue;
    if (rec.fields.size() != arity)
      throw Error(ErrorCode::RaggedRows,
                  "expected " + std::to_string(arity) + " fields, found " +
                      std::to_string(rec.fields.size()),
                  {file.empty() ? table.name : file, rec.line, 0});
    for (std::size_t i = 0; i < arity; ++i) {
      auto& f = rec.fields[i];
      if (!f.quoted && detail::is_null_token(f.text, options.null_tokens))
        table.columns[i].cells.emplace_back(std::nullopt);
      else
        table.columns[i].cells.emplace_back(std::move(f.text));
    }
    ++table.row_count;
  }
  check_table(table);
  return table;
}

/// Parses a JSON array of flat objects; keys are unioned in first-seen order
/// and missing keys become nulls.
inline Table parse_json(std::string_view text, const LoadOptions& options,
                        std::string table_name = "source", std::string file = {}) {
  using json = nlohmann::ordered_json;
  const std::string where = file.empty() ? table_name : file;
  json doc;
  try {
    doc = json::parse(detail::strip_bom(text));
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw Error(ErrorCode::ParseError, e.what(), {where, line, 0});
  }
  if (!doc.is_array())
    throw Error(ErrorCode::ParseError, "top-level JSON value must be an array", {where, 1, 0});

  Table table;
  table.name = std::move(table_name);
  std::unordered_map<std::string, std::size_t> index;
  std::size_t row = 0;
  for (const auto& obj : doc) {
    ++row;
    if (!obj.is_object())
      throw Error(ErrorCode::ParseError,
                  "element " + std::to_string(row) + " is not an object", {where, 0, 0});
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      auto [pos, inserted] = index.try_emplace(it.key(), table.columns.size());
      if (inserted)
        table.columns.push_back(Column{it.key(), std::vector<Cell>(row - 1)});
      const auto& v = it.value();
      Cell cell;
      if (v.is_object() || v.is_array())
        throw Error(ErrorCode::ParseError,
                    "nested value for key '" + it.key() + "' in element " + std::to_string(row),
                    {where, 0, 0});
      if (v.is_string()) {
        auto s = v.get<std::string>();
        if (!detail::is_null_token(s, options.null_tokens)) cell = std::move(s);
      } else if (!v.is_null()) {
        cell = v.dump();
      }
      auto& cells = table.columns[pos->second].cells;
      cells.resize(row - 1);
      cells.push_back(std::move(cell));
    }
  }
  for (auto& c : table.columns) c.cells.resize(row);
  table.row_count = row;
  check_table(table);
  return table;
}

inline Table load_source(const std::filesystem::path& path, SourceFormat format,
                         const LoadOptions& options = {}) {
  std::string text = detail::read_file(path);
  std::string name = path.stem().string();
  if (format == SourceFormat::csv)
    return parse_csv(text, options, std::move(name), path.string());
  return parse_json(text, options, std::move(name), path.string());
}

inline Table load_source(const std::filesystem::path& path, const LoadOptions& options = {}) {
  return load_source(path, detect_format(path), options);
}

/// Serializes a table as CSV such that parse_csv with the same null tokens
/// reproduces every value and null position.
inline std::string write_csv(const Table& table, char delimiter = ',',
                             const std::vector<std::string>& null_tokens =
                                 LoadOptions{}.null_tokens) {
  auto emit = [&](std::string& out, const std::string& v, bool force_quote) {
    bool quote = force_quote ||
                 v.find_first_of(std::string{delimiter, '"', '\r', '\n'}) != std::string::npos ||
                 detail::is_null_token(v, null_tokens);
    if (!quote) {
      out += v;
      return;
    }
    out += '"';
    for (char c : v) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
  };
  std::string null_repr;
  if (!null_tokens.empty() && !detail::is_null_token("", null_tokens)) null_repr = null_tokens.front();
  std::string out;
  // Single-column tables: an empty header line would read as a blank record.
  const bool single = table.columns.size() == 1;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += delimiter;
    emit(out, table.columns[i].name, single && table.columns[i].name.empty());
  }
  out += '\n';
  for (std::size_t r = 0; r < table.row_count; ++r) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i) out += delimiter;
      const auto& cell = table.columns[i].cells[r];
      if (cell)
        emit(out, *cell, false);
      else
        out += null_repr;
    }
    out += '\n';
  }
  return out;
}

}  // namespace mdprof
