#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mdprof {

// Every failure surfaced by the library carries exactly one of these codes.
// The CLI prints the code name and exits with status 1, or 2 for InvalidConfig.
enum class ErrorCode {
  UnreadablePath,
  UnknownFormat,
  ParseError,
  RaggedRows,
  DuplicateAttributeName,
  IncompatibleCategory,
  EmptyAfterNulls,
  RdfParseError,
  DanglingMember,
  MultiLevelMember,
  HierarchyCycle,
  AmbiguousIndicator,
  MappingLevelMissing,
  ProfileCategoryMismatch,
  ShapeViolation,
  StorageError,
  MalformedQuery,
  UnknownSource,
  UnknownAttribute,
  InvalidConfig,
};

inline constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnreadablePath: return "UnreadablePath";
    case ErrorCode::UnknownFormat: return "UnknownFormat";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::DuplicateAttributeName: return "DuplicateAttributeName";
    case ErrorCode::IncompatibleCategory: return "IncompatibleCategory";
    case ErrorCode::EmptyAfterNulls: return "EmptyAfterNulls";
    case ErrorCode::RdfParseError: return "RdfParseError";
    case ErrorCode::DanglingMember: return "DanglingMember";
    case ErrorCode::MultiLevelMember: return "MultiLevelMember";
    case ErrorCode::HierarchyCycle: return "HierarchyCycle";
    case ErrorCode::AmbiguousIndicator: return "AmbiguousIndicator";
    case ErrorCode::MappingLevelMissing: return "MappingLevelMissing";
    case ErrorCode::ProfileCategoryMismatch: return "ProfileCategoryMismatch";
    case ErrorCode::ShapeViolation: return "ShapeViolation";
    case ErrorCode::StorageError: return "StorageError";
    case ErrorCode::MalformedQuery: return "MalformedQuery";
    case ErrorCode::UnknownSource: return "UnknownSource";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Source position attached to parse failures. Zero means "not applicable".
struct Location {
  std::string file;
  std::size_t line = 0;
  std::size_t column = 0;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, Location where = {})
      : std::runtime_error(format(code, message, where)),
        code_(code),
        detail_(message),
        where_(std::move(where)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  const Location& where() const noexcept { return where_; }

 private:
  static std::string format(ErrorCode code, const std::string& message,
                            const Location& where) {
    std::string out = "[";
    out += to_string(code);
    out += "] ";
    if (!where.file.empty()) {
      out += where.file;
      out += ':';
    }
    if (where.line != 0) {
      out += std::to_string(where.line);
      if (where.column != 0) out += ':' + std::to_string(where.column);
      out += ':';
    }
    if (!where.file.empty() || where.line != 0) out += ' ';
    out += message;
    return out;
  }

  ErrorCode code_;
  std::string detail_;
  Location where_;
};

}  // namespace mdprof
