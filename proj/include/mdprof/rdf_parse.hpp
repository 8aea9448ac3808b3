#pragma once

// Turtle 1.1 reader. N-Triples is a syntactic subset and goes through the
// same path.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>

#include "mdprof/error.hpp"
#include "mdprof/ingest.hpp"
#include "mdprof/rdf_model.hpp"

namespace mdprof::rdf {

class TurtleParser {
 public:
  TurtleParser(std::string_view text, std::string file = {})
      : text_(text), file_(std::move(file)) {}

  Graph parse() {
    Graph g;
    graph_ = &g;
    skip_ws();
    while (!eof()) {
      if (peek() == '@') {
        directive();
      } else if (starts_with_keyword("PREFIX") || starts_with_keyword("BASE")) {
        sparql_directive();
      } else {
        triples_statement();
      }
      skip_ws();
    }
    graph_ = nullptr;
    return g;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::RdfParseError, msg, {file_, line_, col_});
  }

  bool eof() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  char get() {
    if (eof()) fail("unexpected end of input");
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    get();
  }

  void skip_ws() {
    while (!eof()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        get();
      } else if (c == '#') {
        while (!eof() && peek() != '\n') get();
      } else {
        break;
      }
    }
  }

  bool starts_with_keyword(std::string_view kw) const {
    if (text_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i)
      if (std::toupper(static_cast<unsigned char>(text_[pos_ + i])) != kw[i]) return false;
    char after = peek(kw.size());
    return after == ' ' || after == '\t' || after == '<' || after == '\n' || after == '\r';
  }

  void directive() {
    get();  // '@'
    std::string word;
    while (std::isalpha(static_cast<unsigned char>(peek()))) word += get();
    skip_ws();
    if (word == "prefix") {
      std::string prefix = pname_prefix();
      expect(':');
      skip_ws();
      std::string iri = iriref();
      prefixes_[prefix] = iri;
      graph_->add_prefix(prefix, iri);
    } else if (word == "base") {
      base_ = iriref();
    } else {
      fail("unknown directive @" + word);
    }
    expect('.');
  }

  void sparql_directive() {
    bool is_prefix = starts_with_keyword("PREFIX");
    pos_ += is_prefix ? 6 : 4;
    col_ += is_prefix ? 6 : 4;
    skip_ws();
    if (is_prefix) {
      std::string prefix = pname_prefix();
      expect(':');
      skip_ws();
      std::string iri = iriref();
      prefixes_[prefix] = iri;
      graph_->add_prefix(prefix, iri);
    } else {
      base_ = iriref();
    }
  }

  std::string pname_prefix() {
    std::string p;
    while (!eof() && peek() != ':' && is_pn_char(peek())) p += get();
    return p;
  }

  static bool is_pn_char(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '-' || c == '.' || u >= 0x80;
  }

  void triples_statement() {
    skip_ws();
    Term subject;
    if (peek() == '[') {
      subject = blank_property_list();
      skip_ws();
      if (peek() == '.') {
        get();
        return;
      }
    } else {
      subject = subject_term();
    }
    predicate_object_list(subject);
    expect('.');
  }

  Term subject_term() {
    skip_ws();
    char c = peek();
    if (c == '<') return Term::iri(iriref());
    if (c == '_' && peek(1) == ':') return blank_label();
    if (c == '(') return collection();
    return Term::iri(prefixed_name());
  }

  void predicate_object_list(const Term& subject) {
    while (true) {
      skip_ws();
      Term predicate = verb();
      object_list(subject, predicate);
      skip_ws();
      if (peek() != ';') return;
      while (peek() == ';') {
        get();
        skip_ws();
      }
      char c = peek();
      if (c == '.' || c == ']' || eof()) return;
    }
  }

  Term verb() {
    skip_ws();
    if (peek() == 'a') {
      char n = peek(1);
      if (n == ' ' || n == '\t' || n == '\n' || n == '\r' || n == '<' || n == '[' || n == '"')
        {
        get();
        return rdf_type();
      }
    }
    if (peek() == '<') return Term::iri(iriref());
    return Term::iri(prefixed_name());
  }

  void object_list(const Term& subject, const Term& predicate) {
    while (true) {
      Term o = object_term();
      graph_->add(subject, predicate, std::move(o));
      skip_ws();
      if (peek() != ',') return;
      get();
    }
  }

  Term object_term() {
    skip_ws();
    char c = peek();
    if (c == '<') return Term::iri(iriref());
    if (c == '_' && peek(1) == ':') return blank_label();
    if (c == '[') return blank_property_list();
    if (c == '(') return collection();
    if (c == '"' || c == '\'') return string_literal();
    if (c == '+' || c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c)))
      return numeric_literal();
    if (text_.substr(pos_, 4) == "true" && !is_pn_char(peek(4)) && peek(4) != ':') {
      for (int i = 0; i < 4; ++i) get();
      return Term::literal("true", "boolean");
    }
    if (text_.substr(pos_, 5) == "false" && !is_pn_char(peek(5)) && peek(5) != ':') {
      for (int i = 0; i < 5; ++i) get();
      return Term::literal("false", "boolean");
    }
    return Term::iri(prefixed_name());
  }

  // Document labels are kept verbatim; anonymous nodes get "genid-N".
  Term fresh_blank() { return Term::blank("genid-" + std::to_string(blank_counter_++)); }

  Term blank_label() {
    get();
    get();
    std::string label;
    while (!eof() && is_pn_char(peek())) label += get();
    while (!label.empty() && label.back() == '.') {
      label.pop_back();
      --pos_;
      --col_;
    }
    if (label.empty()) fail("empty blank node label");
    return Term::blank(std::move(label));
  }

  Term blank_property_list() {
    expect('[');
    Term node = fresh_blank();
    skip_ws();
    if (peek() == ']') {
      get();
      return node;
    }
    predicate_object_list(node);
    expect(']');
    return node;
  }

  Term collection() {
    expect('(');
    std::vector<Term> items;
    skip_ws();
    while (peek() != ')') {
      if (eof()) fail("unterminated collection");
      items.push_back(object_term());
      skip_ws();
    }
    get();
    Term nil = Term::iri(iri_of(ns::rdf, "nil"));
    if (items.empty()) return nil;
    Term first_iri = Term::iri(iri_of(ns::rdf, "first"));
    Term rest_iri = Term::iri(iri_of(ns::rdf, "rest"));
    Term head = fresh_blank();
    Term node = head;
    for (std::size_t i = 0; i < items.size(); ++i) {
      graph_->add(node, first_iri, items[i]);
      Term next = i + 1 < items.size() ? fresh_blank() : nil;
      graph_->add(node, rest_iri, next);
      node = next;
    }
    return head;
  }

  std::string resolve(std::string iri) const {
    if (base_.empty()) return iri;
    auto colon = iri.find(':');
    auto slash = iri.find('/');
    if (colon != std::string::npos && (slash == std::string::npos || colon < slash)) return iri;
    if (iri.empty()) return base_;
    if (iri[0] == '#') {
      return base_.substr(0, base_.find('#')) + iri;
    }
    if (iri[0] == '/') {
      auto scheme_end = base_.find("://");
      auto host_end = scheme_end == std::string::npos
                          ? std::string::npos
                          : base_.find('/', scheme_end + 3);
      return base_.substr(0, host_end) + iri;
    }
    return base_.substr(0, base_.find_last_of('/') + 1) + iri;
  }

  std::string iriref() {
    skip_ws();
    if (peek() != '<') fail("expected IRI");
    get();
    std::string out;
    while (true) {
      if (eof()) fail("unterminated IRI");
      char c = get();
      if (c == '>') break;
      if (c == '\\') {
        char k = get();
        if (k == 'u') append_utf8(out, hex(4));
        else if (k == 'U') append_utf8(out, hex(8));
        else fail("bad IRI escape");
        continue;
      }
      if (c == ' ' || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
          c == '`' || c == '\n')
        fail("illegal character in IRI");
      out += c;
    }
    return resolve(std::move(out));
  }

  std::string prefixed_name() {
    skip_ws();
    std::string prefix = pname_prefix();
    if (peek() != ':') fail("expected prefixed name or IRI");
    get();
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail("undeclared prefix '" + prefix + "'");
    std::string local;
    while (!eof()) {
      char c = peek();
      if (c == '\\') {
        get();
        local += get();
      } else if (c == '%') {
        local += get();
        local += get();
        local += get();
      } else if (is_pn_char(c) || c == ':') {
        local += get();
      } else {
        break;
      }
    }
    while (!local.empty() && local.back() == '.') {
      local.pop_back();
      --pos_;
      --col_;
    }
    return it->second + local;
  }

  std::uint32_t hex(int digits) {
    std::uint32_t v = 0;
    for (int i = 0; i < digits; ++i) {
      char c = get();
      v <<= 4;
      if (c >= '0' && c <= '9') v |= static_cast<std::uint32_t>(c - '0');
      else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint32_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') v |= static_cast<std::uint32_t>(c - 'A' + 10);
      else fail("bad hex digit");
    }
    return v;
  }

  static void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  Term string_literal() {
    const char q = get();
    bool long_form = peek() == q && peek(1) == q;
    if (long_form) {
      get();
      get();
    } else if (peek() == q) {
      // Empty short string.
      get();
      return finish_literal("");
    }
    std::string lexical;
    while (true) {
      if (eof()) fail("unterminated string literal");
      char c = peek();
      if (long_form) {
        if (c == q && peek(1) == q && peek(2) == q) {
          get();
          get();
          get();
          // Quotes just before the closing delimiter belong to the content.
          while (peek() == q) lexical += get();
          break;
        }
      } else {
        if (c == q) {
          get();
          break;
        }
        if (c == '\n' || c == '\r') fail("newline in short string literal");
      }
      get();
      if (c == '\\') {
        char k = get();
        switch (k) {
          case 't': lexical += '\t'; break;
          case 'b': lexical += '\b'; break;
          case 'n': lexical += '\n'; break;
          case 'r': lexical += '\r'; break;
          case 'f': lexical += '\f'; break;
          case '"': lexical += '"'; break;
          case '\'': lexical += '\''; break;
          case '\\': lexical += '\\'; break;
          case 'u': append_utf8(lexical, hex(4)); break;
          case 'U': append_utf8(lexical, hex(8)); break;
          default: fail(std::string("bad string escape \\") + k);
        }
      } else {
        lexical += c;
      }
    }
    return finish_literal(std::move(lexical));
  }

  Term finish_literal(std::string lexical) {
    if (peek() == '@') {
      get();
      std::string lang;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-') lang += get();
      if (lang.empty()) fail("empty language tag");
      return Term::lang_literal(std::move(lexical), std::move(lang));
    }
    if (peek() == '^' && peek(1) == '^') {
      get();
      get();
      std::string dt = peek() == '<' ? iriref() : prefixed_name();
      return Term::typed(std::move(lexical), std::move(dt));
    }
    return Term::literal(std::move(lexical));
  }

  Term numeric_literal() {
    std::string lex;
    if (peek() == '+' || peek() == '-') lex += get();
    bool dot = false, exp = false;
    while (!eof()) {
      char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c))) {
        lex += get();
      } else if (c == '.' && !dot && !exp &&
                 std::isdigit(static_cast<unsigned char>(peek(1)))) {
        dot = true;
        lex += get();
      } else if ((c == 'e' || c == 'E') && !exp) {
        exp = true;
        lex += get();
        if (peek() == '+' || peek() == '-') lex += get();
      } else {
        break;
      }
    }
    if (lex.empty() || lex == "+" || lex == "-") fail("malformed number");
    if (exp) return Term::literal(std::move(lex), "double");
    if (dot) return Term::literal(std::move(lex), "decimal");
    return Term::literal(std::move(lex), "integer");
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  std::string base_;
  std::unordered_map<std::string, std::string> prefixes_;
  std::size_t blank_counter_ = 0;
  Graph* graph_ = nullptr;
};

/// Parses Turtle or N-Triples text.
inline Graph parse_turtle(std::string_view text, std::string file = {}) {
  return TurtleParser(text, std::move(file)).parse();
}

inline Graph load_graph(const std::filesystem::path& path) {
  std::string text;
  try {
    text = mdprof::detail::read_file(path);
  } catch (const Error&) {
    throw Error(ErrorCode::UnreadablePath, "cannot read " + path.string());
  }
  return parse_turtle(text, path.string());
}

}  // namespace mdprof::rdf
