#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mdprof/rdf_model.hpp"

namespace mdprof::rdf {

enum class Syntax { turtle, ntriples };

namespace detail {

inline void escape_string(std::string& out, std::string_view s) {
  for (unsigned char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20 || c == 0x7F) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04X", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
}

inline void escape_iri(std::string& out, std::string_view s) {
  for (unsigned char c : s) {
    if (c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' ||
        c == '^' || c == '`' || c == '\\') {
      char buf[12];
      std::snprintf(buf, sizeof buf, "\\u%04X", c);
      out += buf;
    } else {
      out += static_cast<char>(c);
    }
  }
}

inline bool valid_local(std::string_view local) {
  if (local.empty()) return true;
  auto ok_first = [](unsigned char c) { return std::isalnum(c) || c == '_'; };
  auto ok_mid = [](unsigned char c) { return std::isalnum(c) || c == '_' || c == '-' || c == '.'; };
  if (!ok_first(static_cast<unsigned char>(local.front()))) return false;
  if (local.back() == '.') return false;
  return std::all_of(local.begin(), local.end(),
                     [&](char c) { return ok_mid(static_cast<unsigned char>(c)); });
}

inline bool valid_blank_label(std::string_view label) {
  if (label.empty() || label.back() == '.') return false;
  return std::all_of(label.begin(), label.end(), [](char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '-' || c == '.';
  });
}

class TermWriter {
 public:
  TermWriter(const PrefixMap* prefixes) : prefixes_(prefixes) {}

  void iri(std::string& out, std::string_view value) const {
    if (prefixes_) {
      const std::pair<std::string, std::string>* best = nullptr;
      for (const auto& p : *prefixes_)
        if (value.substr(0, p.second.size()) == p.second &&
            (!best || p.second.size() > best->second.size()) &&
            valid_local(value.substr(p.second.size())))
          best = &p;
      if (best) {
        out += best->first;
        out += ':';
        out += value.substr(best->second.size());
        return;
      }
    }
    out += '<';
    escape_iri(out, value);
    out += '>';
  }

  void term(std::string& out, const Term& t) const {
    switch (t.kind) {
      case TermKind::iri:
        iri(out, t.value);
        return;
      case TermKind::blank:
        out += "_:";
        if (valid_blank_label(t.value)) {
          out += t.value;
        } else {
          // Hex-encode labels that are not valid Turtle labels.
          out += 'x';
          for (unsigned char c : t.value) {
            char buf[3];
            std::snprintf(buf, sizeof buf, "%02x", c);
            out += buf;
          }
        }
        return;
      case TermKind::literal:
        out += '"';
        escape_string(out, t.value);
        out += '"';
        if (!t.lang.empty()) {
          out += '@';
          out += t.lang;
        } else if (t.datatype != iri_of(ns::xsd, "string") && !t.datatype.empty()) {
          out += "^^";
          iri(out, t.datatype);
        }
        return;
    }
  }

 private:
  const PrefixMap* prefixes_;
};

}  // namespace detail

/// One triple per line, lines sorted bytewise.
inline std::string to_ntriples(const Graph& g) {
  detail::TermWriter w(nullptr);
  std::vector<std::string> lines;
  lines.reserve(g.triples.size());
  for (const auto& t : g.triples) {
    std::string line;
    w.term(line, t.subject);
    line += ' ';
    w.term(line, t.predicate);
    line += ' ';
    w.term(line, t.object);
    line += " .\n";
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l;
  return out;
}

/// Subjects in term order, rdf:type first, then remaining predicates in
/// term order.
inline std::string to_turtle(const Graph& g) {
  PrefixMap prefixes = standard_prefixes();
  for (const auto& p : g.prefixes)
    if (std::none_of(prefixes.begin(), prefixes.end(),
                     [&](const auto& q) { return q.first == p.first; }))
      prefixes.push_back(p);
  detail::TermWriter w(&prefixes);

  std::string out;
  for (const auto& [prefix, iri] : prefixes) {
    out += "@prefix ";
    out += prefix;
    out += ": <";
    detail::escape_iri(out, iri);
    out += "> .\n";
  }

  const Term type = rdf_type();
  auto it = g.triples.begin();
  while (it != g.triples.end()) {
    const Term& subject = it->subject;
    std::map<Term, std::vector<const Term*>> by_predicate;
    std::vector<const Term*> types;
    for (; it != g.triples.end() && it->subject == subject; ++it) {
      if (it->predicate == type)
        types.push_back(&it->object);
      else
        by_predicate[it->predicate].push_back(&it->object);
    }
    out += '\n';
    w.term(out, subject);
    bool first = true;
    auto emit = [&](auto&& write_predicate, const std::vector<const Term*>& objects) {
      out += first ? " " : " ;\n    ";
      first = false;
      write_predicate();
      for (std::size_t i = 0; i < objects.size(); ++i) {
        out += i ? ", " : " ";
        w.term(out, *objects[i]);
      }
    };
    if (!types.empty()) emit([&] { out += 'a'; }, types);
    for (const auto& [p, objs] : by_predicate) emit([&] { w.term(out, p); }, objs);
    out += " .\n";
  }
  return out;
}

inline std::string serialize(const Graph& g, Syntax syntax) {
  return syntax == Syntax::turtle ? to_turtle(g) : to_ntriples(g);
}

}  // namespace mdprof::rdf
