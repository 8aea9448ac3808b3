#pragma once

// JSON rendering of profiles and catalog records, used by `mdprof show`.

#include <nlohmann/json.hpp>

#include "mdprof/metagraph.hpp"
#include "mdprof/profiler.hpp"

namespace mdprof {

inline nlohmann::ordered_json to_json(const Profile& profile) {
  using J = nlohmann::ordered_json;
  return std::visit(
      [](const auto& p) -> J {
        using P = std::decay_t<decltype(p)>;
        J j;
        if constexpr (std::is_same_v<P, DProfile>) {
          j["kind"] = "dimensional";
          j["level"] = p.level;
          j["others"] = p.others;
          j["members"] = J::array();
          for (const auto& e : p.elements) j["members"].push_back({{"member", e.member}, {"frequency", e.frequency}});
        } else if constexpr (std::is_same_v<P, NumericProfile>) {
          j["kind"] = p.integral ? "integer" : "decimal";
          j["max"] = p.max;
          j["min"] = p.min;
          j["mean"] = p.mean;
          j["median"] = p.median;
          j["distinct"] = p.distinct;
          j["null"] = p.null;
          j["distribution"] = J::array();
          for (const auto& e : p.distribution.elements)
            j["distribution"].push_back({{"start", e.start_range}, {"end", e.end_range}, {"count", e.count}});
        } else if constexpr (std::is_same_v<P, CategoricalProfile>) {
          j["kind"] = "categorical";
          j["null"] = p.null;
          j["categories"] = J::array();
          for (const auto& c : p.categories) j["categories"].push_back({{"value", c.value}, {"count", c.count}});
        } else if constexpr (std::is_same_v<P, DatetimeProfile>) {
          j["kind"] = "datetime";
          j["distinct"] = p.distinct;
          j["null"] = p.null;
          j["min"] = format_timestamp(p.min_date);
          j["max"] = format_timestamp(p.max_date);
          j["years"] = J::array();
          for (const auto& y : p.years) j["years"].push_back({{"year", y.year}, {"count", y.count}});
        } else if constexpr (std::is_same_v<P, TextualProfile>) {
          j["kind"] = "textual";
          j["null"] = p.null;
          j["words_total"] = p.words_total;
          j["words"] = J::array();
          for (const auto& w : p.words) j["words"].push_back({{"word", w.value}, {"count", w.count}});
        } else {
          j["kind"] = "unrecognized";
          j["null"] = p.null;
        }
        return j;
      },
      profile);
}

inline nlohmann::ordered_json to_json(const SourceRecord& rec) {
  nlohmann::ordered_json j;
  j["source"] = rec.iri;
  j["location"] = rec.meta.location;
  j["items"] = rec.meta.items;
  j["domains"] = rec.meta.domains;
  auto opt = [&](const char* key, const std::optional<std::string>& v) {
    if (v) j[key] = *v;
  };
  opt("title", rec.meta.title);
  opt("description", rec.meta.description);
  opt("format", rec.meta.format);
  opt("creator", rec.meta.creator);
  opt("publisher", rec.meta.publisher);
  opt("date", rec.meta.date);
  opt("license", rec.meta.license);
  j["attributes"] = nlohmann::ordered_json::array();
  for (const auto& a : rec.attributes) {
    nlohmann::ordered_json aj;
    aj["name"] = a.name;
    aj["category"] = to_string(a.category);
    if (a.map_to) aj["mapTo"] = *a.map_to;
    aj["profile"] = to_json(a.profile);
    j["attributes"].push_back(std::move(aj));
  }
  return j;
}

}  // namespace mdprof
