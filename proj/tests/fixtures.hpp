#pragma once

// Shared synthetic fixtures for the unit and acceptance tests.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "edqe/eventstore.hpp"

namespace edqe::fixtures {

// An entry of exactly `total` analyzed tokens: the given words with their
// counts, padded with "filler".
inline std::string entry(const std::vector<std::pair<std::string, int>>& words, int total = 1000) {
  std::string text;
  int n = 0;
  for (const auto& [w, c] : words) {
    for (int i = 0; i < c; ++i) text += w + " ";
    n += c;
  }
  for (; n < total; ++n) text += "filler ";
  return text;
}

inline EventRecord event(std::string id, std::string name, int year, std::string text) {
  EventRecord e;
  e.id = std::move(id);
  e.name = std::move(name);
  e.normalized_name = e.name;
  e.year = year;
  e.entry_text = std::move(text);
  e.monthly_views = 10000;
  e.external_refs = 50;
  return e;
}

// Ten events over 1000-token entries, so a count of c gives frequency c/1000.
inline std::vector<EventRecord> detection_events() {
  return {
      event("E01", "1991 Mount Unzen eruption", 1991,
            entry({{"volcano", 6}, {"volcanoes", 4}, {"eruption", 8}, {"ash", 5}})),
      event("E02", "1991 Kilauea lava flow", 1991, entry({{"volcano", 4}, {"eruption", 3}, {"lava", 6}})),
      event("E03", "1991 Hudson eruption", 1991, entry({{"volcano", 2}, {"eruption", 12}})),
      event("E04", "1992 Cerro Negro eruption", 1992,
            entry({{"volcanoes", 9}, {"volcano", 1}, {"eruption", 10}})),
      event("E05", "1986 Chernobyl disaster", 1986, entry({{"nuclear", 20}, {"reactor", 15}, {"disaster", 5}})),
      event("E06", "1986 Kerala reactor scare", 1986, entry({{"nuclear", 6}, {"reactor", 2}, {"disaster", 8}})),
      event("E07", "1986 Nevada test protest", 1986, entry({{"nuclear", 4}, {"disaster", 4}})),
      event("E08", "2002 Prestige oil spill", 2002, entry({{"oil", 12}, {"tanker", 9}, {"spill", 10}})),
      event("E09", "2002 Gulf pipeline leak", 2002, entry({{"oil", 5}, {"spill", 2}})),
      event("E10", "1994 MS Estonia sinking", 1994, entry({{"ferry", 15}, {"sinking", 6}, {"baltic", 5}})),
  };
}

struct DetectionCase {
  std::string query;
  std::vector<std::string> expected;  // event ids, in ranked order
};

// Expected sets enumerated by hand from the counts above (min_score 0.003,
// surface form at least twice, strict majority, mu = 0.5, mean score).
inline std::vector<DetectionCase> detection_cases() {
  return {
      // volcano: E01 .010, E02 .004 (E03 .002 too low, E04 surface once);
      // eruption: E03 .012, E04 .010, E01 .008 (E02 exactly .003)
      {"volcano eruption", {"E01"}},
      // E05 (.020+.015+.005)/3, E06 (.006+.008)/2 = .007 > .5 * .01333,
      // E07 (.004+.004)/2 = .004 dropped by mu
      {"nuclear reactor disaster", {"E05", "E06"}},
      // spill in E09 is .002
      {"oil spill", {"E08"}},
      {"ferry", {"E10"}},
      {"stadium crowd", {}},
      // surface "volcanoes": E01 4x, E04 9x, E02 none; different years
      {"volcanoes", {"E01", "E04"}},
      // E01 has eruption and ash; every other event matches one term of three
      {"eruption ash lava", {"E01"}},
      // 2 of 3 terms: E05 .0125, E06 .007, E07 .004 (dropped); ferry alone fails
      {"nuclear disaster ferry", {"E05", "E06"}},
  };
}

}  // namespace edqe::fixtures
