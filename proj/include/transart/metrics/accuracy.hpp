#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <string_view>

#include "transart/corpus.hpp"
#include "transart/error.hpp"
#include "transart/unicode.hpp"

namespace transart::metrics {

struct GroupStat {
  std::size_t correct = 0;
  std::size_t n = 0;
  double accuracy() const { return n == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(n); }
};

struct GroupAccuracy {
  std::map<std::string, GroupStat> groups;
  GroupStat overall;
};

inline std::string normalize_answer(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return unicode::lower(s.substr(begin, end - begin + 1));
}

/// Exact match after trimming and lowercasing, per group and overall. Without
/// a group map every sample lands in "all". With `allow_missing`, a missing
/// prediction counts as wrong instead of raising MissingPrediction.
inline GroupAccuracy group_accuracy(const std::map<std::string, std::string>& predictions, const Corpus& gold,
                                    const std::map<std::string, std::string>& groups = {},
                                    bool allow_missing = false) {
  GroupAccuracy result;
  for (const Sample& s : gold.samples) {
    if (!s.answer) fail("MissingField", "gold sample " + s.id + " has no answer");
    std::string label = "all";
    if (!groups.empty()) {
      auto g = groups.find(s.id);
      if (g == groups.end()) fail("MissingGroup", s.id);
      label = g->second;
    }
    bool correct = false;
    auto p = predictions.find(s.id);
    if (p == predictions.end()) {
      if (!allow_missing) fail("MissingPrediction", s.id);
    } else {
      correct = normalize_answer(p->second) == normalize_answer(*s.answer);
    }
    GroupStat& stat = result.groups[label];
    ++stat.n;
    ++result.overall.n;
    if (correct) {
      ++stat.correct;
      ++result.overall.correct;
    }
  }
  return result;
}

}  // namespace transart::metrics
