// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "dsaug/evaluation.hpp"

#include <cfenv>
#include <cmath>

#include "dsaug/errors.hpp"

namespace dsaug {

WerBreakdown wer(const std::vector<std::string>& reference,
                 const std::vector<std::string>& hypothesis) {
  if (reference.empty()) throw DataError("wer: reference must be nonempty");
  const std::size_t n = reference.size(), m = hypothesis.size();
  // cost[i][j]: min edits aligning ref[0..i) with hyp[0..j).
  std::vector<std::vector<long>> cost(n + 1, std::vector<long>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) cost[i][0] = long(i);
  for (std::size_t j = 0; j <= m; ++j) cost[0][j] = long(j);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      const long sub = cost[i - 1][j - 1] + (reference[i - 1] != hypothesis[j - 1]);
      const long del = cost[i - 1][j] + 1;
      const long ins = cost[i][j - 1] + 1;
      cost[i][j] = std::min({sub, del, ins});
    }
  WerBreakdown result;
  result.ref_words = long(n);
  // Backtrace; diagonal first so ties resolve to substitutions.
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        cost[i][j] == cost[i - 1][j - 1] + (reference[i - 1] != hypothesis[j - 1])) {
      if (reference[i - 1] != hypothesis[j - 1]) ++result.substitutions;
      --i;
      --j;
    } else if (i > 0 && cost[i][j] == cost[i - 1][j] + 1) {
      ++result.deletions;
      --i;
    } else {
      ++result.insertions;
      --j;
    }
  }
  result.wer = double(result.substitutions + result.deletions +
                      result.insertions) /
               double(result.ref_words);
  return result;
}

std::vector<LosoSplit> loso_splits(const std::vector<UtteranceRecord>& records) {
  std::map<std::string, RawSeverity> speaker_severity;
  for (const auto& rec : records) {
    auto it = speaker_severity.find(rec.speaker_id);
    if (it == speaker_severity.end()) {
      speaker_severity[rec.speaker_id] = rec.severity;
    } else if (it->second != rec.severity) {
      throw DataError("speaker '" + rec.speaker_id +
                      "' has inconsistent severity labels");
    }
  }
  if (speaker_severity.size() < 2)
    throw DataError("loso_splits: need at least 2 speakers");
  std::vector<LosoSplit> splits;
  for (const auto& [speaker, severity] : speaker_severity) {
    if (severity == RawSeverity::kNormal) continue;
    LosoSplit split;
    split.test_speaker = speaker;
    for (const auto& [other, _] : speaker_severity)
      if (other != speaker) split.train_speakers.insert(other);
    splits.push_back(std::move(split));
  }
  return splits;
}

GroupReport group_average(const std::map<std::string, double>& per_speaker,
                          const std::map<std::string, std::string>& groups) {
  GroupReport report;
  report.per_speaker = per_speaker;
  std::map<std::string, std::pair<double, long>> acc;
  double total = 0.0;
  for (const auto& [speaker, value] : per_speaker) {
    auto it = groups.find(speaker);
    if (it == groups.end())
      throw DataError("speaker '" + speaker + "' has no group assignment");
    auto& [sum, count] = acc[it->second];
    sum += value;
    count += 1;
    total += value;
  }
  for (const auto& [group, sc] : acc)
    report.per_group[group] = sc.first / double(sc.second);
  report.overall =
      per_speaker.empty() ? 0.0 : total / double(per_speaker.size());
  return report;
}

double relative_improvement(double baseline, double experimental) {
  if (baseline <= 0.0)
    throw DataError("relative improvement requires a positive baseline");
  return 100.0 * (baseline - experimental) / baseline;
}

double display_round1(double value) {
  // nearbyint honors the default round-to-nearest-even mode.
  return std::nearbyint(value * 10.0) / 10.0;
}

}  // namespace dsaug
