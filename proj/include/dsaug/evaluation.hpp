// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef DSAUG_EVALUATION_HPP
#define DSAUG_EVALUATION_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dsaug/corpus.hpp"

namespace dsaug {

struct WerBreakdown {
  long substitutions = 0;
  long deletions = 0;
  long insertions = 0;
  long ref_words = 0;
  double wer = 0.0;
};

// Minimum-edit-distance alignment with unit costs; ties prefer a
// substitution over an insertion+deletion pair.
WerBreakdown wer(const std::vector<std::string>& reference,
                 const std::vector<std::string>& hypothesis);

struct LosoSplit {
  std::string test_speaker;
  std::set<std::string> train_speakers;
};

// One split per dysarthric speaker; the train side holds everyone else.
std::vector<LosoSplit> loso_splits(const std::vector<UtteranceRecord>& records);

struct GroupReport {
  std::map<std::string, double> per_speaker;
  std::map<std::string, double> per_group;
  double overall = 0.0;  // macro-average over speakers
};

GroupReport group_average(const std::map<std::string, double>& per_speaker,
                          const std::map<std::string, std::string>& groups);

// 100 * (baseline - experimental) / baseline.
double relative_improvement(double baseline, double experimental);

// One-decimal display value, round-half-even.
double display_round1(double value);

}  // namespace dsaug

#endif  // DSAUG_EVALUATION_HPP
