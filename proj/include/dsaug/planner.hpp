// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef DSAUG_PLANNER_HPP
#define DSAUG_PLANNER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dsaug/corpus.hpp"
#include "dsaug/model.hpp"

namespace dsaug {

// Coefficient grid for one augmentation experiment; a plan draws
// `multiplier` combinations per utterance from the Cartesian product.
struct ExperimentGrid {
  std::vector<double> pitch;
  std::vector<double> energy;
  std::vector<double> duration;
  std::vector<double> severity;
  bool pause_insertion = true;
  int multiplier = 1;

  void validate() const;
  std::size_t cartesian_size() const;
  ProsodyControls combination(std::size_t index) const;
};

enum class BuiltinExperiment { kExp1, kExp2 };

BuiltinExperiment parse_experiment(const std::string& name);
ExperimentGrid builtin_grid(BuiltinExperiment name);

struct SynthesisSpecRecord {
  std::string utterance_id;
  int variant_index = 0;
  std::string speaker_id;
  std::string transcript;
  ProsodyControls controls;
  std::uint64_t seed = 0;
};

// One spec per (utterance, variant). When the grid's Cartesian product is no
// larger than the multiplier the combinations are enumerated exhaustively;
// otherwise `multiplier` distinct combinations are sampled uniformly, seeded
// by (plan_seed, utterance_id) so output is independent of record order.
std::vector<SynthesisSpecRecord> plan(const std::vector<UtteranceRecord>& records,
                                      const ExperimentGrid& grid,
                                      std::uint64_t plan_seed);

void write_plan(const std::vector<SynthesisSpecRecord>& specs,
                const std::string& path);
std::vector<SynthesisSpecRecord> read_plan(const std::string& path);

}  // namespace dsaug

#endif  // DSAUG_PLANNER_HPP
