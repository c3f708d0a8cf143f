// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef DSAUG_PAUSE_MODEL_HPP
#define DSAUG_PAUSE_MODEL_HPP

#include <array>
#include <set>
#include <string>

#include "dsaug/corpus.hpp"
#include "dsaug/rng.hpp"
#include "dsaug/text_frontend.hpp"

namespace dsaug {

// Per-class probability that an inter-word slot receives a pause.
struct PauseModel {
  std::array<double, 3> slot_prob{0.0, 0.0, 0.0};

  double prob(SeverityClass c) const { return slot_prob[std::size_t(c.index())]; }
};

// Collapses the four raw groups onto the three classes (class 1 pools
// very_low and low by sentence-count-weighted means) and sets
// slot_prob = clamp(mean_pauses / mean_slots, 0, 1).
PauseModel calibrate(const PauseStats& stats);

// Stochastic rounding of lambda = slot_prob * (n_words - 1): the expected
// count matches lambda exactly while staying integral per sentence.
int pause_count(const PauseModel& model, int n_words, SeverityClass cls,
                Rng& rng);

// Uniform sample of `count` distinct slot indices.
std::set<int> choose_slots(int count, const PhraseSpec& spec, Rng& rng);

// JSON round-trip, `{"format": 1, "slot_prob": {...}}`.
void save_pause_model(const PauseModel& model, const std::string& path);
PauseModel load_pause_model(const std::string& path);

}  // namespace dsaug

#endif  // DSAUG_PAUSE_MODEL_HPP
