// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "dsaug/pause_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "dsaug/errors.hpp"
#include "json.hpp"

namespace dsaug {

using nlohmann::json;

PauseModel calibrate(const PauseStats& stats) {
  PauseModel model;
  for (int cls = 0; cls < 3; ++cls) {
    double pauses = 0.0, slots = 0.0;
    long sentences = 0;
    for (RawSeverity sev : kAllSeverities) {
      if (severity_class(sev).index() != cls) continue;
      auto it = stats.per_group.find(sev);
      if (it == stats.per_group.end() || it->second.sentence_count == 0) continue;
      const auto& g = it->second;
      pauses += g.mean_pauses_per_sentence * double(g.sentence_count);
      slots += g.mean_slots_per_sentence * double(g.sentence_count);
      sentences += g.sentence_count;
    }
    if (sentences == 0 || slots == 0.0)
      throw DataError("pause calibration: class " + std::to_string(cls) +
                      " has no sentences with available slots");
    model.slot_prob[cls] = std::clamp(pauses / slots, 0.0, 1.0);
  }
  return model;
}

int pause_count(const PauseModel& model, int n_words, SeverityClass cls,
                Rng& rng) {
  if (n_words < 1) throw DataError("pause_count: n_words must be >= 1");
  const int slots = n_words - 1;
  if (slots == 0) return 0;
  const double lambda = model.prob(cls) * double(slots);
  const double floor_part = std::floor(lambda);
  int count = int(floor_part);
  if (rng.next_bernoulli(lambda - floor_part)) ++count;
  return std::min(count, slots);
}

std::set<int> choose_slots(int count, const PhraseSpec& spec, Rng& rng) {
  const int slots = pause_slots(spec);
  if (count < 0 || count > slots)
    throw DataError("choose_slots: count " + std::to_string(count) +
                    " exceeds available slots " + std::to_string(slots));
  std::set<int> chosen;
  for (std::size_t idx : rng.sample_without_replacement(std::size_t(slots),
                                                        std::size_t(count)))
    chosen.insert(int(idx));
  return chosen;
}

void save_pause_model(const PauseModel& model, const std::string& path) {
  json j{{"format", 1},
         {"slot_prob",
          {{"0", model.slot_prob[0]},
           {"1", model.slot_prob[1]},
           {"2", model.slot_prob[2]}}}};
  std::ofstream out(path);
  if (!out) throw InternalError("cannot write pause model: " + path);
  out << j.dump(2) << '\n';
}

PauseModel load_pause_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pause model: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }
  if (!j.contains("format") || j.at("format").get<int>() != 1)
    throw DataError(path + ": unsupported pause model format");
  PauseModel model;
  for (int cls = 0; cls < 3; ++cls) {
    const double p = j.at("slot_prob").at(std::to_string(cls)).get<double>();
    if (p < 0.0 || p > 1.0)
      throw DataError(path + ": slot_prob out of [0,1]");
    model.slot_prob[cls] = p;
  }
  return model;
}

}  // namespace dsaug
