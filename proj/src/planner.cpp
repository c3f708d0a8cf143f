// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "dsaug/planner.hpp"

#include <fstream>
#include <set>

#include "dsaug/errors.hpp"
#include "dsaug/rng.hpp"
#include "json.hpp"

namespace dsaug {

using nlohmann::json;

void ExperimentGrid::validate() const {
  if (pitch.empty() || energy.empty() || duration.empty() || severity.empty())
    throw DataError("experiment grid: coefficient lists must be nonempty");
  if (multiplier < 1) throw DataError("experiment grid: multiplier must be >= 1");
  for (double v : pitch)
    if (v <= 0.0) throw DataError("experiment grid: pitch coefficients must be > 0");
  for (double v : energy)
    if (v <= 0.0) throw DataError("experiment grid: energy coefficients must be > 0");
  for (double v : duration)
    if (v <= 0.0) throw DataError("experiment grid: duration coefficients must be > 0");
  for (double v : severity)
    if (v < 0.0 || v > 2.0)
      throw DataError("experiment grid: severity coefficients must be in [0,2]");
}

std::size_t ExperimentGrid::cartesian_size() const {
  return pitch.size() * energy.size() * duration.size() * severity.size();
}

ProsodyControls ExperimentGrid::combination(std::size_t index) const {
  if (index >= cartesian_size())
    throw InternalError("experiment grid: combination index out of range");
  // Mixed-radix decode, severity fastest.
  ProsodyControls c;
  c.severity_coef = severity[index % severity.size()];
  index /= severity.size();
  c.duration_coef = duration[index % duration.size()];
  index /= duration.size();
  c.energy_coef = energy[index % energy.size()];
  index /= energy.size();
  c.pitch_coef = pitch[index];
  c.pause_insertion = pause_insertion;
  return c;
}

BuiltinExperiment parse_experiment(const std::string& name) {
  if (name == "exp1") return BuiltinExperiment::kExp1;
  if (name == "exp2") return BuiltinExperiment::kExp2;
  throw DataError("unknown experiment '" + name + "' (expected exp1 or exp2)");
}

ExperimentGrid builtin_grid(BuiltinExperiment name) {
  ExperimentGrid grid;
  switch (name) {
    case BuiltinExperiment::kExp1:
      grid.pitch = {1.0};
      grid.energy = {1.0};
      grid.duration = {1.0};
      grid.severity = {0.0, 1.0, 2.0};
      grid.pause_insertion = true;
      grid.multiplier = 3;
      break;
    case BuiltinExperiment::kExp2:
      grid.pitch = {0.1, 0.6, 1.2, 1.75};
      grid.energy = {0.1, 1.0, 2.0};
      grid.duration = {1.0, 1.3, 1.6, 1.8};
      grid.severity = {0.0, 1.0, 2.0};
      grid.pause_insertion = true;
      grid.multiplier = 10;
      break;
  }
  return grid;
}

std::vector<SynthesisSpecRecord> plan(const std::vector<UtteranceRecord>& records,
                                      const ExperimentGrid& grid,
                                      std::uint64_t plan_seed) {
  grid.validate();
  if (records.empty()) throw DataError("plan: no records");
  std::set<std::string> seen;
  for (const auto& rec : records)
    if (!seen.insert(rec.utterance_id).second)
      throw DataError("plan: duplicate utterance_id '" + rec.utterance_id + "'");

  const std::size_t product = grid.cartesian_size();
  std::vector<SynthesisSpecRecord> specs;
  specs.reserve(records.size() * std::size_t(grid.multiplier));
  for (const auto& rec : records) {
    std::vector<std::size_t> indices;
    if (product <= std::size_t(grid.multiplier)) {
      // Exhaustive enumeration, repeated cyclically if the multiplier asks
      // for more variants than the grid has points.
      for (int i = 0; i < grid.multiplier; ++i)
        indices.push_back(std::size_t(i) % product);
    } else {
      Rng rng(stable_hash(plan_seed, rec.utterance_id, 0));
      indices = rng.sample_without_replacement(product,
                                               std::size_t(grid.multiplier));
    }
    for (int variant = 0; variant < grid.multiplier; ++variant) {
      SynthesisSpecRecord spec;
      spec.utterance_id = rec.utterance_id;
      spec.variant_index = variant;
      spec.speaker_id = rec.speaker_id;
      spec.transcript = rec.transcript;
      spec.controls = grid.combination(indices[std::size_t(variant)]);
      spec.seed = stable_hash(plan_seed, rec.utterance_id,
                              std::uint64_t(variant));
      specs.push_back(std::move(spec));
    }
  }
  return specs;
}

void write_plan(const std::vector<SynthesisSpecRecord>& specs,
                const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InternalError("cannot write plan: " + path);
  for (const auto& s : specs) {
    json j{{"utterance_id", s.utterance_id},
           {"variant_index", s.variant_index},
           {"speaker_id", s.speaker_id},
           {"transcript", s.transcript},
           {"pitch_coef", s.controls.pitch_coef},
           {"energy_coef", s.controls.energy_coef},
           {"duration_coef", s.controls.duration_coef},
           {"severity_coef", s.controls.severity_coef},
           {"pause_insertion", s.controls.pause_insertion},
           {"seed", s.seed}};
    out << j.dump() << '\n';
  }
}

std::vector<SynthesisSpecRecord> read_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open plan: " + path);
  std::vector<SynthesisSpecRecord> specs;
  std::set<std::pair<std::string, int>> seen;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(where + ": invalid JSON: " + e.what());
    }
    SynthesisSpecRecord s;
    try {
      s.utterance_id = j.at("utterance_id").get<std::string>();
      s.variant_index = j.at("variant_index").get<int>();
      s.speaker_id = j.at("speaker_id").get<std::string>();
      s.transcript = j.at("transcript").get<std::string>();
      s.controls.pitch_coef = j.at("pitch_coef").get<double>();
      s.controls.energy_coef = j.at("energy_coef").get<double>();
      s.controls.duration_coef = j.at("duration_coef").get<double>();
      s.controls.severity_coef = j.at("severity_coef").get<double>();
      s.controls.pause_insertion = j.at("pause_insertion").get<bool>();
      s.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    s.controls.validate();
    if (!seen.insert({s.utterance_id, s.variant_index}).second)
      throw DataError(where + ": duplicate (utterance_id, variant_index)");
    specs.push_back(std::move(s));
  }
  return specs;
}

}  // namespace dsaug
