// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef DSAUG_TOY_CORPUS_HPP
#define DSAUG_TOY_CORPUS_HPP

#include <string>
#include <vector>

#include "dsaug/corpus.hpp"
#include "dsaug/model.hpp"
#include "dsaug/text_frontend.hpp"

namespace dsaug {

// Deterministic phone-conditioned synthetic corpus. Durations grow with
// severity class, mel/pitch/energy patterns are fixed functions of phone
// identity, so the generator doubles as the training oracle: a model that
// learns it must reproduce the severity-duration correlation.
namespace toy {

struct Speaker {
  std::string id;
  RawSeverity severity;
};

Lexicon lexicon();
std::vector<Speaker> speakers();
std::vector<std::string> train_sentences();
std::vector<std::string> heldout_sentences();

// Target generators (phone ids refer to lexicon() inventory order).
long phone_duration(int phone_id, int severity_class);
double phone_pitch(int phone_id, int severity_class);
double phone_energy(int phone_id, int severity_class);
nn::Matrix phone_mel(int phone_id, long duration, int n_mels);

ModelConfig config();

// One example per (speaker, sentence); dysarthric classes carry
// deterministic inserted pauses so the duration head sees "sp" tokens.
std::vector<TrainingExample> training_set(const Lexicon& lex,
                                          const ModelConfig& config);
TrainingExample example(const Lexicon& lex, const ModelConfig& config,
                        const std::string& sentence, int speaker_index,
                        int severity_class);

// Builds an example from a manifest record: phones and durations come from
// its alignment, mel/pitch/energy targets from the procedural generators.
TrainingExample example_from_record(const Lexicon& lex,
                                    const ModelConfig& config,
                                    const UtteranceRecord& record,
                                    int speaker_index);

// Writes manifest + alignment files mirroring training_set() into `dir`.
void write_corpus_files(const std::string& dir);

}  // namespace toy

// Manifest + alignments whose per-group between-word pause means are exactly
// 26/100, 57/100, 121/100 and 251/100.
void write_pause_fixture(const std::string& dir);

}  // namespace dsaug

#endif  // DSAUG_TOY_CORPUS_HPP
