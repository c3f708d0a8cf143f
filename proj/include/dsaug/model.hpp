// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef DSAUG_MODEL_HPP
#define DSAUG_MODEL_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dsaug/corpus.hpp"
#include "dsaug/melfile.hpp"
#include "dsaug/nn.hpp"
#include "dsaug/pause_model.hpp"
#include "dsaug/rng.hpp"
#include "dsaug/text_frontend.hpp"
#include "dsaug/variance_adaptor.hpp"

namespace dsaug {

// Toy-scale defaults; paper-scale values (d_model 256, 4 blocks) are
// reachable through the same fields.
struct ModelConfig {
  int d_model = 32;
  int n_blocks_enc = 2;
  int n_blocks_dec = 2;
  int n_heads = 2;
  int ffn_conv_width = 3;
  int ffn_hidden = 32;
  int n_mels = 80;
  int n_speakers = 0;
  int n_phones = 0;
  int max_seq = 4000;
  int predictor_kernel = 3;
  int predictor_hidden = 32;
  int n_bins = 256;
  double dropout_rate = 0.5;
  double frame_seconds = 256.0 / 22050.0;
  // Quantization ranges for the pitch/energy embeddings; fixed at training
  // time from the target value ranges.
  double pitch_lo = 0.0, pitch_hi = 1.0;
  double energy_lo = 0.0, energy_hi = 1.0;

  void validate() const;
  BinSpec pitch_bins() const { return {pitch_lo, pitch_hi, n_bins}; }
  BinSpec energy_bins() const { return {energy_lo, energy_hi, n_bins}; }
  bool operator==(const ModelConfig& o) const = default;
};

struct ModelParams {
  ModelConfig config;
  nn::ParamStore store;
  std::vector<std::string> speakers;  // row order of the speaker table
  std::vector<std::string> phones;    // row order of the phoneme table

  static ModelParams init(const ModelConfig& config,
                          std::vector<std::string> speakers,
                          std::vector<std::string> phones,
                          std::uint64_t seed);

  int speaker_index(const std::string& speaker_id) const;
};

struct ProsodyControls {
  double pitch_coef = 1.0;
  double energy_coef = 1.0;
  double duration_coef = 1.0;
  double severity_coef = 0.0;
  bool pause_insertion = false;

  void validate() const;
};

struct TrainingExample {
  PhraseSpec spec;
  int speaker = 0;
  int severity_class = 0;
  nn::Matrix mel;                 // frames x n_mels
  std::vector<long> durations;    // per phone, sums to mel rows
  std::vector<double> pitch;      // per phone
  std::vector<double> energy;     // per phone

  void validate(const ModelConfig& config) const;
};

struct SynthesisDiagnostics {
  std::vector<long> durations;
  std::vector<double> pitch;
  std::vector<double> energy;
  std::set<int> inserted_slots;
};

// Optional taps into the forward pass, used by the shape/normalization tests.
struct ForwardHooks {
  std::vector<nn::Matrix>* attentions = nullptr;
};

nn::Matrix sinusoidal_positions(long t_len, int width);

// Encoder output: embeddings + positions -> FFT blocks -> speaker row added.
nn::Matrix encode(const ModelParams& params, const PhraseSpec& spec,
                  int speaker, ForwardHooks* hooks = nullptr);

MelSpectrogram synthesize(const ModelParams& params, const PhraseSpec& spec,
                          int speaker, const ProsodyControls& controls,
                          const PauseModel& pause_model, const Lexicon& lexicon,
                          Rng& rng, SynthesisDiagnostics* diag = nullptr);

struct TrainOptions {
  long steps = 500;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
};

// Teacher-forced training; returns the per-step total loss curve. Aborts
// with InternalError if the loss becomes non-finite.
std::vector<double> train(ModelParams& params,
                          const std::vector<TrainingExample>& examples,
                          const TrainOptions& options);

// Tape-level builders, shared between train() and the gradient-check tests.
int build_encoder(nn::Tape& tape, const nn::ParamGraph& graph,
                  const ModelConfig& config, const std::vector<int>& phones,
                  int speaker, ForwardHooks* hooks = nullptr);
int build_training_loss(nn::Tape& tape, const nn::ParamGraph& graph,
                        const ModelConfig& config, const TrainingExample& ex,
                        bool train_mode, Rng& rng,
                        ForwardHooks* hooks = nullptr);

void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path,
                            const ModelConfig* expected_config = nullptr);

}  // namespace dsaug

#endif  // DSAUG_MODEL_HPP
