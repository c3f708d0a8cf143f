// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef DSAUG_VARIANCE_ADAPTOR_HPP
#define DSAUG_VARIANCE_ADAPTOR_HPP

#include <string>
#include <vector>

#include "dsaug/nn.hpp"
#include "dsaug/rng.hpp"

namespace dsaug {

// Linear quantization over [lo, hi] with out-of-range values clamped to the
// edge bins.
struct BinSpec {
  double lo = 0.0;
  double hi = 1.0;
  int n_bins = 256;

  int bin_of(double value) const;
};

// Shared 2-layer conv -> ReLU -> layer-norm -> dropout stack with a final
// linear projection to one scalar per step. Used for the duration, pitch,
// energy and severity heads.
struct PredictorShape {
  int kernel_width = 3;
  int in_width = 0;
  int hidden = 0;
  double dropout_rate = 0.5;
};

namespace va {

// Registers the predictor's parameters under `prefix.` in the store.
void create_predictor_params(nn::ParamStore& store, const std::string& prefix,
                             const PredictorShape& shape, Rng& rng);

// Width-k same-padded 1D convolution; w is (k*in) x out, b is 1 x out.
int conv1d(nn::Tape& tape, int x, int w, int b, int k);

// Full predictor forward; returns a T x 1 node. Dropout is applied only in
// train mode, with masks drawn from `rng`.
int predictor(nn::Tape& tape, int x, const nn::ParamGraph& graph,
              const std::string& prefix, const PredictorShape& shape,
              bool train_mode, Rng& rng);

// Severity conditioning vector for a coefficient in [0,2]; integer values
// select table rows exactly, fractional values interpolate linearly.
int severity_vector(nn::Tape& tape, int table, double coef);

// Adds the 1 x d vector to every time step.
int inject_severity(nn::Tape& tape, int h, int v);

// Repeats hidden row i durations[i] times.
int length_regulate(nn::Tape& tape, int h, const std::vector<long>& durations);

// Scales values by coef, quantizes each into `bins`, and adds the selected
// embedding table rows to the hidden sequence.
int apply_scalar_embedding(nn::Tape& tape, int h,
                           const std::vector<double>& values, double coef,
                           const BinSpec& bins, int table);

}  // namespace va

// d_i = max(1, round(exp(log_durations_i) * coef)).
std::vector<long> apply_duration(const std::vector<double>& log_durations,
                                 double coef);

// Plain-matrix wrappers used by unit tests and diagnostics; each builds a
// throwaway tape internally.
nn::Matrix severity_vector(const nn::Matrix& table, double coef);
nn::Matrix inject_severity(const nn::Matrix& h, const nn::Matrix& v);
nn::Matrix length_regulate(const nn::Matrix& h,
                           const std::vector<long>& durations);
std::vector<double> predict(const nn::ParamStore& params,
                            const std::string& prefix,
                            const PredictorShape& shape, const nn::Matrix& h,
                            bool train_mode, Rng& rng);

}  // namespace dsaug

#endif  // DSAUG_VARIANCE_ADAPTOR_HPP
