// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "dsaug/variance_adaptor.hpp"

#include <cmath>

#include "dsaug/errors.hpp"

namespace dsaug {

using nn::Matrix;
using nn::Tape;

int BinSpec::bin_of(double value) const {
  if (n_bins < 1 || hi <= lo) throw InternalError("BinSpec: invalid range");
  const double t = (value - lo) / (hi - lo);
  const int bin = int(std::floor(t * double(n_bins)));
  return std::min(std::max(bin, 0), n_bins - 1);
}

namespace va {

namespace {

Matrix random_init(long rows, long cols, double scale, Rng& rng) {
  Matrix m(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) m(r, c) = scale * rng.next_normal();
  return m;
}

Matrix dropout_mask_matrix(long rows, long cols, double rate, Rng& rng) {
  Matrix mask(rows, cols);
  const double keep = 1.0 - rate;
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c)
      mask(r, c) = rng.next_real() < keep ? 1.0 / keep : 0.0;
  return mask;
}

}  // namespace

void create_predictor_params(nn::ParamStore& store, const std::string& prefix,
                             const PredictorShape& shape, Rng& rng) {
  const int k = shape.kernel_width;
  const int in = shape.in_width;
  const int h = shape.hidden;
  const double s1 = 1.0 / std::sqrt(double(k * in));
  const double s2 = 1.0 / std::sqrt(double(k * h));
  store.create(prefix + ".conv1.w", long(k) * in, h) = random_init(long(k) * in, h, s1, rng);
  store.create(prefix + ".conv1.b", 1, h);
  store.create(prefix + ".ln1.g", 1, h).setOnes();
  store.create(prefix + ".ln1.b", 1, h);
  store.create(prefix + ".conv2.w", long(k) * h, h) = random_init(long(k) * h, h, s2, rng);
  store.create(prefix + ".conv2.b", 1, h);
  store.create(prefix + ".ln2.g", 1, h).setOnes();
  store.create(prefix + ".ln2.b", 1, h);
  store.create(prefix + ".proj.w", h, 1) = random_init(h, 1, 1.0 / std::sqrt(double(h)), rng);
  store.create(prefix + ".proj.b", 1, 1);
}

int conv1d(Tape& tape, int x, int w, int b, int k) {
  int unfolded = tape.unfold(x, k);
  return tape.add_row_broadcast(tape.matmul(unfolded, w), b);
}

int predictor(Tape& tape, int x, const nn::ParamGraph& graph,
              const std::string& prefix, const PredictorShape& shape,
              bool train_mode, Rng& rng) {
  const int k = shape.kernel_width;
  int h1 = conv1d(tape, x, graph.id(prefix + ".conv1.w"),
                  graph.id(prefix + ".conv1.b"), k);
  h1 = tape.relu(h1);
  h1 = tape.layer_norm(h1, graph.id(prefix + ".ln1.g"),
                       graph.id(prefix + ".ln1.b"));
  if (train_mode && shape.dropout_rate > 0.0)
    h1 = tape.dropout_mask(
        h1, dropout_mask_matrix(tape.value(h1).rows(), tape.value(h1).cols(),
                                shape.dropout_rate, rng));
  int h2 = conv1d(tape, h1, graph.id(prefix + ".conv2.w"),
                  graph.id(prefix + ".conv2.b"), k);
  h2 = tape.relu(h2);
  h2 = tape.layer_norm(h2, graph.id(prefix + ".ln2.g"),
                       graph.id(prefix + ".ln2.b"));
  if (train_mode && shape.dropout_rate > 0.0)
    h2 = tape.dropout_mask(
        h2, dropout_mask_matrix(tape.value(h2).rows(), tape.value(h2).cols(),
                                shape.dropout_rate, rng));
  return tape.add_row_broadcast(tape.matmul(h2, graph.id(prefix + ".proj.w")),
                                graph.id(prefix + ".proj.b"));
}

int severity_vector(Tape& tape, int table, double coef) {
  if (coef < 0.0 || coef > 2.0)
    throw DataError("severity coefficient must be in [0,2]");
  const int lo = int(std::floor(coef));
  const int hi = int(std::ceil(coef));
  if (lo == hi) return tape.gather_rows(table, {lo});
  const double frac = coef - double(lo);
  return tape.add(tape.scale(tape.gather_rows(table, {lo}), 1.0 - frac),
                  tape.scale(tape.gather_rows(table, {hi}), frac));
}

int inject_severity(Tape& tape, int h, int v) {
  return tape.add_row_broadcast(h, v);
}

int length_regulate(Tape& tape, int h, const std::vector<long>& durations) {
  return tape.repeat_rows(h, durations);
}

int apply_scalar_embedding(Tape& tape, int h, const std::vector<double>& values,
                           double coef, const BinSpec& bins, int table) {
  if (coef <= 0.0) throw DataError("scalar embedding coefficient must be > 0");
  if (long(values.size()) != tape.value(h).rows())
    throw InternalError("apply_scalar_embedding: length mismatch");
  std::vector<int> indices;
  indices.reserve(values.size());
  for (double v : values) indices.push_back(bins.bin_of(v * coef));
  return tape.add(h, tape.gather_rows(table, std::move(indices)));
}

}  // namespace va

std::vector<long> apply_duration(const std::vector<double>& log_durations,
                                 double coef) {
  if (coef <= 0.0) throw DataError("duration coefficient must be > 0");
  std::vector<long> out;
  out.reserve(log_durations.size());
  for (double ld : log_durations)
    out.push_back(std::max(1L, std::lround(std::exp(ld) * coef)));
  return out;
}

Matrix severity_vector(const Matrix& table, double coef) {
  Tape tape;
  return tape.value(va::severity_vector(tape, tape.leaf(table), coef));
}

Matrix inject_severity(const Matrix& h, const Matrix& v) {
  Tape tape;
  return tape.value(va::inject_severity(tape, tape.leaf(h), tape.leaf(v)));
}

Matrix length_regulate(const Matrix& h, const std::vector<long>& durations) {
  Tape tape;
  return tape.value(va::length_regulate(tape, tape.leaf(h), durations));
}

std::vector<double> predict(const nn::ParamStore& params,
                            const std::string& prefix,
                            const PredictorShape& shape, const Matrix& h,
                            bool train_mode, Rng& rng) {
  Tape tape;
  nn::ParamGraph graph(tape, params);
  int out = va::predictor(tape, tape.leaf(h), graph, prefix, shape, train_mode, rng);
  const Matrix& v = tape.value(out);
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace dsaug
