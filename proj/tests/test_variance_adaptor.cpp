// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "dsaug/errors.hpp"
#include "dsaug/variance_adaptor.hpp"

using namespace dsaug;
using nn::Matrix;

TEST_CASE("BinSpec quantization") {
  BinSpec bins{0.0, 10.0, 5};
  CHECK(bins.bin_of(0.0) == 0);
  CHECK(bins.bin_of(1.99) == 0);
  CHECK(bins.bin_of(2.0) == 1);
  CHECK(bins.bin_of(9.99) == 4);
  // The top edge and out-of-range values clamp to the extreme bins.
  CHECK(bins.bin_of(10.0) == 4);
  CHECK(bins.bin_of(123.0) == 4);
  CHECK(bins.bin_of(-5.0) == 0);

  SUBCASE("every bin is hit over a uniform sweep") {
    BinSpec b{0.0, 1.0, 16};
    std::vector<int> hits(16, 0);
    for (int i = 0; i < 1600; ++i) hits[std::size_t(b.bin_of(i / 1600.0))]++;
    for (int h : hits) CHECK(h == 100);
  }
}

TEST_CASE("apply_duration rounds, scales and enforces a 1-frame floor") {
  // exp(log d) recovers d; coef stretches it.
  std::vector<double> logs = {std::log(4.0), std::log(2.49), std::log(0.1)};
  CHECK(apply_duration(logs, 1.0) == std::vector<long>{4, 2, 1});
  CHECK(apply_duration(logs, 2.0) == std::vector<long>{8, 5, 1});
  CHECK(apply_duration(logs, 0.25) == std::vector<long>{1, 1, 1});
  CHECK(apply_duration({}, 1.0).empty());
  CHECK_THROWS_AS(apply_duration(logs, 0.0), DataError);
  CHECK_THROWS_AS(apply_duration(logs, -1.0), DataError);
}

TEST_CASE("severity_vector selects rows and interpolates") {
  Matrix table(3, 4);
  table << 0, 0, 0, 0,
           1, 2, 3, 4,
           10, 20, 30, 40;
  CHECK((severity_vector(table, 0.0) - table.row(0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((severity_vector(table, 1.0) - table.row(1)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((severity_vector(table, 2.0) - table.row(2)).cwiseAbs().maxCoeff() == 0.0);
  // Halfway between classes 1 and 2.
  Matrix mid = severity_vector(table, 1.5);
  Matrix expected = 0.5 * table.row(1) + 0.5 * table.row(2);
  CHECK((mid - expected).cwiseAbs().maxCoeff() < 1e-12);
  // Quarter step above class 0.
  Matrix quarter = severity_vector(table, 0.25);
  expected = 0.75 * table.row(0) + 0.25 * table.row(1);
  CHECK((quarter - expected).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(severity_vector(table, -0.1), DataError);
  CHECK_THROWS_AS(severity_vector(table, 2.1), DataError);
}

TEST_CASE("inject_severity adds the vector to every time step") {
  Matrix h(3, 2);
  h << 1, 2, 3, 4, 5, 6;
  Matrix v(1, 2);
  v << 10, 20;
  Matrix out = inject_severity(h, v);
  REQUIRE(out.rows() == 3);
  CHECK(out(0, 0) == 11);
  CHECK(out(2, 1) == 26);
}

TEST_CASE("length_regulate expands rows by their durations") {
  Matrix h(3, 2);
  h << 1, 2, 3, 4, 5, 6;

  SUBCASE("basic expansion preserves order and content") {
    Matrix out = length_regulate(h, {2, 1, 3});
    REQUIRE(out.rows() == 6);
    CHECK((out.row(0) - h.row(0)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((out.row(1) - h.row(0)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((out.row(2) - h.row(1)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((out.row(3) - h.row(2)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((out.row(5) - h.row(2)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("total frames equals the duration sum") {
    CHECK(length_regulate(h, {1, 1, 1}).rows() == 3);
    CHECK(length_regulate(h, {7, 0, 2}).rows() == 9);
  }
  SUBCASE("size mismatch rejected") {
    CHECK_THROWS_AS(length_regulate(h, {1, 2}), InternalError);
  }
  SUBCASE("all-zero durations rejected") {
    CHECK_THROWS_AS(length_regulate(h, {0, 0, 0}), DataError);
  }
}

TEST_CASE("predictor output shape and dropout semantics") {
  PredictorShape shape;
  shape.in_width = 6;
  shape.hidden = 8;
  shape.dropout_rate = 0.5;

  nn::ParamStore params;
  Rng init_rng(21);
  va::create_predictor_params(params, "dur", shape, init_rng);

  Matrix h = Matrix::Random(7, 6);
  Rng rng_a(1);
  auto eval_a = predict(params, "dur", shape, h, false, rng_a);
  CHECK(eval_a.size() == 7);

  SUBCASE("eval mode ignores the rng: different seeds, same output") {
    Rng rng_b(999);
    auto eval_b = predict(params, "dur", shape, h, false, rng_b);
    CHECK(eval_a == eval_b);
  }
  SUBCASE("train mode consumes the rng: same seed replays exactly") {
    Rng r1(55), r2(55);
    auto t1 = predict(params, "dur", shape, h, true, r1);
    auto t2 = predict(params, "dur", shape, h, true, r2);
    CHECK(t1 == t2);
    Rng r3(56);
    auto t3 = predict(params, "dur", shape, h, true, r3);
    CHECK(t1 != t3);
  }
  SUBCASE("per-step locality: time step outputs depend on a window only") {
    // With kernel width 3 stacked twice, output t depends on inputs within
    // distance 2; changing a far row must not move early outputs.
    Matrix h2 = h;
    h2.row(6) = Matrix::Random(1, 6);
    Rng rng(1);
    auto moved = predict(params, "dur", shape, h2, false, rng);
    for (int t = 0; t <= 3; ++t)
      CHECK(moved[std::size_t(t)] == eval_a[std::size_t(t)]);
    CHECK(moved[6] != eval_a[6]);
  }
}

TEST_CASE("predictor gradients flow to all named parameters") {
  PredictorShape shape;
  shape.in_width = 4;
  shape.hidden = 5;
  shape.dropout_rate = 0.0;

  nn::ParamStore params;
  Rng init_rng(31);
  va::create_predictor_params(params, "p", shape, init_rng);

  nn::Tape tape;
  nn::ParamGraph graph(tape, params);
  Rng rng(3);
  const int x = tape.constant(Matrix::Random(6, 4));
  const int out = va::predictor(tape, x, graph, "p", shape, true, rng);
  REQUIRE(tape.value(out).rows() == 6);
  REQUIRE(tape.value(out).cols() == 1);
  const int loss = tape.mse_loss(out, Matrix::Ones(6, 1));
  tape.backward(loss);

  Eigen::VectorXd g = graph.flat_grad(tape, params);
  REQUIRE(g.size() == params.total_size());
  // Every parameter tensor receives some nonzero gradient.
  long offset = 0;
  for (const auto& [name, m] : params.items()) {
    const double norm = g.segment(offset, m.size()).cwiseAbs().maxCoeff();
    CAPTURE(name);
    CHECK(norm > 0.0);
    offset += m.size();
  }
}

TEST_CASE("apply_scalar_embedding adds quantized table rows") {
  BinSpec bins{0.0, 1.0, 4};
  Matrix table(4, 2);
  table << 1, 10, 2, 20, 3, 30, 4, 40;

  nn::Tape tape;
  Matrix h = Matrix::Zero(3, 2);
  const int hid = tape.leaf(h);
  const int tid = tape.constant(table);
  // values scaled by coef=2: {0.05, 0.2, 0.45} -> {0.1, 0.4, 0.9} -> bins 0,1,3.
  const int out = va::apply_scalar_embedding(tape, hid, {0.05, 0.2, 0.45}, 2.0,
                                             bins, tid);
  const Matrix& v = tape.value(out);
  CHECK(v(0, 0) == 1);
  CHECK(v(1, 0) == 2);
  CHECK(v(2, 1) == 40);
}
