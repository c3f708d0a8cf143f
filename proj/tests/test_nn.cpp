// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "dsaug/nn.hpp"
#include "dsaug/rng.hpp"

using namespace dsaug;
using nn::Matrix;
using nn::Tape;

namespace {

Matrix random_matrix(Rng& rng, long r, long c) {
  Matrix m(r, c);
  for (long i = 0; i < r; ++i)
    for (long j = 0; j < c; ++j) m(i, j) = rng.next_normal();
  return m;
}

// Central finite-difference check of d(loss)/d(inputs) for a scalar-valued
// graph rebuilt from scratch at each probe point. `build` returns the loss id
// after registering every matrix in `inputs` as a leaf (in order).
void check_gradients(std::vector<Matrix> inputs,
                     const std::function<int(Tape&, const std::vector<int>&)>& build,
                     double tol = 1e-6, double h = 1e-5) {
  auto eval = [&](const std::vector<Matrix>& points) {
    Tape tape;
    std::vector<int> ids;
    for (const auto& m : points) ids.push_back(tape.leaf(m));
    const int loss = build(tape, ids);
    REQUIRE(tape.value(loss).size() == 1);
    return tape.value(loss)(0, 0);
  };

  Tape tape;
  std::vector<int> ids;
  for (const auto& m : inputs) ids.push_back(tape.leaf(m));
  const int loss = build(tape, ids);
  tape.backward(loss);

  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Matrix& analytic = tape.grad(ids[k]);
    REQUIRE(analytic.rows() == inputs[k].rows());
    REQUIRE(analytic.cols() == inputs[k].cols());
    for (long i = 0; i < inputs[k].rows(); ++i) {
      for (long j = 0; j < inputs[k].cols(); ++j) {
        auto plus = inputs;
        auto minus = inputs;
        plus[k](i, j) += h;
        minus[k](i, j) -= h;
        const double fd = (eval(plus) - eval(minus)) / (2 * h);
        CHECK(analytic(i, j) == doctest::Approx(fd).epsilon(tol).scale(1.0));
      }
    }
  }
}

}  // namespace

TEST_CASE("elementwise and linear ops match finite differences") {
  Rng rng(101);
  Matrix a = random_matrix(rng, 3, 4);
  Matrix b = random_matrix(rng, 3, 4);

  SUBCASE("add + scale") {
    check_gradients({a, b}, [](Tape& t, const std::vector<int>& in) {
      return t.mean_all(t.scale(t.add(in[0], in[1]), 2.5));
    });
  }
  SUBCASE("mul_elem") {
    check_gradients({a, b}, [](Tape& t, const std::vector<int>& in) {
      return t.mean_all(t.mul_elem(in[0], in[1]));
    });
  }
  SUBCASE("relu (away from the kink)") {
    Matrix shifted = a;
    for (long i = 0; i < shifted.size(); ++i)
      if (std::abs(shifted(i)) < 1e-2) shifted(i) = 0.5;
    check_gradients({shifted}, [](Tape& t, const std::vector<int>& in) {
      return t.mean_all(t.relu(in[0]));
    });
  }
}

TEST_CASE("matmul with all transpose combinations") {
  Rng rng(102);
  for (bool ta : {false, true}) {
    for (bool tb : {false, true}) {
      CAPTURE(ta);
      CAPTURE(tb);
      Matrix a = ta ? random_matrix(rng, 4, 3) : random_matrix(rng, 3, 4);
      Matrix b = tb ? random_matrix(rng, 5, 4) : random_matrix(rng, 4, 5);
      check_gradients({a, b}, [ta, tb](Tape& t, const std::vector<int>& in) {
        return t.mean_all(t.matmul(in[0], in[1], ta, tb));
      });
    }
  }
}

TEST_CASE("broadcast, normalization and softmax") {
  Rng rng(103);
  Matrix x = random_matrix(rng, 5, 6);
  Matrix row = random_matrix(rng, 1, 6);
  Matrix gain = random_matrix(rng, 1, 6);
  Matrix bias = random_matrix(rng, 1, 6);

  SUBCASE("add_row_broadcast") {
    check_gradients({x, row}, [](Tape& t, const std::vector<int>& in) {
      return t.mean_all(t.add_row_broadcast(in[0], in[1]));
    });
  }
  SUBCASE("layer_norm wrt x, gain and bias") {
    check_gradients({x, gain, bias}, [](Tape& t, const std::vector<int>& in) {
      // Square the output so the loss is sensitive to every component.
      const int y = t.layer_norm(in[0], in[1], in[2]);
      return t.mean_all(t.mul_elem(y, y));
    }, 1e-5);
  }
  SUBCASE("layer_norm output rows have zero mean and unit variance") {
    Tape t;
    Matrix ones = Matrix::Ones(1, 6);
    Matrix zeros = Matrix::Zero(1, 6);
    const int y = t.layer_norm(t.leaf(x), t.constant(ones), t.constant(zeros));
    const Matrix& v = t.value(y);
    for (long i = 0; i < v.rows(); ++i) {
      CHECK(v.row(i).mean() == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
      CHECK(v.row(i).squaredNorm() / 6.0 == doctest::Approx(1.0).epsilon(1e-3));
    }
  }
  SUBCASE("softmax_rows") {
    check_gradients({x}, [](Tape& t, const std::vector<int>& in) {
      const int y = t.softmax_rows(in[0]);
      return t.mean_all(t.mul_elem(y, y));
    });
  }
  SUBCASE("softmax rows sum to one and are shift invariant") {
    Tape t;
    const int y = t.softmax_rows(t.leaf(x));
    for (long i = 0; i < 5; ++i)
      CHECK(t.value(y).row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    Tape t2;
    Matrix shifted = x.array() + 100.0;
    const int y2 = t2.softmax_rows(t2.leaf(shifted));
    CHECK((t.value(y) - t2.value(y2)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("structural ops: unfold, gather, repeat, slice, concat") {
  Rng rng(104);

  SUBCASE("unfold values implement zero-padded same windows") {
    Tape t;
    Matrix x(3, 2);
    x << 1, 2, 3, 4, 5, 6;
    const int u = t.unfold(t.leaf(x), 3);
    const Matrix& v = t.value(u);
    REQUIRE(v.rows() == 3);
    REQUIRE(v.cols() == 6);
    // Row 0: [pad, x0, x1] = [0 0 | 1 2 | 3 4].
    Matrix row0(1, 6);
    row0 << 0, 0, 1, 2, 3, 4;
    CHECK((v.row(0) - row0).cwiseAbs().maxCoeff() == 0.0);
    Matrix row2(1, 6);
    row2 << 3, 4, 5, 6, 0, 0;
    CHECK((v.row(2) - row2).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("unfold gradient") {
    Matrix x = random_matrix(rng, 4, 3);
    check_gradients({x}, [](Tape& t, const std::vector<int>& in) {
      const int u = t.unfold(in[0], 3);
      return t.mean_all(t.mul_elem(u, u));
    });
  }
  SUBCASE("gather_rows gradient accumulates repeated indices") {
    Matrix table = random_matrix(rng, 5, 3);
    check_gradients({table}, [](Tape& t, const std::vector<int>& in) {
      const int g = t.gather_rows(in[0], {0, 2, 2, 4, 0});
      return t.mean_all(t.mul_elem(g, g));
    });
  }
  SUBCASE("repeat_rows values and gradient") {
    Tape t;
    Matrix x(2, 2);
    x << 1, 2, 3, 4;
    const int r = t.repeat_rows(t.leaf(x), {2, 3});
    REQUIRE(t.value(r).rows() == 5);
    CHECK(t.value(r)(0, 0) == 1);
    CHECK(t.value(r)(1, 0) == 1);
    CHECK(t.value(r)(4, 1) == 4);

    Matrix y = random_matrix(rng, 3, 2);
    check_gradients({y}, [](Tape& t2, const std::vector<int>& in) {
      const int rr = t2.repeat_rows(in[0], {1, 0, 4});
      return t2.mean_all(t2.mul_elem(rr, rr));
    });
  }
  SUBCASE("slice/concat are inverse and both differentiate") {
    Matrix x = random_matrix(rng, 3, 6);
    Tape t;
    const int id = t.leaf(x);
    const int joined = t.concat_cols({t.slice_cols(id, 0, 2),
                                      t.slice_cols(id, 2, 3),
                                      t.slice_cols(id, 5, 1)});
    CHECK((t.value(joined) - x).cwiseAbs().maxCoeff() == 0.0);
    check_gradients({x}, [](Tape& t2, const std::vector<int>& in) {
      const int j = t2.concat_cols({t2.slice_cols(in[0], 3, 3),
                                    t2.slice_cols(in[0], 0, 3)});
      return t2.mean_all(t2.mul_elem(j, j));
    });
  }
  SUBCASE("dropout_mask multiplies by the fixed mask") {
    Matrix x = random_matrix(rng, 3, 4);
    Matrix mask = Matrix::Zero(3, 4);
    mask(0, 0) = 2.0;
    mask(1, 2) = 2.0;
    check_gradients({x}, [mask](Tape& t, const std::vector<int>& in) {
      return t.mean_all(t.dropout_mask(in[0], mask));
    });
  }
}

TEST_CASE("losses") {
  Rng rng(105);
  Matrix pred = random_matrix(rng, 4, 3);
  Matrix target = random_matrix(rng, 4, 3);

  SUBCASE("mse value and gradient") {
    Tape t;
    const int loss = t.mse_loss(t.leaf(pred), target);
    CHECK(t.value(loss)(0, 0) ==
          doctest::Approx((pred - target).squaredNorm() / pred.size())
              .epsilon(1e-12));
    check_gradients({pred}, [target](Tape& t2, const std::vector<int>& in) {
      return t2.mse_loss(in[0], target);
    });
  }
  SUBCASE("l1 value and gradient away from zeros") {
    Matrix p = pred;
    for (long i = 0; i < p.size(); ++i)
      if (std::abs(p(i) - target(i)) < 1e-2) p(i) += 0.5;
    Tape t;
    const int loss = t.l1_loss(t.leaf(p), target);
    CHECK(t.value(loss)(0, 0) ==
          doctest::Approx((p - target).cwiseAbs().sum() / p.size())
              .epsilon(1e-12));
    check_gradients({p}, [target](Tape& t2, const std::vector<int>& in) {
      return t2.l1_loss(in[0], target);
    });
  }
}

TEST_CASE("fan-out accumulates gradient from every consumer") {
  Tape t;
  Matrix x(2, 2);
  x << 1, -2, 3, 0.5;
  const int leaf = t.leaf(x);
  const int cst = t.constant(Matrix::Ones(2, 2));
  // loss = mean(x*x + x) — x feeds two paths.
  const int loss = t.mean_all(t.add(t.mul_elem(leaf, leaf), t.mul_elem(leaf, cst)));
  t.backward(loss);
  // d/dx mean(x^2 + x) = (2x + 1)/4.
  Matrix expected = (2.0 * x.array() + 1.0) / 4.0;
  CHECK((t.grad(leaf) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ParamStore flatten/unflatten round-trip and ordering") {
  nn::ParamStore store;
  store.create("w1", 2, 3).setConstant(1.0);
  store.create("b1", 1, 3).setConstant(2.0);
  store.create("w2", 3, 1).setConstant(3.0);
  CHECK(store.total_size() == 12);
  Eigen::VectorXd flat = store.flatten();
  REQUIRE(flat.size() == 12);
  // Order follows creation: w1 block first, then b1, then w2.
  CHECK(flat(0) == 1.0);
  CHECK(flat(6) == 2.0);
  CHECK(flat(9) == 3.0);

  Eigen::VectorXd perturbed = flat;
  for (long i = 0; i < perturbed.size(); ++i) perturbed(i) = double(i);
  store.unflatten(perturbed);
  CHECK((store.flatten() - perturbed).cwiseAbs().maxCoeff() == 0.0);
  CHECK(store.at("b1")(0, 0) == 6.0);

  Eigen::VectorXd wrong(11);
  CHECK_THROWS(store.unflatten(wrong));
}

TEST_CASE("Adam descends a convex quadratic deterministically") {
  auto run = [] {
    nn::ParamStore params;
    params.create("x", 1, 2) << 4.0, -3.0;
    nn::AdamOptimizer opt(0.05);
    double last = 0.0;
    for (int step = 0; step < 400; ++step) {
      nn::Tape tape;
      nn::ParamGraph graph(tape, params);
      Matrix target(1, 2);
      target << 1.0, 2.0;
      const int loss = tape.mse_loss(graph.id("x"), target);
      tape.backward(loss);
      opt.step(params, tape, graph);
      last = tape.value(loss)(0, 0);
    }
    return std::pair(params.flatten(), last);
  };
  auto [x1, loss1] = run();
  auto [x2, loss2] = run();
  CHECK(loss1 < 1e-4);
  CHECK(std::abs(x1(0) - 1.0) < 0.05);
  CHECK(std::abs(x1(1) - 2.0) < 0.05);
  // Bit-identical replay.
  CHECK((x1 - x2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loss1 == loss2);
}

TEST_CASE("rng statistical sanity and determinism") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng r(42);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double v = r.next_normal();
    sum += v;
    sum_sq += v * v;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sum_sq / n - 1.0) < 0.03);

  // next_below stays in range and covers all residues.
  Rng r2(43);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) counts[std::size_t(r2.next_below(7))]++;
  for (int c : counts) CHECK(c > 800);
}
