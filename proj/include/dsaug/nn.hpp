// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef DSAUG_NN_HPP
#define DSAUG_NN_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace dsaug::nn {

using Matrix = Eigen::MatrixXd;

// Reverse-mode tape over dense double matrices. A graph is built per forward
// pass; backward() accumulates gradients into every node. Small and explicit
// on purpose: every operation the models need is a named method with a
// hand-derived adjoint, which keeps finite-difference checking direct.
class Tape {
 public:
  int leaf(Matrix value);
  // Constant input; participates in forward math, receives no gradient.
  int constant(Matrix value);

  const Matrix& value(int id) const { return nodes_[std::size_t(id)].value; }
  const Matrix& grad(int id) const { return nodes_[std::size_t(id)].grad; }

  // Seeds d(loss)/d(loss) = 1 and propagates to all nodes. `loss` must be 1x1.
  void backward(int loss);

  int add(int a, int b);
  int scale(int a, double s);
  int mul_elem(int a, int b);
  // a op b with optional transposition of either operand.
  int matmul(int a, int b, bool trans_a = false, bool trans_b = false);
  // Adds a 1 x d row vector to every row of a T x d matrix.
  int add_row_broadcast(int a, int row);
  int relu(int a);
  // Row-wise normalization over columns; gain and bias are 1 x d.
  int layer_norm(int x, int gain, int bias, double eps = 1e-5);
  int softmax_rows(int a);
  // Zero-padded "same" unfolding for width-k 1D convolution: T x C -> T x kC.
  int unfold(int x, int k);
  int gather_rows(int table, std::vector<int> indices);
  // Row i of x repeated repeats[i] times, in order.
  int repeat_rows(int x, std::vector<long> repeats);
  int slice_cols(int x, int start, int n);
  int concat_cols(const std::vector<int>& parts);
  // Elementwise multiply by a fixed mask (inverted-dropout convention).
  int dropout_mask(int x, Matrix mask);
  int mean_all(int a);
  int l1_loss(int pred, Matrix target);
  int mse_loss(int pred, Matrix target);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::function<void()> backprop;  // adds into parents' grads
  };
  std::vector<Node> nodes_;

  int push(Matrix value, std::function<void()> backprop);
  Matrix& grad_ref(int id) { return nodes_[std::size_t(id)].grad; }
};

// Ordered named parameter set; the order defines the flattened layout used
// by the optimizer and by gradient checks.
class ParamStore {
 public:
  Matrix& create(const std::string& name, long rows, long cols);
  Matrix& at(const std::string& name);
  const Matrix& at(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::vector<std::pair<std::string, Matrix>>& items() { return items_; }
  const std::vector<std::pair<std::string, Matrix>>& items() const {
    return items_;
  }

  long total_size() const;
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& flat);

 private:
  std::vector<std::pair<std::string, Matrix>> items_;
};

// Leaf ids for every parameter of a store within one tape.
class ParamGraph {
 public:
  ParamGraph(Tape& tape, const ParamStore& store);
  int id(const std::string& name) const;
  // Gradient of the last backward() pass, flattened in store order.
  Eigen::VectorXd flat_grad(const Tape& tape, const ParamStore& store) const;

 private:
  std::vector<std::pair<std::string, int>> ids_;
};

// Adam with bias correction; state keyed by parameter name.
class AdamOptimizer {
 public:
  AdamOptimizer(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);
  void step(ParamStore& params, const Tape& tape, const ParamGraph& graph);

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Matrix> m_, v_;
};

}  // namespace dsaug::nn

#endif  // DSAUG_NN_HPP
