// Copyright 2026  dsaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include "dsaug/nn.hpp"

#include <cmath>
#include <memory>

#include "dsaug/errors.hpp"

namespace dsaug::nn {

int Tape::push(Matrix value, std::function<void()> backprop) {
  Node node;
  node.value = std::move(value);
  node.grad = Matrix::Zero(node.value.rows(), node.value.cols());
  node.backprop = std::move(backprop);
  nodes_.push_back(std::move(node));
  return int(nodes_.size()) - 1;
}

int Tape::leaf(Matrix value) { return push(std::move(value), nullptr); }
int Tape::constant(Matrix value) { return push(std::move(value), nullptr); }

void Tape::backward(int loss) {
  if (value(loss).rows() != 1 || value(loss).cols() != 1)
    throw InternalError("backward: loss must be a 1x1 node");
  for (auto& node : nodes_) node.grad.setZero();
  grad_ref(loss)(0, 0) = 1.0;
  for (int id = loss; id >= 0; --id) {
    auto& node = nodes_[std::size_t(id)];
    if (node.backprop && node.grad.cwiseAbs().sum() != 0.0) node.backprop();
  }
}

int Tape::add(int a, int b) {
  if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols())
    throw InternalError("add: shape mismatch");
  int out = push(value(a) + value(b), nullptr);
  nodes_[std::size_t(out)].backprop = [this, a, b, out] {
    grad_ref(a) += grad(out);
    grad_ref(b) += grad(out);
  };
  return out;
}

int Tape::scale(int a, double s) {
  int out = push(value(a) * s, nullptr);
  nodes_[std::size_t(out)].backprop = [this, a, s, out] {
    grad_ref(a) += grad(out) * s;
  };
  return out;
}

int Tape::mul_elem(int a, int b) {
  if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols())
    throw InternalError("mul_elem: shape mismatch");
  int out = push(value(a).cwiseProduct(value(b)), nullptr);
  nodes_[std::size_t(out)].backprop = [this, a, b, out] {
    grad_ref(a) += grad(out).cwiseProduct(value(b));
    grad_ref(b) += grad(out).cwiseProduct(value(a));
  };
  return out;
}

int Tape::matmul(int a, int b, bool trans_a, bool trans_b) {
  const Matrix& va = value(a);
  const Matrix& vb = value(b);
  Matrix prod = (trans_a ? va.transpose() : Matrix(va)) *
                (trans_b ? vb.transpose() : Matrix(vb));
  int out = push(std::move(prod), nullptr);
  nodes_[std::size_t(out)].backprop = [this, a, b, trans_a, trans_b, out] {
    const Matrix& g = grad(out);
    const Matrix& va2 = value(a);
    const Matrix& vb2 = value(b);
    if (!trans_a)
      grad_ref(a) += trans_b ? Matrix(g * vb2) : Matrix(g * vb2.transpose());
    else
      grad_ref(a) += trans_b ? Matrix(vb2.transpose() * g.transpose())
                             : Matrix(vb2 * g.transpose());
    if (!trans_b)
      grad_ref(b) += trans_a ? Matrix(va2 * g) : Matrix(va2.transpose() * g);
    else
      grad_ref(b) += trans_a ? Matrix(g.transpose() * va2.transpose())
                             : Matrix(g.transpose() * va2);
  };
  return out;
}

int Tape::add_row_broadcast(int a, int row) {
  if (value(row).rows() != 1 || value(row).cols() != value(a).cols())
    throw InternalError("add_row_broadcast: row must be 1 x cols(a)");
  Matrix v = value(a);
  v.rowwise() += value(row).row(0);
  int out = push(std::move(v), nullptr);
  nodes_[std::size_t(out)].backprop = [this, a, row, out] {
    grad_ref(a) += grad(out);
    grad_ref(row) += grad(out).colwise().sum();
  };
  return out;
}

int Tape::relu(int a) {
  int out = push(value(a).cwiseMax(0.0), nullptr);
  nodes_[std::size_t(out)].backprop = [this, a, out] {
    grad_ref(a) += grad(out).cwiseProduct(
        (value(a).array() > 0.0).cast<double>().matrix());
  };
  return out;
}

int Tape::layer_norm(int x, int gain, int bias, double eps) {
  const Matrix& vx = value(x);
  const long rows = vx.rows(), cols = vx.cols();
  if (value(gain).cols() != cols || value(bias).cols() != cols)
    throw InternalError("layer_norm: gain/bias width mismatch");
  Eigen::VectorXd mean = vx.rowwise().mean();
  Matrix centered = vx.colwise() - mean;
  Eigen::VectorXd var = centered.array().square().rowwise().mean();
  Eigen::VectorXd inv_std = (var.array() + eps).rsqrt();
  Matrix xhat = centered.array().colwise() * inv_std.array();
  Matrix y = (xhat.array().rowwise() * value(gain).row(0).array()).matrix();
  y.rowwise() += value(bias).row(0);
  int out = push(std::move(y), nullptr);
  // Cache the normalized activations for the adjoint.
  auto xhat_c = std::make_shared<Matrix>(std::move(xhat));
  auto inv_std_c = std::make_shared<Eigen::VectorXd>(std::move(inv_std));
  nodes_[std::size_t(out)].backprop = [this, x, gain, bias, out, xhat_c,
                                       inv_std_c, cols] {
    const Matrix& g = grad(out);
    const Matrix& xh = *xhat_c;
    Matrix dxhat = (g.array().rowwise() * value(gain).row(0).array()).matrix();
    // Per-row: dx = (dxhat - mean(dxhat) - xhat * mean(dxhat * xhat)) * inv_std
    Eigen::VectorXd m1 = dxhat.rowwise().mean();
    Eigen::VectorXd m2 = dxhat.cwiseProduct(xh).rowwise().mean();
    Matrix dx = dxhat;
    dx.colwise() -= m1;
    dx -= (xh.array().colwise() * m2.array()).matrix();
    dx = (dx.array().colwise() * inv_std_c->array()).matrix();
    grad_ref(x) += dx;
    grad_ref(gain) += g.cwiseProduct(xh).colwise().sum();
    grad_ref(bias) += g.colwise().sum();
    (void)cols;
  };
  return out;
}

int Tape::softmax_rows(int a) {
  const Matrix& va = value(a);
  Matrix y(va.rows(), va.cols());
  for (long r = 0; r < va.rows(); ++r) {
    Eigen::ArrayXd row = va.row(r).array() - va.row(r).maxCoeff();
    Eigen::ArrayXd e = row.exp();
    y.row(r) = (e / e.sum()).matrix();
  }
  int out = push(std::move(y), nullptr);
  nodes_[std::size_t(out)].backprop = [this, a, out] {
    const Matrix& g = grad(out);
    const Matrix& y2 = value(out);
    Eigen::VectorXd dot = g.cwiseProduct(y2).rowwise().sum();
    Matrix shifted = g;
    shifted.colwise() -= dot;
    grad_ref(a) += y2.cwiseProduct(shifted);
  };
  return out;
}

int Tape::unfold(int x, int k) {
  if (k < 1 || k % 2 == 0) throw InternalError("unfold: kernel width must be odd");
  const Matrix& vx = value(x);
  const long t_len = vx.rows(), c = vx.cols();
  const int pad = k / 2;
  Matrix y = Matrix::Zero(t_len, k * c);
  for (long t = 0; t < t_len; ++t)
    for (int o = 0; o < k; ++o) {
      long src = t + o - pad;
      if (src >= 0 && src < t_len) y.block(t, o * c, 1, c) = vx.row(src);
    }
  int out = push(std::move(y), nullptr);
  nodes_[std::size_t(out)].backprop = [this, x, out, k, pad, c] {
    const Matrix& g = grad(out);
    Matrix& gx = grad_ref(x);
    for (long t = 0; t < g.rows(); ++t)
      for (int o = 0; o < k; ++o) {
        long src = t + o - pad;
        if (src >= 0 && src < gx.rows())
          gx.row(src) += g.block(t, long(o) * c, 1, c);
      }
  };
  return out;
}

int Tape::gather_rows(int table, std::vector<int> indices) {
  const Matrix& vt = value(table);
  Matrix y(long(indices.size()), vt.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= vt.rows())
      throw InternalError("gather_rows: index out of range");
    y.row(long(i)) = vt.row(indices[i]);
  }
  int out = push(std::move(y), nullptr);
  auto idx = std::make_shared<std::vector<int>>(std::move(indices));
  nodes_[std::size_t(out)].backprop = [this, table, out, idx] {
    const Matrix& g = grad(out);
    Matrix& gt = grad_ref(table);
    for (std::size_t i = 0; i < idx->size(); ++i)
      gt.row((*idx)[i]) += g.row(long(i));
  };
  return out;
}

int Tape::repeat_rows(int x, std::vector<long> repeats) {
  const Matrix& vx = value(x);
  if (long(repeats.size()) != vx.rows())
    throw InternalError("repeat_rows: repeats length mismatch");
  long total = 0;
  for (long r : repeats) {
    if (r < 0) throw InternalError("repeat_rows: negative repeat");
    total += r;
  }
  if (total == 0) throw DataError("repeat_rows: all durations are zero");
  Matrix y(total, vx.cols());
  long at = 0;
  for (long i = 0; i < vx.rows(); ++i)
    for (long r = 0; r < repeats[std::size_t(i)]; ++r) y.row(at++) = vx.row(i);
  int out = push(std::move(y), nullptr);
  auto reps = std::make_shared<std::vector<long>>(std::move(repeats));
  nodes_[std::size_t(out)].backprop = [this, x, out, reps] {
    const Matrix& g = grad(out);
    Matrix& gx = grad_ref(x);
    long at = 0;
    for (long i = 0; i < gx.rows(); ++i)
      for (long r = 0; r < (*reps)[std::size_t(i)]; ++r) gx.row(i) += g.row(at++);
  };
  return out;
}

int Tape::slice_cols(int x, int start, int n) {
  const Matrix& vx = value(x);
  if (start < 0 || start + n > vx.cols())
    throw InternalError("slice_cols: range out of bounds");
  int out = push(vx.middleCols(start, n), nullptr);
  nodes_[std::size_t(out)].backprop = [this, x, out, start, n] {
    grad_ref(x).middleCols(start, n) += grad(out);
  };
  return out;
}

int Tape::concat_cols(const std::vector<int>& parts) {
  if (parts.empty()) throw InternalError("concat_cols: no parts");
  long rows = value(parts[0]).rows(), cols = 0;
  for (int p : parts) {
    if (value(p).rows() != rows) throw InternalError("concat_cols: row mismatch");
    cols += value(p).cols();
  }
  Matrix y(rows, cols);
  long at = 0;
  for (int p : parts) {
    y.middleCols(at, value(p).cols()) = value(p);
    at += value(p).cols();
  }
  int out = push(std::move(y), nullptr);
  auto ps = std::make_shared<std::vector<int>>(parts);
  nodes_[std::size_t(out)].backprop = [this, out, ps] {
    long at = 0;
    for (int p : *ps) {
      grad_ref(p) += grad(out).middleCols(at, value(p).cols());
      at += value(p).cols();
    }
  };
  return out;
}

int Tape::dropout_mask(int x, Matrix mask) {
  if (mask.rows() != value(x).rows() || mask.cols() != value(x).cols())
    throw InternalError("dropout_mask: shape mismatch");
  int out = push(value(x).cwiseProduct(mask), nullptr);
  auto m = std::make_shared<Matrix>(std::move(mask));
  nodes_[std::size_t(out)].backprop = [this, x, out, m] {
    grad_ref(x) += grad(out).cwiseProduct(*m);
  };
  return out;
}

int Tape::mean_all(int a) {
  const double n = double(value(a).size());
  Matrix y(1, 1);
  y(0, 0) = value(a).sum() / n;
  int out = push(std::move(y), nullptr);
  nodes_[std::size_t(out)].backprop = [this, a, out, n] {
    grad_ref(a).array() += grad(out)(0, 0) / n;
  };
  return out;
}

int Tape::l1_loss(int pred, Matrix target) {
  if (target.rows() != value(pred).rows() || target.cols() != value(pred).cols())
    throw InternalError("l1_loss: shape mismatch");
  Matrix diff = value(pred) - target;
  const double n = double(diff.size());
  Matrix y(1, 1);
  y(0, 0) = diff.cwiseAbs().sum() / n;
  int out = push(std::move(y), nullptr);
  auto d = std::make_shared<Matrix>(std::move(diff));
  nodes_[std::size_t(out)].backprop = [this, pred, out, d, n] {
    grad_ref(pred) += grad(out)(0, 0) / n * d->unaryExpr([](double v) {
      return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    });
  };
  return out;
}

int Tape::mse_loss(int pred, Matrix target) {
  if (target.rows() != value(pred).rows() || target.cols() != value(pred).cols())
    throw InternalError("mse_loss: shape mismatch");
  Matrix diff = value(pred) - target;
  const double n = double(diff.size());
  Matrix y(1, 1);
  y(0, 0) = diff.array().square().sum() / n;
  int out = push(std::move(y), nullptr);
  auto d = std::make_shared<Matrix>(std::move(diff));
  nodes_[std::size_t(out)].backprop = [this, pred, out, d, n] {
    grad_ref(pred) += (2.0 / n) * grad(out)(0, 0) * (*d);
  };
  return out;
}

Matrix& ParamStore::create(const std::string& name, long rows, long cols) {
  if (contains(name)) throw InternalError("duplicate parameter: " + name);
  items_.emplace_back(name, Matrix::Zero(rows, cols));
  return items_.back().second;
}

Matrix& ParamStore::at(const std::string& name) {
  for (auto& [n, m] : items_)
    if (n == name) return m;
  throw InternalError("unknown parameter: " + name);
}

const Matrix& ParamStore::at(const std::string& name) const {
  for (const auto& [n, m] : items_)
    if (n == name) return m;
  throw InternalError("unknown parameter: " + name);
}

bool ParamStore::contains(const std::string& name) const {
  for (const auto& [n, _] : items_)
    if (n == name) return true;
  return false;
}

long ParamStore::total_size() const {
  long total = 0;
  for (const auto& [_, m] : items_) total += m.size();
  return total;
}

Eigen::VectorXd ParamStore::flatten() const {
  Eigen::VectorXd flat(total_size());
  long at = 0;
  for (const auto& [_, m] : items_) {
    flat.segment(at, m.size()) = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    at += m.size();
  }
  return flat;
}

void ParamStore::unflatten(const Eigen::VectorXd& flat) {
  if (flat.size() != total_size())
    throw InternalError("unflatten: size mismatch");
  long at = 0;
  for (auto& [_, m] : items_) {
    Eigen::Map<Eigen::VectorXd>(m.data(), m.size()) = flat.segment(at, m.size());
    at += m.size();
  }
}

ParamGraph::ParamGraph(Tape& tape, const ParamStore& store) {
  for (const auto& [name, m] : store.items())
    ids_.emplace_back(name, tape.leaf(m));
}

int ParamGraph::id(const std::string& name) const {
  for (const auto& [n, id] : ids_)
    if (n == name) return id;
  throw InternalError("unknown parameter in graph: " + name);
}

Eigen::VectorXd ParamGraph::flat_grad(const Tape& tape,
                                      const ParamStore& store) const {
  Eigen::VectorXd flat(store.total_size());
  long at = 0;
  for (const auto& [name, id] : ids_) {
    const Matrix& g = tape.grad(id);
    flat.segment(at, g.size()) = Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
    at += g.size();
  }
  return flat;
}

AdamOptimizer::AdamOptimizer(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

void AdamOptimizer::step(ParamStore& params, const Tape& tape,
                         const ParamGraph& graph) {
  auto& items = params.items();
  if (m_.empty()) {
    for (const auto& [_, p] : items) {
      m_.push_back(Matrix::Zero(p.rows(), p.cols()));
      v_.push_back(Matrix::Zero(p.rows(), p.cols()));
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, double(t_));
  const double bc2 = 1.0 - std::pow(beta2_, double(t_));
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Matrix& g = tape.grad(graph.id(items[i].first));
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
    items[i].second.array() -=
        lr_ * (m_[i].array() / bc1) /
        ((v_[i].array() / bc2).sqrt() + eps_);
  }
}

}  // namespace dsaug::nn
