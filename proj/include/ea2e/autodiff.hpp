// Copyright 2026 The ea2e Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal reverse-mode automatic differentiation over dense matrices. A Tape
// records a forward computation as a sequence of nodes; backward() runs one
// reverse sweep and accumulates parameter gradients into caller-owned sinks.
//
// The op set is exactly what the encoder-decoder model needs; shape
// violations are programming errors and throw std::logic_error.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ea2e/common.hpp"

namespace ea2e::ad {

using Mat = Eigen::MatrixXd;

struct Var {
  std::size_t id = static_cast<std::size_t>(-1);
};

class Tape {
 public:
  // Leaf holding a constant value; receives no gradient of interest.
  Var input(Mat value) { return push(Op::kLeaf, value); }

  // Leaf bound to a parameter; backward() adds dL/dvalue into *grad_sink.
  Var param(const Mat& value, Mat* grad_sink) {
    Var v = push(Op::kLeaf, value);
    nodes_[v.id].sink = grad_sink;
    return v;
  }

  Var add(Var a, Var b) {
    const Mat& x = val(a);
    const Mat& y = val(b);
    require(x.rows() == y.rows() && x.cols() == y.cols(), "add shape mismatch");
    Var v = push(Op::kAdd, x + y);
    bind(v, a, b);
    return v;
  }

  // Broadcast-adds a 1×d row vector to every row of an n×d matrix.
  Var add_rowvec(Var a, Var row) {
    const Mat& x = val(a);
    const Mat& r = val(row);
    require(r.rows() == 1 && r.cols() == x.cols(), "add_rowvec shape mismatch");
    Mat out = x;
    out.rowwise() += r.row(0);
    Var v = push(Op::kAddRowvec, std::move(out));
    bind(v, a, row);
    return v;
  }

  Var scale(Var a, double factor) {
    Var v = push(Op::kScale, val(a) * factor);
    bind(v, a);
    nodes_[v.id].factor = factor;
    return v;
  }

  Var matmul(Var a, Var b) {
    const Mat& x = val(a);
    const Mat& y = val(b);
    require(x.cols() == y.rows(), "matmul shape mismatch");
    Var v = push(Op::kMatmul, x * y);
    bind(v, a, b);
    return v;
  }

  // a · bᵀ, used for attention scores and the tied output projection.
  Var matmul_nt(Var a, Var b) {
    const Mat& x = val(a);
    const Mat& y = val(b);
    require(x.cols() == y.cols(), "matmul_nt shape mismatch");
    Var v = push(Op::kMatmulNT, x * y.transpose());
    bind(v, a, b);
    return v;
  }

  Var tanh(Var a) {
    Var v = push(Op::kTanh, val(a).array().tanh().matrix());
    bind(v, a);
    return v;
  }

  Var softmax_rows(Var a) {
    const Mat& x = val(a);
    Mat out(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double m = x.row(i).maxCoeff();
      Eigen::RowVectorXd e = (x.row(i).array() - m).exp();
      out.row(i) = e / e.sum();
    }
    Var v = push(Op::kSoftmaxRows, std::move(out));
    bind(v, a);
    return v;
  }

  // Adds a constant matrix (e.g., a causal attention mask); the constant
  // receives no gradient.
  Var add_const(Var a, const Mat& c) {
    const Mat& x = val(a);
    require(x.rows() == c.rows() && x.cols() == c.cols(),
            "add_const shape mismatch");
    Var v = push(Op::kAddConst, x + c);
    bind(v, a);
    return v;
  }

  // out.row(i) = a.row(rows[i]); indices may repeat.
  Var gather_rows(Var a, const std::vector<int>& rows) {
    const Mat& x = val(a);
    Mat out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require(rows[i] >= 0 && rows[i] < x.rows(), "gather_rows index");
      out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
    }
    Var v = push(Op::kGatherRows, std::move(out));
    bind(v, a);
    nodes_[v.id].rows = rows;
    return v;
  }

  // out.row(0) = 0, out.row(i) = a.row(i−1): the previous-token view used by
  // the local mixing layer.
  Var shift_rows_down(Var a) {
    const Mat& x = val(a);
    Mat out = Mat::Zero(x.rows(), x.cols());
    if (x.rows() > 1) out.bottomRows(x.rows() - 1) = x.topRows(x.rows() - 1);
    Var v = push(Op::kShiftRowsDown, std::move(out));
    bind(v, a);
    return v;
  }

  // Σ over rows of −log softmax(logits)[row, target[row]], as a 1×1 value.
  Var cross_entropy(Var logits, const std::vector<int>& targets) {
    const Mat& x = val(logits);
    require(static_cast<Eigen::Index>(targets.size()) == x.rows(),
            "cross_entropy target count");
    Mat probs(x.rows(), x.cols());
    double loss = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      require(targets[static_cast<std::size_t>(i)] >= 0 &&
                  targets[static_cast<std::size_t>(i)] < x.cols(),
              "cross_entropy target index");
      const double m = x.row(i).maxCoeff();
      Eigen::RowVectorXd e = (x.row(i).array() - m).exp();
      const double lse = m + std::log(e.sum());
      probs.row(i) = e / e.sum();
      loss += lse - x(i, targets[static_cast<std::size_t>(i)]);
    }
    Var v = push(Op::kCrossEntropy, scalar_mat(loss));
    bind(v, logits);
    nodes_[v.id].rows = targets;
    nodes_[v.id].cache = std::move(probs);
    return v;
  }

  // Σ over the listed rows of the Euclidean distance between the rows of two
  // equally shaped matrices, as a 1×1 value.
  Var l2_align(Var p, Var q, const std::vector<int>& rows) {
    const Mat& x = val(p);
    const Mat& y = val(q);
    require(x.rows() == y.rows() && x.cols() == y.cols(),
            "l2_align shape mismatch");
    double total = 0.0;
    for (int r : rows) {
      require(r >= 0 && r < x.rows(), "l2_align row index");
      total += (x.row(r) - y.row(r)).norm();
    }
    Var v = push(Op::kL2Align, scalar_mat(total));
    bind(v, p, q);
    nodes_[v.id].rows = rows;
    return v;
  }

  const Mat& value(Var v) const { return val(v); }

  double scalar(Var v) const {
    const Mat& x = val(v);
    require(x.rows() == 1 && x.cols() == 1, "scalar on non-1x1 value");
    return x(0, 0);
  }

  // Reverse sweep from `loss` (a 1×1 node); parameter gradients are added
  // into their sinks. May be called once per recorded computation.
  void backward(Var loss) {
    require(loss.id < nodes_.size(), "backward on foreign node");
    require(val(loss).rows() == 1 && val(loss).cols() == 1,
            "backward seed must be 1x1");
    grad(loss.id) = scalar_mat(1.0);
    for (std::size_t id = loss.id + 1; id-- > 0;) {
      Node& node = nodes_[id];
      if (node.grad.size() == 0) continue;  // no path to the loss
      propagate(node);
      if (node.sink != nullptr) *node.sink += node.grad;
    }
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  enum class Op {
    kLeaf,
    kAdd,
    kAddRowvec,
    kScale,
    kMatmul,
    kMatmulNT,
    kTanh,
    kSoftmaxRows,
    kAddConst,
    kGatherRows,
    kShiftRowsDown,
    kCrossEntropy,
    kL2Align,
  };

  struct Node {
    Op op = Op::kLeaf;
    std::size_t a = static_cast<std::size_t>(-1);
    std::size_t b = static_cast<std::size_t>(-1);
    Mat value;
    Mat grad;             // empty until touched by backward
    Mat cache;            // op-specific forward byproduct
    std::vector<int> rows;
    double factor = 1.0;
    Mat* sink = nullptr;
  };

  static void require(bool ok, const char* what) {
    if (!ok) throw std::logic_error(std::string("autodiff: ") + what);
  }

  static Mat scalar_mat(double x) {
    Mat m(1, 1);
    m(0, 0) = x;
    return m;
  }

  Var push(Op op, Mat value) {
    Node node;
    node.op = op;
    node.value = std::move(value);
    nodes_.push_back(std::move(node));
    return Var{nodes_.size() - 1};
  }

  void bind(Var v, Var a, Var b = Var{}) {
    nodes_[v.id].a = a.id;
    nodes_[v.id].b = b.id;
  }

  const Mat& val(Var v) const {
    require(v.id < nodes_.size(), "unknown node");
    return nodes_[v.id].value;
  }

  // Gradient accumulator for node `id`, zero-initialized on first use.
  Mat& grad(std::size_t id) {
    Node& node = nodes_[id];
    if (node.grad.size() == 0) {
      node.grad = Mat::Zero(node.value.rows(), node.value.cols());
    }
    return node.grad;
  }

  void propagate(Node& node) {
    const Mat& g = node.grad;
    switch (node.op) {
      case Op::kLeaf:
        break;
      case Op::kAdd:
        grad(node.a) += g;
        grad(node.b) += g;
        break;
      case Op::kAddRowvec:
        grad(node.a) += g;
        grad(node.b) += g.colwise().sum();
        break;
      case Op::kScale:
        grad(node.a) += node.factor * g;
        break;
      case Op::kMatmul:
        grad(node.a) += g * nodes_[node.b].value.transpose();
        grad(node.b) += nodes_[node.a].value.transpose() * g;
        break;
      case Op::kMatmulNT:
        grad(node.a) += g * nodes_[node.b].value;
        grad(node.b) += g.transpose() * nodes_[node.a].value;
        break;
      case Op::kTanh:
        grad(node.a).array() +=
            g.array() * (1.0 - node.value.array().square());
        break;
      case Op::kSoftmaxRows: {
        Mat& da = grad(node.a);
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
          const double dot = g.row(i).dot(node.value.row(i));
          da.row(i).array() +=
              node.value.row(i).array() * (g.row(i).array() - dot);
        }
        break;
      }
      case Op::kAddConst:
        grad(node.a) += g;
        break;
      case Op::kGatherRows: {
        Mat& da = grad(node.a);
        for (std::size_t i = 0; i < node.rows.size(); ++i) {
          da.row(node.rows[i]) += g.row(static_cast<Eigen::Index>(i));
        }
        break;
      }
      case Op::kShiftRowsDown: {
        Mat& da = grad(node.a);
        const Eigen::Index n = g.rows();
        if (n > 1) da.topRows(n - 1) += g.bottomRows(n - 1);
        break;
      }
      case Op::kCrossEntropy: {
        const double g00 = g(0, 0);
        Mat& da = grad(node.a);
        da += g00 * node.cache;
        for (std::size_t i = 0; i < node.rows.size(); ++i) {
          da(static_cast<Eigen::Index>(i), node.rows[i]) -= g00;
        }
        break;
      }
      case Op::kL2Align: {
        const double g00 = g(0, 0);
        const Mat& p = nodes_[node.a].value;
        const Mat& q = nodes_[node.b].value;
        Mat& dp = grad(node.a);
        Mat& dq = grad(node.b);
        for (int r : node.rows) {
          Eigen::RowVectorXd d = p.row(r) - q.row(r);
          const double nrm = d.norm();
          if (nrm > 1e-12) {
            dp.row(r) += (g00 / nrm) * d;
            dq.row(r) -= (g00 / nrm) * d;
          }
        }
        break;
      }
    }
  }

  std::vector<Node> nodes_;
};

}  // namespace ea2e::ad
