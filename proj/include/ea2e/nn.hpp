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

// Named parameter storage with gradient buffers, flat-vector access for
// checkpointing and finite-difference checks, and an adaptive-moment
// optimizer.

#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ea2e/common.hpp"

namespace ea2e {

using Mat = Eigen::MatrixXd;

struct ParamEntry {
  std::string name;
  Mat value;
  Mat grad;
};

// Parameters in creation order; names unique. The flat-vector view walks
// entries in creation order, each matrix row-major.
class ParameterStore {
 public:
  Mat& create(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    if (index_.count(name)) {
      throw std::logic_error("duplicate parameter name: " + name);
    }
    auto entry = std::make_unique<ParamEntry>();
    entry->name = name;
    entry->value = Mat::Zero(rows, cols);
    entry->grad = Mat::Zero(rows, cols);
    index_[name] = entries_.size();
    entries_.push_back(std::move(entry));
    return entries_.back()->value;
  }

  bool has(const std::string& name) const { return index_.count(name) != 0; }

  ParamEntry& entry(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) {
      throw std::logic_error("unknown parameter name: " + name);
    }
    return *entries_[it->second];
  }

  const ParamEntry& entry(const std::string& name) const {
    return const_cast<ParameterStore*>(this)->entry(name);
  }

  const std::vector<std::unique_ptr<ParamEntry>>& entries() const {
    return entries_;
  }

  void zero_grads() {
    for (auto& e : entries_) e->grad.setZero();
  }

  void scale_grads(double factor) {
    for (auto& e : entries_) e->grad *= factor;
  }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) {
      n += static_cast<std::size_t>(e->value.size());
    }
    return n;
  }

  std::vector<double> flatten() const { return flatten_field(false); }
  std::vector<double> flatten_grads() const { return flatten_field(true); }

  void unflatten(const std::vector<double>& flat) {
    if (flat.size() != scalar_count()) {
      throw ValidationError(msg("parameter vector length ", flat.size(),
                                " does not match model size ", scalar_count()));
    }
    std::size_t k = 0;
    for (auto& e : entries_) {
      for (Eigen::Index r = 0; r < e->value.rows(); ++r) {
        for (Eigen::Index c = 0; c < e->value.cols(); ++c) {
          e->value(r, c) = flat[k++];
        }
      }
    }
  }

 private:
  std::vector<double> flatten_field(bool grads) const {
    std::vector<double> flat;
    flat.reserve(scalar_count());
    for (const auto& e : entries_) {
      const Mat& m = grads ? e->grad : e->value;
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          flat.push_back(m(r, c));
        }
      }
    }
    return flat;
  }

  std::vector<std::unique_ptr<ParamEntry>> entries_;
  std::map<std::string, std::size_t> index_;
};

// Adaptive moment estimation with bias correction. step() consumes the
// gradients currently held by the store.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(ParameterStore* store, double learning_rate,
                         double beta1 = 0.9, double beta2 = 0.999,
                         double epsilon = 1e-8)
      : store_(store),
        learning_rate_(learning_rate),
        beta1_(beta1),
        beta2_(beta2),
        epsilon_(epsilon) {
    for (const auto& e : store_->entries()) {
      m_.push_back(Mat::Zero(e->value.rows(), e->value.cols()));
      v_.push_back(Mat::Zero(e->value.rows(), e->value.cols()));
    }
  }

  void step() {
    if (m_.size() != store_->entries().size()) {
      throw std::logic_error("optimizer state out of sync with store");
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < m_.size(); ++i) {
      ParamEntry& e = *store_->entries()[i];
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * e.grad;
      v_[i] = beta2_ * v_[i].array() +
              (1.0 - beta2_) * e.grad.array().square();
      const Mat m_hat = m_[i] / bc1;
      const Mat v_hat = v_[i] / bc2;
      e.value.array() -=
          learning_rate_ * m_hat.array() / (v_hat.array().sqrt() + epsilon_);
    }
  }

  std::size_t steps_taken() const { return t_; }

 private:
  ParameterStore* store_;
  double learning_rate_;
  double beta1_;
  double beta2_;
  double epsilon_;
  std::size_t t_ = 0;
  std::vector<Mat> m_;
  std::vector<Mat> v_;
};

}  // namespace ea2e
