/* Copyright 2026 The csim Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CSIM_NUMKIT_HPP_
#define CSIM_NUMKIT_HPP_

// Dense row-major linear algebra, activations, seeded initialization and
// Adam. Everything is templated on the scalar so the same model code runs in
// float for training and in double for finite-difference checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace csim {

template <typename T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                       " does not match shape " + shape_string(rows, cols));
    }
  }
  Matrix(std::size_t rows, std::size_t cols, std::initializer_list<T> data)
      : Matrix(rows, cols, std::vector<T>(data)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  std::string shape() const { return shape_string(rows_, cols_); }
  bool same_shape(const Matrix& o) const noexcept {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  std::span<T> row(std::size_t r) {
    return std::span<T>(data_).subspan(r * cols_, cols_);
  }
  std::span<const T> row(std::size_t r) const {
    return std::span<const T>(data_).subspan(r * cols_, cols_);
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  template <typename U>
  Matrix<U> cast() const {
    std::vector<U> out(data_.size());
    std::transform(data_.begin(), data_.end(), out.begin(),
                   [](T v) { return static_cast<U>(v); });
    return Matrix<U>(rows_, cols_, std::move(out));
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](T v) { return std::isfinite(v); });
  }

  bool operator==(const Matrix& o) const = default;

  static std::string shape_string(std::size_t r, std::size_t c) {
    return std::to_string(r) + "x" + std::to_string(c);
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: shape mismatch " + a.shape() + " vs " +
                     b.shape());
  }
  Matrix<T> out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T aik = a(i, k);
      if (aik == T(0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

// y += W x
template <typename T>
void gemv_acc(const Matrix<T>& w, std::span<const T> x, std::span<T> y) {
  if (w.cols() != x.size() || w.rows() != y.size()) {
    throw ShapeError("gemv: matrix " + w.shape() + " with x of length " +
                     std::to_string(x.size()) + " and y of length " +
                     std::to_string(y.size()));
  }
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const auto r = w.row(i);
    T acc = T(0);
    for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * x[j];
    y[i] += acc;
  }
}

// y += W^T g
template <typename T>
void gemv_t_acc(const Matrix<T>& w, std::span<const T> g, std::span<T> y) {
  if (w.rows() != g.size() || w.cols() != y.size()) {
    throw ShapeError("gemv_t: matrix " + w.shape() + " with g of length " +
                     std::to_string(g.size()) + " and y of length " +
                     std::to_string(y.size()));
  }
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const T gi = g[i];
    if (gi == T(0)) continue;
    const auto r = w.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) y[j] += gi * r[j];
  }
}

// G += g x^T
template <typename T>
void outer_acc(Matrix<T>& grad, std::span<const T> g, std::span<const T> x) {
  if (grad.rows() != g.size() || grad.cols() != x.size()) {
    throw ShapeError("outer: matrix " + grad.shape() + " with g of length " +
                     std::to_string(g.size()) + " and x of length " +
                     std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < grad.rows(); ++i) {
    const T gi = g[i];
    if (gi == T(0)) continue;
    auto r = grad.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += gi * x[j];
  }
}

template <typename T>
void axpy(T alpha, std::span<const T> x, std::span<T> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

template <typename T>
T dot(std::span<const T> a, std::span<const T> b) {
  T acc = T(0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

template <typename T>
T sigmoid(T x) {
  // Branch keeps exp() from overflowing for large |x|.
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T>
std::vector<T> softmax(std::span<const T> z) {
  std::vector<T> out(z.size());
  if (z.empty()) return out;
  const T peak = *std::max_element(z.begin(), z.end());
  T total = T(0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - peak);
    total += out[i];
  }
  for (auto& v : out) v /= total;
  return out;
}

template <typename T>
std::vector<T> softmax(const std::vector<T>& z) {
  return softmax(std::span<const T>(z));
}

// Deterministic generator. The engine sequence is fixed by the standard and
// all conversions to reals and indices are done here rather than through
// <random> distributions, whose output is implementation-defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform in [0, n) by rejection; n must be positive.
  std::size_t index(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return static_cast<std::size_t>(draw % bound);
  }

  // Independent child stream; the child seed mixes this stream's next draw
  // with a caller salt so sibling streams never coincide.
  SeededRng split(std::uint64_t salt) {
    std::uint64_t z = engine_() + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return SeededRng(z ^ (z >> 31));
  }

  template <typename It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = index(i);
      std::iter_swap(first + (i - 1), first + j);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

template <typename T>
Matrix<T> init_uniform(std::size_t rows, std::size_t cols, double scale,
                       SeededRng& rng) {
  if (!(scale > 0.0)) {
    throw ConfigError("init_uniform: scale must be positive, got " +
                      std::to_string(scale));
  }
  Matrix<T> m(rows, cols);
  for (auto& v : m.values()) v = static_cast<T>(rng.uniform(-scale, scale));
  return m;
}

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  AdamState() = default;
  AdamState(std::size_t rows, std::size_t cols)
      : first_moment(rows, cols), second_moment(rows, cols) {}
  explicit AdamState(const Matrix<T>& like)
      : AdamState(like.rows(), like.cols()) {}

  Matrix<T> first_moment;
  Matrix<T> second_moment;
  std::int64_t step = 0;
};

template <typename T>
void adam_step(Matrix<T>& param, const Matrix<T>& grad, AdamState<T>& state,
               double lr, const AdamConfig& cfg = {}) {
  if (!param.same_shape(grad) || !param.same_shape(state.first_moment) ||
      !param.same_shape(state.second_moment)) {
    throw ShapeError("adam_step: parameter " + param.shape() +
                     ", gradient " + grad.shape() + ", state " +
                     state.first_moment.shape());
  }
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);
  const T b1 = static_cast<T>(cfg.beta1);
  const T b2 = static_cast<T>(cfg.beta2);
  auto p = param.values();
  auto g = grad.values();
  auto m = state.first_moment.values();
  auto v = state.second_moment.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i] = b1 * m[i] + (T(1) - b1) * g[i];
    v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
    const double m_hat = static_cast<double>(m[i]) / correction1;
    const double v_hat = static_cast<double>(v[i]) / correction2;
    p[i] -= static_cast<T>(lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon));
  }
}

}  // namespace csim

#endif  // CSIM_NUMKIT_HPP_
