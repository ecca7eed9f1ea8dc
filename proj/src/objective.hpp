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

#ifndef CSIM_OBJECTIVE_HPP_
#define CSIM_OBJECTIVE_HPP_

// Scoring head and training objectives.
//
//   p = softmax(V tanh(U [u1; u2; m] + bU) + bV),   y = sum_i i * p_i
//
// Losses over a batch of N predictions:
//   NLL = sum_n -log p_n[t_n]                 t_n = gold rounded half away from 0
//   MSE = (1/N) sum_n (y_n - gold_n)^2
//   KLD = sum_n sum_i q_n[i] log(q_n[i] / p_n[i])  q_n = gold_distribution(gold_n)
//   PCC = -pearson(y, gold)

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "numkit.hpp"

namespace csim {

inline constexpr std::size_t kClasses = 6;

template <typename T>
using ClassVector = std::array<T, kClasses>;

template <typename T>
struct ScorerParams {
  Matrix<T> U;   // hidden x (2 * state + features)
  Matrix<T> bU;  // hidden x 1
  Matrix<T> V;   // 6 x hidden
  Matrix<T> bV;  // 6 x 1

  static ScorerParams zeros(std::size_t input, std::size_t hidden);
  static ScorerParams random(std::size_t input, std::size_t hidden,
                             SeededRng& rng);

  std::size_t input() const noexcept { return U.cols(); }
  std::size_t hidden() const noexcept { return U.rows(); }

  template <typename F>
  void for_each(F&& f) {
    f("U", U); f("bU", bU); f("V", V); f("bV", bV);
  }
  template <typename F>
  void for_each(F&& f) const {
    f("U", U); f("bU", bU); f("V", V); f("bV", bV);
  }
};

template <typename T>
struct ScoreDistribution {
  ClassVector<T> p{};
  T y = T(0);
};

template <typename T>
struct ScorerTape {
  const ScorerParams<T>* params = nullptr;
  std::vector<T> input;
  std::vector<T> hidden;
  ClassVector<T> p{};
};

template <typename T>
T expected_score(const ClassVector<T>& p) {
  T y = T(0);
  for (std::size_t i = 0; i < kClasses; ++i) y += static_cast<T>(i) * p[i];
  return y;
}

template <typename T>
ScoreDistribution<T> score_pair(const ScorerParams<T>& params,
                                std::span<const T> u1, std::span<const T> u2,
                                std::span<const T> features,
                                ScorerTape<T>* tape = nullptr);

// Chains dL/dp and dL/dy back through the head. Parameter gradients are
// accumulated into `grad`; dL/du1 and dL/du2 are written to the outputs.
template <typename T>
void scorer_backward(const ScorerParams<T>& params, const ScorerTape<T>& tape,
                     const ClassVector<T>& dp, T dy, ScorerParams<T>& grad,
                     std::span<T> du1, std::span<T> du2);

// Two-point distribution over adjacent classes whose mean is `gold`.
ClassVector<double> gold_distribution(double gold);
// Nearest class, halves rounded away from zero.
std::size_t nearest_class(double gold);

enum class LossKind { kNll, kMse, kKld, kPcc };

std::string_view loss_name(LossKind kind);
std::optional<LossKind> parse_loss(std::string_view name);

template <typename T>
struct Batch {
  std::vector<ClassVector<T>> p;
  std::vector<T> y;
  std::vector<double> gold;

  std::size_t size() const noexcept { return gold.size(); }
};

// Build a batch from distributions, with y decoded by expectation.
template <typename T>
Batch<T> make_batch(const std::vector<ClassVector<T>>& p,
                    const std::vector<double>& gold);

template <typename T>
double batch_loss(LossKind kind, const Batch<T>& batch);

struct LossGradient {
  std::vector<ClassVector<double>> dp;  // direct dependence on p
  std::vector<double> dy;               // dependence through y
};

template <typename T>
LossGradient batch_loss_backward(LossKind kind, const Batch<T>& batch);

// Denominator floor for the correlation. Above it the value is the plain
// Pearson coefficient, so location/scale invariance is exact.
inline constexpr double kPearsonGuard = 1e-8;

double pearson(std::span<const double> y, std::span<const double> gold);

// dPCC/dy_n for the guarded coefficient.
std::vector<double> pearson_gradient(std::span<const double> y,
                                     std::span<const double> gold);

}  // namespace csim

#endif  // CSIM_OBJECTIVE_HPP_
