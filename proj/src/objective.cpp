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

#include "objective.hpp"

#include <cmath>

namespace csim {
namespace {

template <typename T>
void check_batch(LossKind kind, const Batch<T>& batch) {
  const std::size_t n = batch.size();
  if (batch.p.size() != n || batch.y.size() != n) {
    throw ShapeError("batch: " + std::to_string(batch.p.size()) +
                     " distributions, " + std::to_string(batch.y.size()) +
                     " scores, " + std::to_string(n) + " golds");
  }
  if (n == 0) throw ContractError("batch: empty batch");
  if (kind == LossKind::kPcc && n < 2) {
    throw ContractError("batch: correlation needs at least 2 samples");
  }
}

struct Moments {
  std::vector<double> cy, cg;
  double cov = 0.0, sy = 0.0, sg = 0.0;  // raw root sums of squares
};

Moments centered(std::span<const double> y, std::span<const double> gold) {
  const std::size_t n = y.size();
  double my = 0.0, mg = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    my += y[i];
    mg += gold[i];
  }
  my /= static_cast<double>(n);
  mg /= static_cast<double>(n);
  Moments m;
  m.cy.resize(n);
  m.cg.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.cy[i] = y[i] - my;
    m.cg[i] = gold[i] - mg;
    m.cov += m.cy[i] * m.cg[i];
    m.sy += m.cy[i] * m.cy[i];
    m.sg += m.cg[i] * m.cg[i];
  }
  m.sy = std::sqrt(m.sy);
  m.sg = std::sqrt(m.sg);
  return m;
}

void check_lengths(std::span<const double> y, std::span<const double> gold) {
  if (y.size() != gold.size()) {
    throw ShapeError("pearson: lengths " + std::to_string(y.size()) + " and " +
                     std::to_string(gold.size()));
  }
  if (y.size() < 2) {
    throw ContractError("pearson: need at least 2 samples, got " +
                        std::to_string(y.size()));
  }
}

template <typename T>
std::vector<double> as_double(const std::vector<T>& v) {
  return std::vector<double>(v.begin(), v.end());
}

}  // namespace

template <typename T>
ScorerParams<T> ScorerParams<T>::zeros(std::size_t input, std::size_t hidden) {
  return {Matrix<T>(hidden, input), Matrix<T>(hidden, 1),
          Matrix<T>(kClasses, hidden), Matrix<T>(kClasses, 1)};
}

template <typename T>
ScorerParams<T> ScorerParams<T>::random(std::size_t input, std::size_t hidden,
                                        SeededRng& rng) {
  ScorerParams p = zeros(input, hidden);
  p.U = init_uniform<T>(hidden, input, 1.0 / std::sqrt(double(input)), rng);
  p.V = init_uniform<T>(kClasses, hidden, 1.0 / std::sqrt(double(hidden)), rng);
  return p;
}

template <typename T>
ScoreDistribution<T> score_pair(const ScorerParams<T>& params,
                                std::span<const T> u1, std::span<const T> u2,
                                std::span<const T> features,
                                ScorerTape<T>* tape) {
  const std::size_t width = u1.size() + u2.size() + features.size();
  if (width != params.input() || params.V.rows() != kClasses ||
      params.V.cols() != params.hidden()) {
    throw ShapeError("score_pair: input of width " + std::to_string(width) +
                     " for U " + params.U.shape() + " and V " +
                     params.V.shape());
  }
  std::vector<T> input;
  input.reserve(width);
  input.insert(input.end(), u1.begin(), u1.end());
  input.insert(input.end(), u2.begin(), u2.end());
  input.insert(input.end(), features.begin(), features.end());

  std::vector<T> hidden(params.bU.values().begin(), params.bU.values().end());
  gemv_acc(params.U, std::span<const T>(input), std::span<T>(hidden));
  for (auto& h : hidden) h = std::tanh(h);
  std::vector<T> logits(params.bV.values().begin(), params.bV.values().end());
  gemv_acc(params.V, std::span<const T>(hidden), std::span<T>(logits));
  const auto probs = softmax(logits);

  ScoreDistribution<T> out;
  std::copy(probs.begin(), probs.end(), out.p.begin());
  out.y = expected_score(out.p);
  if (tape) {
    tape->params = &params;
    tape->input = std::move(input);
    tape->hidden = std::move(hidden);
    tape->p = out.p;
  }
  return out;
}

template <typename T>
void scorer_backward(const ScorerParams<T>& params, const ScorerTape<T>& tape,
                     const ClassVector<T>& dp, T dy, ScorerParams<T>& grad,
                     std::span<T> du1, std::span<T> du2) {
  if (tape.params != &params || tape.input.size() != params.input() ||
      tape.hidden.size() != params.hidden()) {
    throw ContractError("scorer_backward: tape does not match parameters");
  }
  if (du1.size() + du2.size() > params.input()) {
    throw ShapeError("scorer_backward: embedding gradients wider than input");
  }
  std::array<T, kClasses> g{};
  T mean = T(0);
  for (std::size_t i = 0; i < kClasses; ++i) {
    g[i] = dp[i] + static_cast<T>(i) * dy;
    mean += tape.p[i] * g[i];
  }
  std::vector<T> dlogits(kClasses);
  for (std::size_t i = 0; i < kClasses; ++i) {
    dlogits[i] = tape.p[i] * (g[i] - mean);
  }
  outer_acc(grad.V, std::span<const T>(dlogits), std::span<const T>(tape.hidden));
  axpy(T(1), std::span<const T>(dlogits), grad.bV.values());

  std::vector<T> dhidden(params.hidden());
  gemv_t_acc(params.V, std::span<const T>(dlogits), std::span<T>(dhidden));
  for (std::size_t k = 0; k < dhidden.size(); ++k) {
    dhidden[k] *= T(1) - tape.hidden[k] * tape.hidden[k];
  }
  outer_acc(grad.U, std::span<const T>(dhidden), std::span<const T>(tape.input));
  axpy(T(1), std::span<const T>(dhidden), grad.bU.values());

  std::vector<T> dinput(params.input());
  gemv_t_acc(params.U, std::span<const T>(dhidden), std::span<T>(dinput));
  std::copy(dinput.begin(), dinput.begin() + du1.size(), du1.begin());
  std::copy(dinput.begin() + du1.size(),
            dinput.begin() + du1.size() + du2.size(), du2.begin());
}

ClassVector<double> gold_distribution(double gold) {
  if (!(gold >= 0.0 && gold <= 5.0)) {
    throw RangeError("gold score " + std::to_string(gold) + " outside [0, 5]");
  }
  ClassVector<double> q{};
  const double lower = std::floor(gold);
  const auto k = static_cast<std::size_t>(lower);
  if (gold == lower) {
    q[k] = 1.0;
    return q;
  }
  q[k] = lower + 1.0 - gold;
  q[k + 1] = gold - lower;
  return q;
}

std::size_t nearest_class(double gold) {
  if (!(gold >= 0.0 && gold <= 5.0)) {
    throw RangeError("gold score " + std::to_string(gold) + " outside [0, 5]");
  }
  return static_cast<std::size_t>(std::round(gold));
}

std::string_view loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::kNll: return "nll";
    case LossKind::kMse: return "mse";
    case LossKind::kKld: return "kld";
    case LossKind::kPcc: return "pcc";
  }
  return "?";
}

std::optional<LossKind> parse_loss(std::string_view name) {
  for (auto k : {LossKind::kNll, LossKind::kMse, LossKind::kKld, LossKind::kPcc}) {
    if (loss_name(k) == name) return k;
  }
  return std::nullopt;
}

template <typename T>
Batch<T> make_batch(const std::vector<ClassVector<T>>& p,
                    const std::vector<double>& gold) {
  Batch<T> b;
  b.p = p;
  b.gold = gold;
  for (const auto& dist : p) b.y.push_back(expected_score(dist));
  return b;
}

template <typename T>
double batch_loss(LossKind kind, const Batch<T>& batch) {
  check_batch(kind, batch);
  const std::size_t n = batch.size();
  double loss = 0.0;
  switch (kind) {
    case LossKind::kNll:
      for (std::size_t i = 0; i < n; ++i) {
        loss -= std::log(static_cast<double>(batch.p[i][nearest_class(batch.gold[i])]));
      }
      return loss;
    case LossKind::kMse:
      for (std::size_t i = 0; i < n; ++i) {
        const double e = static_cast<double>(batch.y[i]) - batch.gold[i];
        loss += e * e;
      }
      return loss / static_cast<double>(n);
    case LossKind::kKld:
      for (std::size_t i = 0; i < n; ++i) {
        const auto q = gold_distribution(batch.gold[i]);
        for (std::size_t c = 0; c < kClasses; ++c) {
          if (q[c] == 0.0) continue;
          loss += q[c] * (std::log(q[c]) - std::log(static_cast<double>(batch.p[i][c])));
        }
      }
      return loss;
    case LossKind::kPcc:
      return -pearson(as_double(batch.y), batch.gold);
  }
  return loss;
}

template <typename T>
LossGradient batch_loss_backward(LossKind kind, const Batch<T>& batch) {
  check_batch(kind, batch);
  const std::size_t n = batch.size();
  LossGradient g;
  g.dp.assign(n, ClassVector<double>{});
  g.dy.assign(n, 0.0);
  switch (kind) {
    case LossKind::kNll:
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = nearest_class(batch.gold[i]);
        g.dp[i][t] = -1.0 / static_cast<double>(batch.p[i][t]);
      }
      break;
    case LossKind::kMse:
      for (std::size_t i = 0; i < n; ++i) {
        g.dy[i] = 2.0 * (static_cast<double>(batch.y[i]) - batch.gold[i]) /
                  static_cast<double>(n);
      }
      break;
    case LossKind::kKld:
      for (std::size_t i = 0; i < n; ++i) {
        const auto q = gold_distribution(batch.gold[i]);
        for (std::size_t c = 0; c < kClasses; ++c) {
          if (q[c] != 0.0) g.dp[i][c] = -q[c] / static_cast<double>(batch.p[i][c]);
        }
      }
      break;
    case LossKind::kPcc: {
      const auto d = pearson_gradient(as_double(batch.y), batch.gold);
      for (std::size_t i = 0; i < n; ++i) g.dy[i] = -d[i];
      break;
    }
  }
  return g;
}

double pearson(std::span<const double> y, std::span<const double> gold) {
  check_lengths(y, gold);
  const Moments m = centered(y, gold);
  const double denom =
      std::max(m.sy, kPearsonGuard) * std::max(m.sg, kPearsonGuard);
  return m.cov / denom;
}

std::vector<double> pearson_gradient(std::span<const double> y,
                                     std::span<const double> gold) {
  check_lengths(y, gold);
  const Moments m = centered(y, gold);
  const std::size_t n = y.size();
  const double sy = std::max(m.sy, kPearsonGuard);
  const double sg = std::max(m.sg, kPearsonGuard);
  double cg_mean = 0.0;
  for (double v : m.cg) cg_mean += v;
  cg_mean /= static_cast<double>(n);

  std::vector<double> grad(n);
  for (std::size_t i = 0; i < n; ++i) {
    // d cov / d y_i
    grad[i] = (m.cg[i] - cg_mean) / (sy * sg);
    if (m.sy > kPearsonGuard) {
      grad[i] -= m.cov * m.cy[i] / (m.sy * sy * sy * sg);
    }
  }
  return grad;
}

#define CSIM_INSTANTIATE_OBJECTIVE(T)                                         \
  template struct ScorerParams<T>;                                            \
  template ScoreDistribution<T> score_pair(const ScorerParams<T>&,            \
                                           std::span<const T>,                \
                                           std::span<const T>,                \
                                           std::span<const T>, ScorerTape<T>*); \
  template void scorer_backward(const ScorerParams<T>&, const ScorerTape<T>&, \
                                const ClassVector<T>&, T, ScorerParams<T>&,   \
                                std::span<T>, std::span<T>);                  \
  template Batch<T> make_batch(const std::vector<ClassVector<T>>&,            \
                               const std::vector<double>&);                   \
  template double batch_loss(LossKind, const Batch<T>&);                      \
  template LossGradient batch_loss_backward(LossKind, const Batch<T>&);

CSIM_INSTANTIATE_OBJECTIVE(float)
CSIM_INSTANTIATE_OBJECTIVE(double)

#undef CSIM_INSTANTIATE_OBJECTIVE

}  // namespace csim
