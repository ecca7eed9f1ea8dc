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

#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace csim {

double GradCheckReport::max_rel_error() const {
  double worst = 0.0;
  for (const auto& g : groups) worst = std::max(worst, g.max_rel_error);
  return worst;
}

GradCheckReport gradient_check(const Model<double>& model,
                               std::span<const PairInput> batch, LossKind kind,
                               const GradCheckOptions& options) {
  const auto dims = model.dims();
  if (dims.hidden > 8 || dims.embedding > 8 || batch.size() > 6) {
    throw ConfigError("gradient check is limited to H <= 8, D <= 8, batch <= 6");
  }
  if (batch.empty()) throw ConfigError("gradient check needs a batch");

  Model<double> analytic = Model<double>::zeros_like(model);
  if (options.zero_cotangent) {
    const auto fwd = forward_batch(model, batch);
    LossGradient zero;
    zero.dp.assign(batch.size(), ClassVector<double>{});
    zero.dy.assign(batch.size(), 0.0);
    backward_batch(model, batch, fwd, zero, analytic);
  } else {
    loss_and_gradient(model, batch, kind, &analytic);
  }

  Model<double> probe = model;
  const auto loss_at = [&]() {
    return options.zero_cotangent ? 0.0 : loss_and_gradient(probe, batch, kind);
  };

  GradCheckReport report;
  auto params = probe.tensors();
  auto grads = analytic.tensors();
  for (std::size_t k = 0; k < params.size(); ++k) {
    Matrix<double>& p = *params[k].second;
    const Matrix<double>& g = *grads[k].second;
    const double sign = params[k].first == options.corrupt_tensor ? -1.0 : 1.0;
    GradCheckGroup group;
    group.name = params[k].first;
    group.size = p.size();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p[i];
      p[i] = saved + options.step;
      const double up = loss_at();
      p[i] = saved - options.step;
      const double down = loss_at();
      p[i] = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double a = sign * g[i];
      const double scale = std::max({std::abs(a), std::abs(numeric), kGradCheckFloor});
      group.max_rel_error = std::max(group.max_rel_error, std::abs(a - numeric) / scale);
      group.max_abs_analytic = std::max(group.max_abs_analytic, std::abs(a));
    }
    report.groups.push_back(group);
  }
  return report;
}

Model<double> random_check_model(std::uint64_t seed, const GradCheckSetup& setup) {
  ModelDims dims;
  dims.vocab = setup.vocab + 1;
  dims.embedding = setup.embedding;
  dims.hidden = setup.hidden;
  dims.attention = setup.hidden;
  dims.mlp = setup.hidden;
  dims.untied = setup.untied;
  SeededRng rng = SeededRng(seed).split(11);
  Model<double> m = Model<double>::random(dims, rng);
  m.embedding = init_uniform<double>(dims.vocab, dims.embedding, 0.5, rng);
  // Non-zero biases, and a wider output layer so predictions in a batch are
  // well spread; nearly equal predictions make the correlation loss
  // ill-conditioned for finite differences.
  m.for_each([&](const std::string& name, Matrix<double>& t) {
    if (name.substr(name.rfind('.') + 1).front() == 'b') {
      t = init_uniform<double>(t.rows(), 1, 0.1, rng);
    }
  });
  m.scorer.V = init_uniform<double>(m.scorer.V.rows(), m.scorer.V.cols(), 2.0, rng);
  return m;
}

std::vector<PairInput> random_check_batch(std::uint64_t seed,
                                          const GradCheckSetup& setup) {
  SeededRng rng = SeededRng(seed).split(12);
  std::vector<PairInput> batch(setup.batch);
  for (auto& in : batch) {
    const std::size_t n1 = 2 + rng.index(3);
    const std::size_t n2 = 2 + rng.index(3);
    for (std::size_t i = 0; i < n1; ++i) in.ids1.push_back(rng.index(setup.vocab + 1));
    for (std::size_t i = 0; i < n2; ++i) in.ids2.push_back(rng.index(setup.vocab + 1));
    for (auto& f : in.features) f = rng.uniform01();
    in.gold = rng.uniform(0.0, 5.0);
  }
  return batch;
}

GradCheckReport gradient_check_random(std::uint64_t seed, LossKind kind,
                                      const GradCheckSetup& setup,
                                      const GradCheckOptions& options) {
  const Model<double> model = random_check_model(seed, setup);
  const auto batch = random_check_batch(seed, setup);
  return gradient_check(model, batch, kind, options);
}

}  // namespace csim
