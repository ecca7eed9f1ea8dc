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

#ifndef CSIM_GRADCHECK_HPP_
#define CSIM_GRADCHECK_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "model.hpp"

namespace csim {

struct GradCheckOptions {
  double step = 1e-5;
  // Replace the loss by a constant; every analytic gradient must vanish.
  bool zero_cotangent = false;
  // Negate the analytic gradient of this tensor (harness self-test).
  std::string corrupt_tensor;
};

struct GradCheckGroup {
  std::string name;
  std::size_t size = 0;
  double max_rel_error = 0.0;
  double max_abs_analytic = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckGroup> groups;

  double max_rel_error() const;
  bool passed(double tolerance) const { return max_rel_error() < tolerance; }
};

inline constexpr double kGradCheckTolerance = 1e-4;

// Entries whose analytic and numeric gradients are both below this are
// compared on absolute error scaled by it.
inline constexpr double kGradCheckFloor = 1e-5;

// Central differences on every parameter of `model` against the analytic
// gradient of the batch loss. Sizes are limited to H, D <= 8, batch <= 6.
GradCheckReport gradient_check(const Model<double>& model,
                               std::span<const PairInput> batch, LossKind kind,
                               const GradCheckOptions& options = {});

struct GradCheckSetup {
  std::size_t hidden = 4;
  std::size_t embedding = 3;
  std::size_t batch = 5;
  std::size_t vocab = 8;  // excluding UNK
  bool untied = false;
};

// Random model and batch drawn from `seed`, then gradient_check.
GradCheckReport gradient_check_random(std::uint64_t seed, LossKind kind,
                                      const GradCheckSetup& setup = {},
                                      const GradCheckOptions& options = {});

Model<double> random_check_model(std::uint64_t seed, const GradCheckSetup& setup);
std::vector<PairInput> random_check_batch(std::uint64_t seed,
                                          const GradCheckSetup& setup);

}  // namespace csim

#endif  // CSIM_GRADCHECK_HPP_
