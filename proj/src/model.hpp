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

#ifndef CSIM_MODEL_HPP_
#define CSIM_MODEL_HPP_

// Full pair model: embedding lookup, sentence encoder(s), scoring head.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "encoder.hpp"
#include "features.hpp"
#include "objective.hpp"

namespace csim {

struct ModelDims {
  std::size_t vocab = 0;
  std::size_t embedding = 300;  // D
  std::size_t hidden = 200;     // H, GRU state per direction
  std::size_t attention = 200;  // A, attention projection width
  std::size_t mlp = 200;        // scorer hidden width
  bool untied = false;          // separate encoder per sentence

  std::size_t state_width() const noexcept { return 2 * hidden; }
  std::size_t scorer_input() const noexcept {
    return 2 * state_width() + kFeatureCount;
  }
};

template <typename T>
struct Model {
  Matrix<T> embedding;  // vocab x D, row 0 is UNK
  std::vector<EncoderParams<T>> encoders;  // one (tied) or two
  ScorerParams<T> scorer;

  // Encoder and scorer weights drawn from `rng`; the embedding is zero and is
  // expected to be filled by the caller.
  static Model random(const ModelDims& dims, SeededRng& rng);
  static Model zeros_like(const Model& other);

  ModelDims dims() const;
  const EncoderParams<T>& encoder_for(std::size_t side) const {
    return encoders[encoders.size() == 1 ? 0 : side];
  }
  EncoderParams<T>& encoder_for(std::size_t side) {
    return encoders[encoders.size() == 1 ? 0 : side];
  }

  // Visits every trainable tensor with a stable dotted name.
  template <typename F>
  void for_each(F&& f) {
    f(std::string("embedding"), embedding);
    for (std::size_t e = 0; e < encoders.size(); ++e) {
      const std::string prefix = encoder_prefix(e);
      encoders[e].for_each([&](const std::string& n, auto& m) { f(prefix + n, m); });
    }
    scorer.for_each([&](const char* n, auto& m) { f(std::string("scorer.") + n, m); });
  }
  template <typename F>
  void for_each(F&& f) const {
    f(std::string("embedding"), embedding);
    for (std::size_t e = 0; e < encoders.size(); ++e) {
      const std::string prefix = encoder_prefix(e);
      encoders[e].for_each([&](const std::string& n, const auto& m) { f(prefix + n, m); });
    }
    scorer.for_each([&](const char* n, const auto& m) { f(std::string("scorer.") + n, m); });
  }

  std::vector<std::pair<std::string, Matrix<T>*>> tensors();
  std::vector<std::pair<std::string, const Matrix<T>*>> tensors() const;

  template <typename U>
  Model<U> cast() const;

 private:
  std::string encoder_prefix(std::size_t e) const {
    return encoders.size() == 1 ? "encoder." : "encoder" + std::to_string(e) + ".";
  }
};

// A pair ready for the network: vocabulary ids plus the constant features.
struct PairInput {
  std::vector<std::size_t> ids1;
  std::vector<std::size_t> ids2;
  FeatureVector features{};
  double gold = 0.0;
};

template <typename T>
struct PairTape {
  EncoderTape<T> side1;
  EncoderTape<T> side2;
  ScorerTape<T> scorer;
};

template <typename T>
ScoreDistribution<T> forward_pair(const Model<T>& model, const PairInput& input,
                                  PairTape<T>* tape = nullptr);

template <typename T>
struct BatchForward {
  std::vector<PairTape<T>> tapes;
  Batch<T> batch;
};

template <typename T>
BatchForward<T> forward_batch(const Model<T>& model,
                              std::span<const PairInput> inputs);

// Accumulates parameter gradients for a loss cotangent into `grad`.
template <typename T>
void backward_batch(const Model<T>& model, std::span<const PairInput> inputs,
                    const BatchForward<T>& fwd, const LossGradient& cotangent,
                    Model<T>& grad);

// Loss of the batch; when `grad` is given it is overwritten with the gradient
// (reusing its storage when the shapes already match).
template <typename T>
double loss_and_gradient(const Model<T>& model,
                         std::span<const PairInput> inputs, LossKind kind,
                         Model<T>* grad = nullptr);

}  // namespace csim

#endif  // CSIM_MODEL_HPP_
