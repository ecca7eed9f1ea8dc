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

#include "model.hpp"

namespace csim {
namespace {

template <typename T>
Matrix<T> gather_rows(const Matrix<T>& table, const std::vector<std::size_t>& ids) {
  Matrix<T> out(ids.size(), table.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= table.rows()) {
      throw ShapeError("token id " + std::to_string(ids[i]) +
                       " outside embedding table " + table.shape());
    }
    const auto src = table.row(ids[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

template <typename T>
void scatter_rows(Matrix<T>& table, const std::vector<std::size_t>& ids,
                  const Matrix<T>& rows) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    axpy(T(1), rows.row(i), table.row(ids[i]));
  }
}

}  // namespace

template <typename T>
Model<T> Model<T>::random(const ModelDims& dims, SeededRng& rng) {
  if (dims.vocab == 0 || dims.embedding == 0 || dims.hidden == 0 ||
      dims.attention == 0 || dims.mlp == 0) {
    throw ConfigError("model dimensions must all be positive");
  }
  Model m;
  m.embedding = Matrix<T>(dims.vocab, dims.embedding);
  const std::size_t n_enc = dims.untied ? 2 : 1;
  for (std::size_t e = 0; e < n_enc; ++e) {
    m.encoders.push_back(EncoderParams<T>::random(dims.hidden, dims.embedding,
                                                  dims.attention, rng));
  }
  m.scorer = ScorerParams<T>::random(dims.scorer_input(), dims.mlp, rng);
  return m;
}

template <typename T>
Model<T> Model<T>::zeros_like(const Model& other) {
  Model m = other;
  m.for_each([](const std::string&, Matrix<T>& t) { t.fill(T(0)); });
  return m;
}

template <typename T>
ModelDims Model<T>::dims() const {
  ModelDims d;
  d.vocab = embedding.rows();
  d.embedding = embedding.cols();
  d.hidden = encoders.front().hidden();
  d.attention = encoders.front().att.W.rows();
  d.mlp = scorer.hidden();
  d.untied = encoders.size() == 2;
  return d;
}

template <typename T>
std::vector<std::pair<std::string, Matrix<T>*>> Model<T>::tensors() {
  std::vector<std::pair<std::string, Matrix<T>*>> out;
  for_each([&](const std::string& n, Matrix<T>& m) { out.emplace_back(n, &m); });
  return out;
}

template <typename T>
std::vector<std::pair<std::string, const Matrix<T>*>> Model<T>::tensors() const {
  std::vector<std::pair<std::string, const Matrix<T>*>> out;
  for_each([&](const std::string& n, const Matrix<T>& m) { out.emplace_back(n, &m); });
  return out;
}

template <typename T>
template <typename U>
Model<U> Model<T>::cast() const {
  Model<U> out;
  out.embedding = embedding.template cast<U>();
  for (const auto& e : encoders) {
    EncoderParams<U> c;
    auto src = e;
    std::vector<Matrix<U>> flat;
    src.for_each([&](const std::string&, const Matrix<T>& m) {
      flat.push_back(m.template cast<U>());
    });
    std::size_t k = 0;
    c.for_each([&](const std::string&, Matrix<U>& m) { m = std::move(flat[k++]); });
    out.encoders.push_back(std::move(c));
  }
  std::vector<Matrix<U>> flat;
  scorer.for_each([&](const char*, const Matrix<T>& m) { flat.push_back(m.template cast<U>()); });
  std::size_t k = 0;
  out.scorer.for_each([&](const char*, Matrix<U>& m) { m = std::move(flat[k++]); });
  return out;
}

template <typename T>
ScoreDistribution<T> forward_pair(const Model<T>& model, const PairInput& input,
                                  PairTape<T>* tape) {
  if (input.ids1.empty() || input.ids2.empty()) {
    throw ContractError("forward_pair: empty sentence");
  }
  const auto words1 = gather_rows(model.embedding, input.ids1);
  const auto words2 = gather_rows(model.embedding, input.ids2);
  const auto e1 = encode(model.encoder_for(0), words1, tape ? &tape->side1 : nullptr);
  const auto e2 = encode(model.encoder_for(1), words2, tape ? &tape->side2 : nullptr);
  std::array<T, kFeatureCount> m{};
  for (std::size_t k = 0; k < kFeatureCount; ++k) m[k] = static_cast<T>(input.features[k]);
  return score_pair(model.scorer, std::span<const T>(e1.u), std::span<const T>(e2.u),
                    std::span<const T>(m), tape ? &tape->scorer : nullptr);
}

template <typename T>
BatchForward<T> forward_batch(const Model<T>& model,
                              std::span<const PairInput> inputs) {
  BatchForward<T> out;
  out.tapes.resize(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto s = forward_pair(model, inputs[i], &out.tapes[i]);
    out.batch.p.push_back(s.p);
    out.batch.y.push_back(s.y);
    out.batch.gold.push_back(inputs[i].gold);
  }
  return out;
}

template <typename T>
void backward_batch(const Model<T>& model, std::span<const PairInput> inputs,
                    const BatchForward<T>& fwd, const LossGradient& cotangent,
                    Model<T>& grad) {
  if (fwd.tapes.size() != inputs.size() || cotangent.dp.size() != inputs.size() ||
      cotangent.dy.size() != inputs.size()) {
    throw ContractError("backward_batch: tapes, inputs and cotangent disagree");
  }
  const std::size_t state = model.encoders.front().state_width();
  std::vector<T> du1(state), du2(state);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& tape = fwd.tapes[i];
    ClassVector<T> dp{};
    for (std::size_t c = 0; c < kClasses; ++c) dp[c] = static_cast<T>(cotangent.dp[i][c]);
    scorer_backward(model.scorer, tape.scorer, dp, static_cast<T>(cotangent.dy[i]),
                    grad.scorer, std::span<T>(du1), std::span<T>(du2));
    const auto dw1 = encoder_backward(model.encoder_for(0), tape.side1,
                                      std::span<const T>(du1), grad.encoder_for(0));
    scatter_rows(grad.embedding, inputs[i].ids1, dw1);
    const auto dw2 = encoder_backward(model.encoder_for(1), tape.side2,
                                      std::span<const T>(du2), grad.encoder_for(1));
    scatter_rows(grad.embedding, inputs[i].ids2, dw2);
  }
}

template <typename T>
double loss_and_gradient(const Model<T>& model,
                         std::span<const PairInput> inputs, LossKind kind,
                         Model<T>* grad) {
  const auto fwd = forward_batch(model, inputs);
  const double loss = batch_loss(kind, fwd.batch);
  if (grad) {
    const bool reusable = grad->encoders.size() == model.encoders.size() &&
                          grad->embedding.same_shape(model.embedding) &&
                          grad->scorer.U.same_shape(model.scorer.U);
    if (reusable) {
      grad->for_each([](const std::string&, Matrix<T>& t) { t.fill(T(0)); });
    } else {
      *grad = Model<T>::zeros_like(model);
    }
    backward_batch(model, inputs, fwd, batch_loss_backward(kind, fwd.batch), *grad);
  }
  return loss;
}

#define CSIM_INSTANTIATE_MODEL(T)                                              \
  template struct Model<T>;                                                    \
  template ScoreDistribution<T> forward_pair(const Model<T>&, const PairInput&, \
                                             PairTape<T>*);                    \
  template BatchForward<T> forward_batch(const Model<T>&,                      \
                                         std::span<const PairInput>);          \
  template void backward_batch(const Model<T>&, std::span<const PairInput>,    \
                               const BatchForward<T>&, const LossGradient&,    \
                               Model<T>&);                                     \
  template double loss_and_gradient(const Model<T>&,                           \
                                    std::span<const PairInput>, LossKind,      \
                                    Model<T>*);

CSIM_INSTANTIATE_MODEL(float)
CSIM_INSTANTIATE_MODEL(double)

template Model<double> Model<float>::cast<double>() const;
template Model<float> Model<double>::cast<float>() const;

#undef CSIM_INSTANTIATE_MODEL

}  // namespace csim
