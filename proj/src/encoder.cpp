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

#include "encoder.hpp"

#include <cmath>

namespace csim {
namespace {

template <typename T>
Matrix<T> fan_in_uniform(std::size_t rows, std::size_t cols, SeededRng& rng) {
  return init_uniform<T>(rows, cols, 1.0 / std::sqrt(static_cast<double>(cols)),
                         rng);
}

template <typename T>
std::span<const T> col_span(const Matrix<T>& m) {
  return m.values();
}

}  // namespace

template <typename T>
GruParams<T> GruParams<T>::zeros(std::size_t hidden, std::size_t input) {
  GruParams p;
  for (auto* w : {&p.Wz, &p.Wr, &p.Wh}) *w = Matrix<T>(hidden, input);
  for (auto* u : {&p.Uz, &p.Ur, &p.Uh}) *u = Matrix<T>(hidden, hidden);
  for (auto* b : {&p.bz, &p.br, &p.bh}) *b = Matrix<T>(hidden, 1);
  return p;
}

template <typename T>
GruParams<T> GruParams<T>::random(std::size_t hidden, std::size_t input,
                                  SeededRng& rng) {
  GruParams p = zeros(hidden, input);
  p.Wz = fan_in_uniform<T>(hidden, input, rng);
  p.Uz = fan_in_uniform<T>(hidden, hidden, rng);
  p.Wr = fan_in_uniform<T>(hidden, input, rng);
  p.Ur = fan_in_uniform<T>(hidden, hidden, rng);
  p.Wh = fan_in_uniform<T>(hidden, input, rng);
  p.Uh = fan_in_uniform<T>(hidden, hidden, rng);
  return p;
}

template <typename T>
AttentionParams<T> AttentionParams<T>::zeros(std::size_t width,
                                             std::size_t state) {
  return {Matrix<T>(width, state), Matrix<T>(width, 1)};
}

template <typename T>
AttentionParams<T> AttentionParams<T>::random(std::size_t width,
                                              std::size_t state,
                                              SeededRng& rng) {
  AttentionParams p;
  p.W = fan_in_uniform<T>(width, state, rng);
  p.r = init_uniform<T>(width, 1, 1.0 / std::sqrt(static_cast<double>(width)),
                        rng);
  return p;
}

template <typename T>
EncoderParams<T> EncoderParams<T>::zeros(std::size_t hidden,
                                         std::size_t input,
                                         std::size_t width) {
  return {GruParams<T>::zeros(hidden, input), GruParams<T>::zeros(hidden, input),
          AttentionParams<T>::zeros(width, 2 * hidden)};
}

template <typename T>
EncoderParams<T> EncoderParams<T>::random(std::size_t hidden,
                                          std::size_t input, std::size_t width,
                                          SeededRng& rng) {
  EncoderParams p;
  p.fwd = GruParams<T>::random(hidden, input, rng);
  p.bwd = GruParams<T>::random(hidden, input, rng);
  p.att = AttentionParams<T>::random(width, 2 * hidden, rng);
  return p;
}

template <typename T>
std::vector<T> gru_step(const GruParams<T>& p, std::span<const T> h_prev,
                        std::span<const T> word, GruStepCache<T>* cache) {
  const std::size_t H = p.hidden();
  if (h_prev.size() != H || word.size() != p.input()) {
    throw ShapeError("gru_step: expected h of length " + std::to_string(H) +
                     " and word of length " + std::to_string(p.input()) +
                     ", got " + std::to_string(h_prev.size()) + " and " +
                     std::to_string(word.size()));
  }
  std::vector<T> z(p.bz.values().begin(), p.bz.values().end());
  std::vector<T> r(p.br.values().begin(), p.br.values().end());
  std::vector<T> c(p.bh.values().begin(), p.bh.values().end());
  gemv_acc(p.Wz, word, std::span<T>(z));
  gemv_acc(p.Uz, h_prev, std::span<T>(z));
  gemv_acc(p.Wr, word, std::span<T>(r));
  gemv_acc(p.Ur, h_prev, std::span<T>(r));
  for (std::size_t i = 0; i < H; ++i) {
    z[i] = sigmoid(z[i]);
    r[i] = sigmoid(r[i]);
  }
  std::vector<T> gated(H);
  for (std::size_t i = 0; i < H; ++i) gated[i] = r[i] * h_prev[i];
  gemv_acc(p.Wh, word, std::span<T>(c));
  gemv_acc(p.Uh, std::span<const T>(gated), std::span<T>(c));
  std::vector<T> h(H);
  for (std::size_t i = 0; i < H; ++i) {
    c[i] = std::tanh(c[i]);
    h[i] = (T(1) - z[i]) * h_prev[i] + z[i] * c[i];
  }
  if (cache) {
    cache->h_prev.assign(h_prev.begin(), h_prev.end());
    cache->z = std::move(z);
    cache->r = std::move(r);
    cache->c = std::move(c);
  }
  return h;
}

template <typename T>
std::vector<T> gru_step_backward(const GruParams<T>& p,
                                 const GruStepCache<T>& cache,
                                 std::span<const T> word,
                                 std::span<const T> dh, GruParams<T>& g,
                                 std::span<T> dword) {
  const std::size_t H = p.hidden();
  const auto& h = cache.h_prev;
  std::vector<T> dh_prev(H), dz_pre(H), dr_pre(H), dc_pre(H), gated(H);
  for (std::size_t i = 0; i < H; ++i) {
    const T z = cache.z[i];
    const T c = cache.c[i];
    dh_prev[i] = dh[i] * (T(1) - z);
    dz_pre[i] = dh[i] * (c - h[i]) * z * (T(1) - z);
    dc_pre[i] = dh[i] * z * (T(1) - c * c);
    gated[i] = cache.r[i] * h[i];
  }

  // Candidate: c = tanh(Wh w + Uh (r*h) + bh)
  outer_acc(g.Wh, std::span<const T>(dc_pre), word);
  outer_acc(g.Uh, std::span<const T>(dc_pre), std::span<const T>(gated));
  axpy(T(1), std::span<const T>(dc_pre), g.bh.values());
  gemv_t_acc(p.Wh, std::span<const T>(dc_pre), dword);
  std::vector<T> dgated(H);
  gemv_t_acc(p.Uh, std::span<const T>(dc_pre), std::span<T>(dgated));
  for (std::size_t i = 0; i < H; ++i) {
    const T r = cache.r[i];
    dh_prev[i] += dgated[i] * r;
    dr_pre[i] = dgated[i] * h[i] * r * (T(1) - r);
  }

  outer_acc(g.Wr, std::span<const T>(dr_pre), word);
  outer_acc(g.Ur, std::span<const T>(dr_pre), std::span<const T>(h));
  axpy(T(1), std::span<const T>(dr_pre), g.br.values());
  gemv_t_acc(p.Wr, std::span<const T>(dr_pre), dword);
  gemv_t_acc(p.Ur, std::span<const T>(dr_pre), std::span<T>(dh_prev));

  outer_acc(g.Wz, std::span<const T>(dz_pre), word);
  outer_acc(g.Uz, std::span<const T>(dz_pre), std::span<const T>(h));
  axpy(T(1), std::span<const T>(dz_pre), g.bz.values());
  gemv_t_acc(p.Wz, std::span<const T>(dz_pre), dword);
  gemv_t_acc(p.Uz, std::span<const T>(dz_pre), std::span<T>(dh_prev));
  return dh_prev;
}

template <typename T>
Matrix<T> bigru_encode(const GruParams<T>& fwd, const GruParams<T>& bwd,
                       const Matrix<T>& words, EncoderTape<T>* tape) {
  const std::size_t n = words.rows();
  if (n == 0) throw ShapeError("bigru_encode: empty sequence");
  if (fwd.hidden() != bwd.hidden() || fwd.input() != bwd.input()) {
    throw ShapeError("bigru_encode: direction shapes differ");
  }
  const std::size_t H = fwd.hidden();
  if (words.cols() != fwd.input()) {
    throw ShapeError("bigru_encode: words " + words.shape() +
                     " for input dimension " + std::to_string(fwd.input()));
  }
  Matrix<T> states(n, 2 * H);
  if (tape) {
    tape->fwd_steps.assign(n, {});
    tape->bwd_steps.assign(n, {});
  }
  std::vector<T> h(H, T(0));
  for (std::size_t i = 0; i < n; ++i) {
    h = gru_step(fwd, std::span<const T>(h), words.row(i),
                 tape ? &tape->fwd_steps[i] : nullptr);
    std::copy(h.begin(), h.end(), states.row(i).begin());
  }
  std::fill(h.begin(), h.end(), T(0));
  for (std::size_t k = n; k-- > 0;) {
    h = gru_step(bwd, std::span<const T>(h), words.row(k),
                 tape ? &tape->bwd_steps[k] : nullptr);
    std::copy(h.begin(), h.end(), states.row(k).begin() + H);
  }
  return states;
}

template <typename T>
SentenceEmbedding<T> attend(const AttentionParams<T>& att,
                            const Matrix<T>& states, Matrix<T>* att_hidden) {
  const std::size_t n = states.rows();
  if (n == 0) throw ShapeError("attend: no states");
  if (att.W.cols() != states.cols() || att.r.rows() != att.W.rows()) {
    throw ShapeError("attend: W " + att.W.shape() + ", r " + att.r.shape() +
                     ", states " + states.shape());
  }
  const std::size_t A = att.W.rows();
  Matrix<T> hidden(n, A);
  std::vector<T> logits(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto s = hidden.row(j);
    gemv_acc(att.W, states.row(j), s);
    for (auto& v : s) v = std::tanh(v);
    logits[j] = dot(col_span(att.r), std::span<const T>(s));
  }
  SentenceEmbedding<T> out;
  out.weights = softmax(logits);
  out.u.assign(states.cols(), T(0));
  for (std::size_t j = 0; j < n; ++j) {
    axpy(out.weights[j], states.row(j), std::span<T>(out.u));
  }
  out.states = states;
  if (att_hidden) *att_hidden = std::move(hidden);
  return out;
}

template <typename T>
SentenceEmbedding<T> encode(const EncoderParams<T>& params,
                            const Matrix<T>& words, EncoderTape<T>* tape) {
  Matrix<T> states = bigru_encode(params.fwd, params.bwd, words, tape);
  SentenceEmbedding<T> emb =
      attend(params.att, states, tape ? &tape->att_hidden : nullptr);
  if (tape) {
    tape->params = &params;
    tape->words = words;
    tape->states = emb.states;
    tape->weights = emb.weights;
  }
  return emb;
}

template <typename T>
Matrix<T> encoder_backward(const EncoderParams<T>& params,
                           const EncoderTape<T>& tape, std::span<const T> du,
                           EncoderParams<T>& grad) {
  const std::size_t n = tape.length();
  const std::size_t H = params.hidden();
  if (tape.params != &params || n == 0 || tape.fwd_steps.size() != n ||
      tape.bwd_steps.size() != n || tape.states.rows() != n ||
      tape.states.cols() != 2 * H || tape.words.cols() != params.input()) {
    throw ContractError("encoder_backward: tape does not match parameters");
  }
  if (du.size() != 2 * H) {
    throw ShapeError("encoder_backward: du has length " +
                     std::to_string(du.size()) + ", expected " +
                     std::to_string(2 * H));
  }

  // Attention pooling.
  Matrix<T> dstates(n, 2 * H);
  std::vector<T> dweight(n);
  T weighted = T(0);
  for (std::size_t j = 0; j < n; ++j) {
    axpy(tape.weights[j], du, dstates.row(j));
    dweight[j] = dot(du, tape.states.row(j));
    weighted += tape.weights[j] * dweight[j];
  }
  const std::size_t A = params.att.W.rows();
  std::vector<T> dpre(A);
  for (std::size_t j = 0; j < n; ++j) {
    const T dlogit = tape.weights[j] * (dweight[j] - weighted);
    if (dlogit == T(0)) continue;
    const auto s = tape.att_hidden.row(j);
    axpy(dlogit, s, grad.att.r.values());
    for (std::size_t k = 0; k < A; ++k) {
      dpre[k] = dlogit * params.att.r[k] * (T(1) - s[k] * s[k]);
    }
    outer_acc(grad.att.W, std::span<const T>(dpre), tape.states.row(j));
    gemv_t_acc(params.att.W, std::span<const T>(dpre), dstates.row(j));
  }

  // Both recurrent chains.
  Matrix<T> dwords(n, params.input());
  std::vector<T> dh(H, T(0));
  for (std::size_t i = n; i-- > 0;) {
    const auto ds = dstates.row(i);
    for (std::size_t k = 0; k < H; ++k) dh[k] += ds[k];
    dh = gru_step_backward(params.fwd, tape.fwd_steps[i], tape.words.row(i),
                           std::span<const T>(dh), grad.fwd, dwords.row(i));
  }
  std::fill(dh.begin(), dh.end(), T(0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ds = dstates.row(i);
    for (std::size_t k = 0; k < H; ++k) dh[k] += ds[H + k];
    dh = gru_step_backward(params.bwd, tape.bwd_steps[i], tape.words.row(i),
                           std::span<const T>(dh), grad.bwd, dwords.row(i));
  }
  return dwords;
}

#define CSIM_INSTANTIATE_ENCODER(T)                                          \
  template struct GruParams<T>;                                              \
  template struct AttentionParams<T>;                                        \
  template struct EncoderParams<T>;                                          \
  template std::vector<T> gru_step(const GruParams<T>&, std::span<const T>,  \
                                   std::span<const T>, GruStepCache<T>*);    \
  template std::vector<T> gru_step_backward(                                 \
      const GruParams<T>&, const GruStepCache<T>&, std::span<const T>,       \
      std::span<const T>, GruParams<T>&, std::span<T>);                      \
  template Matrix<T> bigru_encode(const GruParams<T>&, const GruParams<T>&,  \
                                  const Matrix<T>&, EncoderTape<T>*);        \
  template SentenceEmbedding<T> attend(const AttentionParams<T>&,            \
                                       const Matrix<T>&, Matrix<T>*);        \
  template SentenceEmbedding<T> encode(const EncoderParams<T>&,              \
                                       const Matrix<T>&, EncoderTape<T>*);   \
  template Matrix<T> encoder_backward(const EncoderParams<T>&,               \
                                      const EncoderTape<T>&,                 \
                                      std::span<const T>, EncoderParams<T>&);

CSIM_INSTANTIATE_ENCODER(float)
CSIM_INSTANTIATE_ENCODER(double)

#undef CSIM_INSTANTIATE_ENCODER

}  // namespace csim
