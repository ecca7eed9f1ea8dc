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

#ifndef CSIM_ENCODER_HPP_
#define CSIM_ENCODER_HPP_

// Bidirectional GRU over word vectors followed by additive attention pooling,
// with hand-written reverse mode.
//
// GRU step (reset applied inside the candidate):
//   z  = sigmoid(Wz w + Uz h + bz)
//   r  = sigmoid(Wr w + Ur h + br)
//   c  = tanh(Wh w + Uh (r * h) + bh)
//   h' = (1 - z) * h + z * c
//
// Attention over states x_1..x_n (each forward ++ backward, width 2H):
//   l_j = r^T tanh(W x_j),  a = softmax(l),  u = sum_j a_j x_j

#include <cstddef>
#include <string>
#include <vector>

#include "numkit.hpp"

namespace csim {

template <typename T>
struct GruParams {
  Matrix<T> Wz, Uz, bz;
  Matrix<T> Wr, Ur, br;
  Matrix<T> Wh, Uh, bh;

  static GruParams zeros(std::size_t hidden, std::size_t input);
  // Matrices uniform in +-1/sqrt(fan_in), biases zero.
  static GruParams random(std::size_t hidden, std::size_t input,
                          SeededRng& rng);

  std::size_t hidden() const noexcept { return Uz.rows(); }
  std::size_t input() const noexcept { return Wz.cols(); }

  template <typename F>
  void for_each(F&& f) {
    f("Wz", Wz); f("Uz", Uz); f("bz", bz);
    f("Wr", Wr); f("Ur", Ur); f("br", br);
    f("Wh", Wh); f("Uh", Uh); f("bh", bh);
  }
  template <typename F>
  void for_each(F&& f) const {
    f("Wz", Wz); f("Uz", Uz); f("bz", bz);
    f("Wr", Wr); f("Ur", Ur); f("br", br);
    f("Wh", Wh); f("Uh", Uh); f("bh", bh);
  }
};

template <typename T>
struct AttentionParams {
  Matrix<T> W;  // width x 2H
  Matrix<T> r;  // width x 1

  static AttentionParams zeros(std::size_t width, std::size_t state);
  static AttentionParams random(std::size_t width, std::size_t state,
                                SeededRng& rng);

  template <typename F>
  void for_each(F&& f) {
    f("W", W); f("r", r);
  }
  template <typename F>
  void for_each(F&& f) const {
    f("W", W); f("r", r);
  }
};

// One sentence encoder: both GRU directions plus the attention scorer.
template <typename T>
struct EncoderParams {
  GruParams<T> fwd;
  GruParams<T> bwd;
  AttentionParams<T> att;

  static EncoderParams zeros(std::size_t hidden, std::size_t input,
                             std::size_t width);
  static EncoderParams random(std::size_t hidden, std::size_t input,
                              std::size_t width, SeededRng& rng);

  std::size_t hidden() const noexcept { return fwd.hidden(); }
  std::size_t input() const noexcept { return fwd.input(); }
  std::size_t state_width() const noexcept { return 2 * hidden(); }

  template <typename F>
  void for_each(F&& f) {
    fwd.for_each([&](const char* n, auto& m) { f(std::string("fwd.") + n, m); });
    bwd.for_each([&](const char* n, auto& m) { f(std::string("bwd.") + n, m); });
    att.for_each([&](const char* n, auto& m) { f(std::string("att.") + n, m); });
  }
  template <typename F>
  void for_each(F&& f) const {
    fwd.for_each([&](const char* n, const auto& m) { f(std::string("fwd.") + n, m); });
    bwd.for_each([&](const char* n, const auto& m) { f(std::string("bwd.") + n, m); });
    att.for_each([&](const char* n, const auto& m) { f(std::string("att.") + n, m); });
  }
};

template <typename T>
struct GruStepCache {
  std::vector<T> h_prev;
  std::vector<T> z;
  std::vector<T> r;
  std::vector<T> c;
};

template <typename T>
std::vector<T> gru_step(const GruParams<T>& params, std::span<const T> h_prev,
                        std::span<const T> word, GruStepCache<T>* cache = nullptr);

// Accumulates parameter gradients into `grad` and returns dL/dh_prev; the
// input-word gradient is added to `dword`.
template <typename T>
std::vector<T> gru_step_backward(const GruParams<T>& params,
                                 const GruStepCache<T>& cache,
                                 std::span<const T> word,
                                 std::span<const T> dh, GruParams<T>& grad,
                                 std::span<T> dword);

template <typename T>
struct SentenceEmbedding {
  std::vector<T> u;    // 2H
  Matrix<T> states;    // n x 2H, row j = [forward_j ; backward_j]
  std::vector<T> weights;
};

template <typename T>
struct EncoderTape {
  const EncoderParams<T>* params = nullptr;
  Matrix<T> words;  // n x D inputs as seen by the forward pass
  std::vector<GruStepCache<T>> fwd_steps;  // indexed by token position
  std::vector<GruStepCache<T>> bwd_steps;  // indexed by token position
  Matrix<T> att_hidden;                    // n x width, tanh(W x_j)
  Matrix<T> states;
  std::vector<T> weights;

  std::size_t length() const noexcept { return words.rows(); }
};

// Forward over words (n x D); states rows are [forward_i ; backward_i].
template <typename T>
Matrix<T> bigru_encode(const GruParams<T>& fwd, const GruParams<T>& bwd,
                       const Matrix<T>& words, EncoderTape<T>* tape = nullptr);

template <typename T>
SentenceEmbedding<T> attend(const AttentionParams<T>& att,
                            const Matrix<T>& states,
                            Matrix<T>* att_hidden = nullptr);

template <typename T>
SentenceEmbedding<T> encode(const EncoderParams<T>& params,
                            const Matrix<T>& words,
                            EncoderTape<T>* tape = nullptr);

// Reverse pass for one encode() call. Parameter gradients are accumulated
// into `grad`; the returned matrix holds dL/dwords (n x D).
template <typename T>
Matrix<T> encoder_backward(const EncoderParams<T>& params,
                           const EncoderTape<T>& tape, std::span<const T> du,
                           EncoderParams<T>& grad);

}  // namespace csim

#endif  // CSIM_ENCODER_HPP_
