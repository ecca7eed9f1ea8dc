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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "errors.hpp"
#include "numkit.hpp"

namespace csim {
namespace {

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  SeededRng rng(3);
  const auto m = init_uniform<double>(3, 5, 1.0, rng);
  EXPECT_EQ(matmul(Matrix<double>::identity(3), m), m);
}

TEST(Matmul, HandExpandedProduct) {
  const Matrix<double> a(2, 2, {1, 2, 3, 4});
  const Matrix<double> b(2, 1, {0, 1});
  const auto c = matmul(a, b);
  ASSERT_EQ(c.rows(), 2u);
  ASSERT_EQ(c.cols(), 1u);
  EXPECT_EQ(c(0, 0), 2.0);
  EXPECT_EQ(c(1, 0), 4.0);
}

TEST(Matmul, MismatchNamesBothShapes) {
  const Matrix<double> a(2, 3), b(2, 3);
  try {
    matmul(a, b);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("2x3"), std::string::npos) << what;
    EXPECT_NE(what.find("2x3"), what.rfind("2x3")) << "both shapes in: " << what;
  }
}

TEST(Matmul, Associative) {
  SeededRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.index(6), k = 1 + rng.index(6), m = 1 + rng.index(6),
                      p = 1 + rng.index(6);
    const auto a = init_uniform<double>(n, k, 2.0, rng);
    const auto b = init_uniform<double>(k, m, 2.0, rng);
    const auto c = init_uniform<double>(m, p, 2.0, rng);
    const auto left = matmul(matmul(a, b), c);
    const auto right = matmul(a, matmul(b, c));
    for (std::size_t i = 0; i < left.size(); ++i) {
      EXPECT_NEAR(left[i], right[i], 1e-5 * std::max(1.0, std::abs(left[i])));
    }
  }
}

TEST(Softmax, ZerosGiveUniform) {
  const auto p = softmax(std::vector<double>(6, 0.0));
  for (double v : p) EXPECT_NEAR(v, 1.0 / 6.0, 1e-15);
}

TEST(Softmax, ShiftInvariant) {
  const std::vector<double> z{0.3, -1.2, 2.0, 0.0};
  auto shifted = z;
  for (auto& v : shifted) v += 123.25;
  const auto a = softmax(z), b = softmax(shifted);
  for (std::size_t i = 0; i < z.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(Softmax, LogsGiveProportions) {
  const auto p = softmax(std::vector<double>{std::log(1.0), std::log(2.0), std::log(3.0)});
  EXPECT_NEAR(p[0], 1.0 / 6.0, 1e-12);
  EXPECT_NEAR(p[1], 2.0 / 6.0, 1e-12);
  EXPECT_NEAR(p[2], 3.0 / 6.0, 1e-12);
}

TEST(Softmax, SimplexForLargeMagnitudes) {
  SeededRng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<float> z(1 + rng.index(10));
    for (auto& v : z) v = static_cast<float>(rng.uniform(-1e4, 1e4));
    const auto p = softmax(z);
    float sum = 0.0f;
    for (float v : p) {
      ASSERT_TRUE(std::isfinite(v));
      ASSERT_GE(v, 0.0f);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0f, 1e-6f);
  }
}

TEST(Activations, Symmetries) {
  for (double x = -30.0; x <= 30.0; x += 0.37) {
    EXPECT_EQ(std::tanh(-x), -std::tanh(x));
    EXPECT_NEAR(sigmoid(x) + sigmoid(-x), 1.0, 1e-12);
  }
  EXPECT_EQ(sigmoid(-1000.0), 0.0);
  EXPECT_EQ(sigmoid(1000.0), 1.0);
}

TEST(Adam, ZeroGradientLeavesParameter) {
  Matrix<double> p(2, 2, {1, -2, 3, -4});
  const auto before = p;
  AdamState<double> s(p);
  adam_step(p, Matrix<double>(2, 2), s, 0.1);
  EXPECT_EQ(p, before);
  EXPECT_EQ(s.step, 1);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Matrix<double> p(1, 1, {0.5});
  AdamState<double> s(p);
  const double g = 0.3, lr = 1e-3;
  adam_step(p, Matrix<double>(1, 1, {g}), s, lr);
  EXPECT_NEAR(p[0], 0.5 - lr * g / (g + 1e-8), 1e-15);
  EXPECT_NEAR(p[0], 0.5 - lr, 1e-10);
}

TEST(Adam, TwoStepsMatchHandUnroll) {
  const double g = -0.7, lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  Matrix<double> p(1, 1, {2.0});
  AdamState<double> s(p);
  const Matrix<double> grad(1, 1, {g});
  adam_step(p, grad, s, lr);
  adam_step(p, grad, s, lr);

  const double m1 = (1 - b1) * g, v1 = (1 - b2) * g * g;
  const double m2 = b1 * m1 + (1 - b1) * g, v2 = b2 * v1 + (1 - b2) * g * g;
  EXPECT_NEAR(s.first_moment[0], (1 - b1 * b1) * g, 1e-15);
  EXPECT_NEAR(s.second_moment[0], (1 - b2 * b2) * g * g, 1e-15);
  EXPECT_NEAR(s.second_moment[0], v2, 1e-15);
  const double step1 = lr * (m1 / (1 - b1)) / (std::sqrt(v1 / (1 - b2)) + eps);
  const double step2 = lr * (m2 / (1 - b1 * b1)) / (std::sqrt(v2 / (1 - b2 * b2)) + eps);
  EXPECT_NEAR(p[0], 2.0 - step1 - step2, 1e-14);
  EXPECT_EQ(s.step, 2);
}

TEST(Adam, ZeroLearningRateIsNoOp) {
  SeededRng rng(2);
  auto p = init_uniform<float>(4, 3, 1.0, rng);
  const auto before = p;
  AdamState<float> s(p);
  for (int i = 0; i < 3; ++i) adam_step(p, init_uniform<float>(4, 3, 1.0, rng), s, 0.0);
  EXPECT_EQ(p, before);
}

TEST(Adam, ShapeMismatchThrows) {
  Matrix<float> p(2, 2);
  AdamState<float> s(p);
  EXPECT_THROW(adam_step(p, Matrix<float>(2, 3), s, 0.1), ShapeError);
}

TEST(InitUniform, SameSeedBitIdentical) {
  SeededRng a(7), b(7);
  EXPECT_EQ(init_uniform<float>(20, 30, 0.05, a), init_uniform<float>(20, 30, 0.05, b));
}

TEST(InitUniform, RangeAndMean) {
  SeededRng rng(7);
  const auto m = init_uniform<double>(1000, 100, 0.05, rng);
  double sum = 0.0;
  for (double v : m.values()) {
    ASSERT_GE(v, -0.05);
    ASSERT_LE(v, 0.05);
    sum += v;
  }
  EXPECT_NEAR(sum / static_cast<double>(m.size()), 0.0, 0.005);
}

TEST(InitUniform, NonPositiveScaleRejected) {
  SeededRng rng(1);
  EXPECT_THROW(init_uniform<float>(2, 2, 0.0, rng), ConfigError);
}

TEST(SeededRng, SplitStreamsAreIndependentAndReproducible) {
  SeededRng a(42), b(42);
  auto a1 = a.split(1), b1 = b.split(1), a2 = a.split(2);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a1.next_u64(), b1.next_u64());
  auto c1 = SeededRng(42).split(1);
  EXPECT_NE(c1.next_u64(), a2.next_u64());
}

TEST(SeededRng, IndexStaysInRange) {
  SeededRng rng(9);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 7000; ++i) ++seen.at(rng.index(7));
  for (int c : seen) EXPECT_GT(c, 800);
}

}  // namespace
}  // namespace csim
