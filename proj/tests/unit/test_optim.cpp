// Copyright 2026 The GAMPS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include <gtest/gtest.h>

#include "gamps/optim.hpp"

namespace gamps {
namespace {

TEST(Adam, ZeroGradientKeepsParams) {
  AdamState st(3, AdamConfig{0.1, 0.9, 0.999, 1e-8});
  const Vector x{{1.0, -2.0, 3.0}};
  auto [next, st2] = adam_step(st, x, Vector::Zero(3), false);
  EXPECT_EQ(next, x);
  EXPECT_EQ(st2.t, 1);
}

TEST(Adam, FirstStepIsSignTimesAlpha) {
  AdamState st(3, AdamConfig{0.05, 0.9, 0.999, 1e-8});
  const Vector g{{2.0, -0.3, 1e-3}};
  const auto [desc, s1] = adam_step(st, Vector::Zero(3), g, false);
  const auto [asc, s2] = adam_step(st, Vector::Zero(3), g, true);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(desc(i), -0.05 * (g(i) > 0 ? 1.0 : -1.0), 1e-6);
    EXPECT_DOUBLE_EQ(asc(i), -desc(i));
  }
}

TEST(Adam, MatchesHandRolledRecursion) {
  // Minimize 0.5 (x - c)ᵀ D (x - c) for ten steps.
  const Vector c{{1.0, -2.0, 0.5}};
  const Vector d{{1.0, 10.0, 0.1}};
  const double alpha = 0.1;
  const double b1 = 0.9;
  const double b2 = 0.999;
  const double eps = 1e-8;
  Vector x = Vector::Zero(3);
  AdamState st(3, AdamConfig{alpha, b1, b2, eps});
  double ref[3] = {0.0, 0.0, 0.0};
  double m[3] = {0.0, 0.0, 0.0};
  double v[3] = {0.0, 0.0, 0.0};
  for (int t = 1; t <= 10; ++t) {
    const Vector g = d.cwiseProduct(x - c);
    std::tie(x, st) = adam_step(st, x, g, false);
    for (int i = 0; i < 3; ++i) {
      const double gi = d(i) * (ref[i] - c(i));
      m[i] = b1 * m[i] + (1 - b1) * gi;
      v[i] = b2 * v[i] + (1 - b2) * gi * gi;
      const double mh = m[i] / (1 - std::pow(b1, t));
      const double vh = v[i] / (1 - std::pow(b2, t));
      ref[i] -= alpha * mh / (std::sqrt(vh) + eps);
    }
    for (int i = 0; i < 3; ++i) {
      ASSERT_NEAR(x(i), ref[i], 1e-12) << "step " << t;
    }
  }
}

TEST(Adam, StepMagnitudeBounded) {
  AdamState st(2, AdamConfig{0.2, 0.9, 0.999, 1e-8});
  Vector x = Vector::Zero(2);
  double u = 0.3;
  for (int t = 0; t < 200; ++t) {
    u = std::fmod(u * 7.31 + 0.17, 1.0);
    const Vector g{{std::pow(10.0, 6.0 * u - 3.0) * (u < 0.5 ? -1.0 : 1.0), std::sin(t * 1.7) * 50.0}};
    const Vector prev = x;
    std::tie(x, st) = adam_step(st, x, g, true);
    EXPECT_LE((x - prev).cwiseAbs().maxCoeff(), 2.0 * 0.2);
  }
}

TEST(Adam, Deterministic) {
  AdamState st(2, AdamConfig{0.1, 0.9, 0.999, 1e-8});
  const Vector x{{0.3, -0.1}};
  const Vector g{{1.7, -0.2}};
  const auto a = adam_step(st, x, g, true);
  const auto b = adam_step(st, x, g, true);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second.m, b.second.m);
  EXPECT_EQ(a.second.v, b.second.v);
}

TEST(Adam, Errors) {
  AdamState st(2, AdamConfig{});
  EXPECT_THROW(adam_step(st, Vector::Zero(2), Vector::Zero(3), true), ValidationError);
  EXPECT_THROW(adam_step(st, Vector::Zero(2), Vector{{NAN, 0.0}}, true), RuntimeError);
}

TEST(Schedule, RepeatsLastEntry) {
  const StepSchedule s{{0.3, 0.2}};
  EXPECT_EQ(s.at(0), 0.3);
  EXPECT_EQ(s.at(5), 0.2);
  EXPECT_THROW(StepSchedule::constant(0.0), ValidationError);
}

TEST(Presets, Values) {
  EXPECT_EQ(adam_preset("gridworld-policy").alpha, 0.2);
  EXPECT_EQ(adam_preset("gridworld-model").alpha, 0.01);
  EXPECT_EQ(adam_preset("minigolf-policy").beta1, 0.0);
  EXPECT_EQ(adam_preset("minigolf-model").alpha, 0.02);
  EXPECT_THROW(adam_preset("swimmer"), ValidationError);
}

}  // namespace
}  // namespace gamps
