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
#include <vector>

#include <gtest/gtest.h>

#include "gamps/envs/gridworld.hpp"
#include "gamps/envs/minigolf.hpp"
#include "gamps/policies.hpp"

namespace gamps {
namespace {

TEST(Gridworld, UpperAreaMovesDeterministically) {
  const TwoAreasGridworld env;
  Rng rng = derive_rng(1, 0);
  EXPECT_TRUE(env.is_upper(env.cell(1, 0)));
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(env.step(env.cell(1, 1), 0, rng).next, env.cell(0, 1));
  }
  // Rotated mapping: a=1 moves right, wrapping inside the upper area.
  EXPECT_EQ(env.step(env.cell(1, 0), 1, rng).next, env.cell(1, 1));
  EXPECT_EQ(env.step(env.cell(1, 1), 1, rng).next, env.cell(1, 0));
  EXPECT_EQ(env.step(env.cell(0, 1), 3, rng).next, env.cell(0, 0));
}

TEST(Gridworld, LowerAreaStayFrequency) {
  const TwoAreasGridworld env;
  Rng rng = derive_rng(2, 0);
  const int s = env.cell(4, 2);
  for (int a = 0; a < 4; ++a) {
    int stays = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      stays += env.step(s, a, rng).next == s ? 1 : 0;
    }
    const bool wall = env.move(s, env.intended_effect(s, a)) == s;
    EXPECT_NEAR(static_cast<double>(stays) / n, wall ? 1.0 : 0.1, 0.01) << a;
  }
}

TEST(Gridworld, LowerAreaMapping) {
  const TwoAreasGridworld env;
  const int s = env.cell(3, 2);
  EXPECT_EQ(env.move(s, env.intended_effect(s, 0)), env.cell(3, 3));
  EXPECT_EQ(env.move(s, env.intended_effect(s, 1)), env.cell(4, 2));
  EXPECT_EQ(env.move(s, env.intended_effect(s, 2)), env.cell(3, 1));
  EXPECT_EQ(env.move(s, env.intended_effect(s, 3)), env.cell(2, 2));
}

TEST(Gridworld, GoalIsAbsorbing) {
  const TwoAreasGridworld env;
  Rng rng = derive_rng(3, 0);
  for (int a = 0; a < 4; ++a) {
    const auto out = env.step(env.goal(), a, rng);
    EXPECT_EQ(out.next, env.goal());
    EXPECT_EQ(out.reward, 0.0);
    EXPECT_TRUE(out.done);
  }
}

TEST(Gridworld, KernelRowsAreDistributions) {
  const auto mdp = TwoAreasGridworld{}.true_kernel();
  EXPECT_NO_THROW(mdp.validate());
  EXPECT_NEAR(mdp.initial.sum(), 1.0, 1e-15);
  EXPECT_EQ((mdp.initial.array() > 0.0).count(), 9);
}

TEST(Gridworld, LowerKernelRowsHaveOneOrTwoEntries) {
  const TwoAreasGridworld env;
  const auto mdp = env.true_kernel();
  for (int s = 0; s < env.n_states(); ++s) {
    if (!env.is_lower(s)) {
      continue;
    }
    for (int a = 0; a < 4; ++a) {
      const auto row = mdp.kernel.row(mdp.pair(s, a));
      const auto nz = (row.array() > 0.0).count();
      if (nz == 2) {
        EXPECT_NEAR(row(s), 0.1, 1e-15);
        EXPECT_NEAR(row.maxCoeff(), 0.9, 1e-15);
      } else {
        EXPECT_EQ(nz, 1);
        EXPECT_EQ(row(s), 1.0);
      }
    }
  }
}

TEST(Gridworld, SampledStepsMatchKernel) {
  const TwoAreasGridworld env;
  const auto mdp = env.true_kernel();
  Rng rng = derive_rng(4, 0);
  const int n = 100000;
  for (int s = 0; s < env.n_states(); ++s) {
    for (int a = 0; a < 4; ++a) {
      Vector counts = Vector::Zero(env.n_states());
      for (int i = 0; i < n; ++i) {
        counts(env.step(s, a, rng).next) += 1.0;
      }
      const double tv = 0.5 * (counts / n - mdp.kernel.row(mdp.pair(s, a)).transpose()).cwiseAbs().sum();
      EXPECT_LT(tv, 0.01) << s << "," << a;
    }
  }
}

TEST(Gridworld, NoReturnFromUpperArea) {
  const TwoAreasGridworld env;
  const auto pol = TabularSoftmaxPolicy::uniform(env.n_states(), 4);
  Rng rng = derive_rng(5, 0);
  int steps = 0;
  int upper_visits = 0;
  while (steps < 100000) {
    int s = env.initial_state(rng);
    for (int t = 0; t < 200 && steps < 100000; ++t, ++steps) {
      const auto out = env.step(s, pol.sample(s, rng), rng);
      if (env.is_upper(s)) {
        ++upper_visits;
        ASSERT_TRUE(env.is_upper(out.next));
      }
      if (out.done) {
        break;
      }
      s = out.next;
    }
  }
  EXPECT_GT(upper_visits, 1000);
}

TEST(Gridworld, InitialStatesOnBottomAndRightBorder) {
  const TwoAreasGridworld env;
  Rng rng = derive_rng(6, 0);
  for (int i = 0; i < 1000; ++i) {
    const int s = env.initial_state(rng);
    EXPECT_TRUE(env.row(s) == 4 || env.col(s) == 4);
  }
}

TEST(Gridworld, InitialPolicyFreezesStickyArea) {
  const TwoAreasGridworld env;
  Rng rng = derive_rng(7, 0);
  const auto pol = env.initial_policy(rng, 0.3);
  for (int s = 0; s < env.n_states(); ++s) {
    EXPECT_EQ(pol.is_frozen(s), env.is_lower(s));
  }
  EXPECT_EQ(pol.frozen()[static_cast<std::size_t>(env.cell(0, 3))], 2);
  EXPECT_EQ(pol.frozen()[static_cast<std::size_t>(env.cell(3, 3))], 3);
}

TEST(Gridworld, ConsistentEffectsMergeWalls) {
  const TwoAreasGridworld env;
  const auto mask = env.consistent_effects(env.cell(4, 4), env.cell(4, 4));
  EXPECT_TRUE(mask[kStay]);
  EXPECT_TRUE(mask[kRight]);
  EXPECT_TRUE(mask[kDown]);
  EXPECT_FALSE(mask[kUp]);
}

TEST(Gridworld, RejectsBadConfig) {
  EXPECT_THROW(TwoAreasGridworld(GridworldConfig{5, 5, 0, 2}), ValidationError);
  EXPECT_THROW(TwoAreasGridworld(GridworldConfig{5, 5, 2, 2, 1.5}), ValidationError);
}

MinigolfConfig noiseless() {
  MinigolfConfig c;
  c.noise = false;
  return c;
}

TEST(MinigolfEnv, ZeroActionIsAStroke) {
  const Minigolf env;
  Rng rng = derive_rng(8, 0);
  const auto out = env.step(5.0, 0.0, rng);
  EXPECT_EQ(out.reward, -1.0);
  EXPECT_FALSE(out.done);
  EXPECT_EQ(out.next, 5.0);
}

TEST(MinigolfEnv, VminRegression) {
  const Minigolf env;
  EXPECT_NEAR(env.v_min(2.0), 1.916179234086117, 1e-12);
  EXPECT_NEAR(env.v_max(2.0), 3.317251898408402, 1e-12);
}

TEST(MinigolfEnv, OvershootAboveVmax) {
  const Minigolf env(noiseless());
  Rng rng = derive_rng(9, 0);
  const auto over = env.step(2.0, env.v_max(2.0) * (1.0 + 1e-9), rng);
  EXPECT_EQ(over.reward, -100.0);
  EXPECT_TRUE(over.done);
  const auto in = env.step(2.0, env.v_max(2.0), rng);
  EXPECT_EQ(in.reward, 0.0);
  EXPECT_TRUE(in.done);
  const auto short_shot = env.step(2.0, env.v_min(2.0) * (1.0 - 1e-9), rng);
  EXPECT_EQ(short_shot.reward, -1.0);
  EXPECT_GT(short_shot.next, 0.0);
}

TEST(MinigolfEnv, FrictionBoundary) {
  const Minigolf env;
  const double edge = (2.0 / 3.0) * 20.0;
  EXPECT_EQ(env.friction(std::nextafter(edge, 0.0)), 0.131);
  EXPECT_EQ(env.friction(edge), 0.19);
  EXPECT_EQ(env.friction(19.0), 0.19);
}

TEST(MinigolfEnv, TrajectoryInvariants) {
  const Minigolf env;
  const auto pol = RbfGaussianPolicy::equally_spaced(0.0, 20.0);
  Rng rng = derive_rng(10, 0);
  for (int ep = 0; ep < 2000; ++ep) {
    const auto traj = sample_trajectory(env, pol, 20, rng);
    for (std::size_t t = 0; t < traj.size(); ++t) {
      const auto& st = traj.steps[t];
      EXPECT_LE(st.next_state, st.state);
      EXPECT_TRUE(st.reward == 0.0 || st.reward == -1.0 || st.reward == -100.0);
      if (t + 1 < traj.size()) {
        EXPECT_EQ(st.reward, -1.0);
      }
    }
    if (traj.terminal) {
      EXPECT_NE(traj.steps.back().reward, -1.0);
    }
  }
}

TEST(MinigolfEnv, OutcomeInvertsTravelledDistance) {
  const Minigolf env(noiseless());
  Rng rng = derive_rng(11, 0);
  for (const double a : {0.5, 1.5, 2.5, 4.0}) {
    const auto direct = env.step(6.0, a, rng);
    const auto via_model = env.outcome(6.0, direct.next);
    EXPECT_EQ(direct.reward, via_model.reward);
    EXPECT_EQ(direct.done, via_model.done);
  }
}

TEST(MinigolfEnv, InitialStateRange) {
  const Minigolf env;
  Rng rng = derive_rng(12, 0);
  for (int i = 0; i < 10000; ++i) {
    const double x = env.initial_state(rng);
    EXPECT_GT(x, 0.0);
    EXPECT_LE(x, 20.0);
  }
}

}  // namespace
}  // namespace gamps
