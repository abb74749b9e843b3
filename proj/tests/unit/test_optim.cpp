// Copyright 2026 The citetrend Authors
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

#include <gtest/gtest.h>

#include <cmath>

#include "citetrend/error.hpp"
#include "citetrend/optim.hpp"

namespace citetrend::ad {
namespace {

TEST(Adam, FirstStepMovesByLearningRateTimesSign) {
  Parameter p("w", Tensor(1, 2));
  p.value(0, 0) = 1.0;
  p.value(0, 1) = -2.0;
  Adam adam({&p}, {.learning_rate = 0.01});
  p.grad(0, 0) = 0.5;
  p.grad(0, 1) = -3.0;
  adam.step();
  // Bias-corrected moments equal g and g^2 after one step.
  EXPECT_NEAR(p.value(0, 0), 1.0 - 0.01 * 0.5 / (0.5 + 1e-8), 1e-15);
  EXPECT_NEAR(p.value(0, 1), -2.0 + 0.01 * 3.0 / (3.0 + 1e-8), 1e-15);
  EXPECT_EQ(adam.steps(), 1u);
}

TEST(Adam, TwoStepsWithL2DecayMatchHandComputation) {
  Parameter p("w", Tensor(1, 1, 1.0));
  Adam adam({&p}, {.learning_rate = 0.1, .weight_decay = 0.5});
  double w = 1.0, m = 0.0, v = 0.0;
  const double grads[] = {0.2, -0.4};
  for (int t = 1; t <= 2; ++t) {
    p.grad(0, 0) = grads[t - 1];
    adam.step();
    const double g = grads[t - 1] + 0.5 * w;
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mhat = m / (1 - std::pow(0.9, t));
    const double vhat = v / (1 - std::pow(0.999, t));
    w -= 0.1 * mhat / (std::sqrt(vhat) + 1e-8);
    EXPECT_NEAR(p.value(0, 0), w, 1e-14) << "step " << t;
    EXPECT_NEAR(adam.first_moment(0)(0, 0), m, 1e-15);
    EXPECT_NEAR(adam.second_moment(0)(0, 0), v, 1e-15);
  }
}

TEST(Adam, ZeroesGradientsAfterStep) {
  Parameter p("w", Tensor(2, 2, 1.0));
  Adam adam({&p}, {});
  p.grad.fill(3.0);
  adam.step();
  for (double g : p.grad.data()) EXPECT_EQ(g, 0.0);
}

TEST(Adam, ZeroGradientAndNoDecayLeavesWeightsUnchanged) {
  Parameter p("w", Tensor(2, 2, 0.7));
  Adam adam({&p}, {});
  adam.step();
  for (double w : p.value.data()) EXPECT_EQ(w, 0.7);
}

TEST(Adam, RejectsBadConfig) {
  Parameter p("w", Tensor(1, 1));
  EXPECT_THROW(Adam({&p}, {.learning_rate = 0.0}), Error);
  EXPECT_THROW(Adam({&p}, {.weight_decay = -1.0}), Error);
}

}  // namespace
}  // namespace citetrend::ad
