// Copyright 2026 The zolab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zolab/deriv_optimizer.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "zolab/errors.h"
#include "zolab/transformer.h"

namespace zolab {
namespace {

TEST(AdamStepTest, SingleStepClosedForm) {
  AdamState<double> state(UntrackedLedger(), 1);
  std::vector<double> theta = {0.5};
  const std::vector<double> grad = {2.0};
  AdamConfig config;
  config.lr = 1e-3;
  AdamStep<double>(state, theta, grad, config);
  EXPECT_EQ(state.t, 1);
  EXPECT_NEAR(state.m[0], 0.2, 1e-15);
  EXPECT_NEAR(state.v[0], 0.004, 1e-15);
  // m_hat = 2, v_hat = 4, step = 1e-3 * 2 / (2 + 1e-8).
  EXPECT_NEAR(theta[0] - 0.5, -9.99999995e-4, 1e-15);
}

TEST(AdamStepTest, ZeroGradientOnFreshStateDoesNotMove) {
  AdamState<double> state(UntrackedLedger(), 3);
  std::vector<double> theta = {1.0, -2.0, 3.0};
  const std::vector<double> before = theta;
  AdamStep<double>(state, theta, std::vector<double>(3, 0.0), AdamConfig{});
  EXPECT_EQ(theta, before);
}

TEST(AdamStepTest, StepSizeBoundedByLearningRate) {
  const std::vector<double> grads = {1e-6, -0.3, 4.0, -250.0, 1e4};
  AdamState<double> state(UntrackedLedger(), grads.size());
  std::vector<double> theta(grads.size(), 0.0);
  AdamConfig config;
  config.lr = 1e-2;
  for (int step = 0; step < 50; ++step) {
    const std::vector<double> before = theta;
    AdamStep<double>(state, theta, grads, config);
    for (size_t i = 0; i < theta.size(); ++i) {
      EXPECT_LE(std::abs(theta[i] - before[i]), config.lr * (1 + 1e-9));
    }
  }
  for (size_t i = 0; i < grads.size(); ++i) EXPECT_GE(state.v[i], 0.0);
}

TEST(AdamStepTest, LengthMismatchIsPreconditionError) {
  AdamState<double> state(UntrackedLedger(), 2);
  std::vector<double> theta = {1.0, 2.0};
  EXPECT_THROW(AdamStep<double>(state, theta, std::vector<double>(3, 0.0),
                                AdamConfig{}),
               PreconditionError);
  std::vector<double> longer = {1.0, 2.0, 3.0};
  EXPECT_THROW(AdamStep<double>(state, longer, std::vector<double>(3, 0.0),
                                AdamConfig{}),
               PreconditionError);
}

TEST(AdamConfigTest, Validation) {
  EXPECT_NO_THROW(AdamConfig{}.Validate());
  AdamConfig c;
  EXPECT_EQ(c.lr, 1e-4);
  EXPECT_EQ(c.beta1, 0.9);
  EXPECT_EQ(c.beta2, 0.999);
  EXPECT_EQ(c.eps, 1e-8);
  c.beta1 = 1.0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = AdamConfig{};
  c.beta2 = -0.1;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = AdamConfig{};
  c.eps = 0.0;
  EXPECT_THROW(c.Validate(), ConfigError);
  SgdConfig s;
  s.lr = -1;
  EXPECT_THROW(s.Validate(), ConfigError);
}

TEST(SgdStepTest, DirectArithmetic) {
  std::vector<double> theta = {1.0, 0.0};
  SgdStep<double>(theta, std::vector<double>{1.0, 0.0}, 0.1);
  EXPECT_NEAR(theta[0], 0.9, 1e-15);
  EXPECT_EQ(theta[1], 0.0);

  const std::vector<double> before = theta;
  SgdStep<double>(theta, std::vector<double>{5.0, -3.0}, 0.0);
  EXPECT_EQ(theta, before);

  EXPECT_THROW(SgdStep<double>(theta, std::vector<double>{1.0}, 0.1),
               PreconditionError);
}

TEST(SgdStepTest, ConvergesOnQuadratic) {
  std::vector<double> theta(10);
  for (size_t i = 0; i < theta.size(); ++i) theta[i] = 1.0 + 0.5 * i;
  for (int step = 0; step < 200; ++step) {
    const std::vector<double> grad = theta;  // gradient of 0.5 |theta|^2
    SgdStep<double>(theta, grad, 0.1);
  }
  double loss = 0.0;
  for (double x : theta) loss += 0.5 * x * x;
  EXPECT_LT(loss, 1e-8);
}

ModelConfig Toy() { return ModelConfig{}; }

Batch ToyBatch(int64_t batch_size) {
  Batch b{batch_size, 32, {}, {}};
  for (int64_t i = 0; i < batch_size * 32; ++i) {
    b.tokens.push_back(static_cast<int32_t>((i * 37 + 11) % 1000));
  }
  for (int64_t i = 0; i < batch_size; ++i) {
    b.labels.push_back(static_cast<int32_t>(i % 2));
  }
  return b;
}

TEST(DerivativeTrainerTest, AdamChargesTwoParameterCopiesOfState) {
  AllocationLedger ledger;
  auto params = InitModel<float>(Toy(), 1, ledger);
  DerivativeTrainer<float> trainer(AdamConfig{}, ledger);
  const StepRecord r = trainer.Step(params, ToyBatch(8), 1);
  const uint64_t pbytes = params.param_count() * sizeof(float);
  EXPECT_EQ(r.loss_evaluations, 1);
  EXPECT_EQ(r.peaks[Category::kOptState], 2 * pbytes);
  EXPECT_EQ(r.peaks[Category::kGrads], pbytes);
  EXPECT_EQ(r.peaks[Category::kWeights], pbytes);
  EXPECT_GE(r.peaks.total, 4 * pbytes);
  EXPECT_EQ(ledger.current(Category::kGrads), 0u);
  EXPECT_EQ(ledger.current(Category::kActivation), 0u);
  ASSERT_TRUE(trainer.adam_state().has_value());
  EXPECT_EQ(trainer.adam_state()->t, 1);
}

TEST(DerivativeTrainerTest, SgdHasNoOptimizerState) {
  AllocationLedger ledger;
  auto params = InitModel<float>(Toy(), 1, ledger);
  DerivativeTrainer<float> trainer(SgdConfig{}, ledger);
  const StepRecord r = trainer.Step(params, ToyBatch(8), 1);
  EXPECT_EQ(r.peaks[Category::kOptState], 0u);
  EXPECT_EQ(ledger.peak(Category::kOptState), 0u);
  EXPECT_FALSE(trainer.adam_state().has_value());
}

TEST(DerivativeTrainerTest, ActivationPeakIsLinearInBatchSize) {
  uint64_t base = 0;
  for (int64_t bsz : {1, 2, 8, 64}) {
    AllocationLedger ledger;
    auto params = InitModel<float>(Toy(), 1, ledger);
    DerivativeTrainer<float> trainer(AdamConfig{}, ledger);
    const StepRecord r = trainer.Step(params, ToyBatch(bsz), 1);
    if (bsz == 1) base = r.peaks[Category::kActivation];
    const double ratio =
        static_cast<double>(r.peaks[Category::kActivation]) / base;
    EXPECT_NEAR(ratio, static_cast<double>(bsz), 0.1 * bsz) << bsz;
  }
}

TEST(DerivativeTrainerTest, BudgetBelowStaticFootprintIsSimulatedOom) {
  const uint64_t pbytes = ModelLayout(Toy()).param_count() * sizeof(float);
  AllocationLedger ledger(4 * pbytes - 1);
  auto params = InitModel<float>(Toy(), 1, ledger);
  DerivativeTrainer<float> trainer(AdamConfig{}, ledger);
  EXPECT_THROW(trainer.Step(params, ToyBatch(1), 1), SimulatedOomError);
  EXPECT_LE(ledger.peak_total(), 4 * pbytes - 1);
}

TEST(DerivativeTrainerTest, AdamLowersLossOnFixedBatch) {
  auto params = InitModel<float>(Toy(), 2, UntrackedLedger());
  AdamConfig config;
  config.lr = 1e-3;
  DerivativeTrainer<float> trainer(config, UntrackedLedger());
  const Batch batch = ToyBatch(8);
  const double first = trainer.Step(params, batch, 1).loss;
  double last = first;
  for (int64_t step = 2; step <= 20; ++step) {
    last = trainer.Step(params, batch, step).loss;
  }
  EXPECT_LT(last, 0.5 * first);
}

}  // namespace
}  // namespace zolab
