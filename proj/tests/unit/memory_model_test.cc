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

#include "zolab/memory_model.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "zolab/deriv_optimizer.h"
#include "zolab/errors.h"
#include "zolab/model.h"
#include "zolab/transformer.h"
#include "zolab/zo_optimizer.h"

namespace zolab {
namespace {

constexpr double kGB = 1e9;

double Gb(uint64_t bytes) { return static_cast<double>(bytes) / kGB; }

TEST(PresetTest, ParamCountsFollowTheArchitecture) {
  for (const ModelPreset& preset : Presets()) {
    EXPECT_EQ(preset.param_count, ParameterCountFormula(preset.config))
        << preset.name;
    EXPECT_EQ(preset.param_count, ModelLayout(preset.config).param_count())
        << preset.name;
  }
  EXPECT_NEAR(FindPreset("roberta-large").param_count / 355e6, 1.0, 0.01);
  EXPECT_NEAR(FindPreset("opt-1.3b").param_count / 1.3e9, 1.0, 0.02);
  EXPECT_EQ(FindPreset("toy").config, ModelConfig{});
  EXPECT_THROW(FindPreset("gpt-9"), ConfigError);
}

TEST(PresetTest, LargePresetShapes) {
  const ModelConfig& r = FindPreset("roberta-large").config;
  EXPECT_EQ(r.layers, 24);
  EXPECT_EQ(r.dim, 1024);
  EXPECT_EQ(r.heads, 16);
  EXPECT_EQ(r.seq_len, 128);
  const ModelConfig& o = FindPreset("opt-1.3b").config;
  EXPECT_EQ(o.layers, 24);
  EXPECT_EQ(o.dim, 2048);
  EXPECT_EQ(o.heads, 32);
  EXPECT_EQ(o.seq_len, 128);
}

TEST(EstimateTest, StaticBytesPerParameter) {
  for (const char* name : {"toy", "roberta-large"}) {
    const uint64_t p = FindPreset(name).param_count;
    const MemoryEstimate adam =
        EstimateFootprint(name, OptimizerKind::kAdam, 1, DType::kF32);
    EXPECT_EQ(adam.bytes[Category::kWeights], 4 * p);
    EXPECT_EQ(adam.bytes[Category::kGrads], 4 * p);
    EXPECT_EQ(adam.bytes[Category::kOptState], 8 * p);
    EXPECT_EQ(adam.static_bytes(), 16 * p);
    const MemoryEstimate sgd =
        EstimateFootprint(name, OptimizerKind::kSgd, 1, DType::kF32);
    EXPECT_EQ(sgd.bytes[Category::kOptState], 0u);
    EXPECT_EQ(sgd.static_bytes(), 8 * p);
    const MemoryEstimate mezo =
        EstimateFootprint(name, OptimizerKind::kMezo, 1, DType::kF16);
    EXPECT_EQ(mezo.static_bytes(), 2 * p);
    EXPECT_EQ(mezo.bytes[Category::kTransient], 0u);
  }
}

TEST(EstimateTest, TotalIsSumOfCategories) {
  for (OptimizerKind opt :
       {OptimizerKind::kMezo, OptimizerKind::kAdam, OptimizerKind::kSgd}) {
    for (int64_t workers : {1, 4}) {
      const MemoryEstimate e = EstimateFootprint(
          "roberta-large", opt, 8, DType::kF32, 4, workers);
      uint64_t sum = 0;
      for (Category c : kAllCategories) sum += e.bytes[c];
      EXPECT_EQ(e.bytes.total, sum);
    }
  }
}

TEST(EstimateTest, ActivationFormula) {
  const ModelConfig& c = FindPreset("roberta-large").config;
  const double per_layer = 128.0 * 1024 * 10 + 128.0 * 128 * 16 * 2;
  const MemoryEstimate adam =
      EstimateFootprint("roberta-large", OptimizerKind::kAdam, 8, DType::kF32);
  EXPECT_EQ(adam.bytes[Category::kActivation],
            static_cast<uint64_t>(4.0 * 8 * c.layers * per_layer));
  const MemoryEstimate mezo =
      EstimateFootprint("roberta-large", OptimizerKind::kMezo, 8, DType::kF32);
  EXPECT_EQ(mezo.bytes[Category::kActivation],
            static_cast<uint64_t>(4.0 * 8 * 2 * per_layer));
}

TEST(EstimateTest, RobertaAdamBatch8MatchesMeasuredBand) {
  const MemoryEstimate e = WithBudget(
      EstimateFootprint("roberta-large", OptimizerKind::kAdam, 8, DType::kF32),
      static_cast<uint64_t>(12 * kGB));
  EXPECT_NEAR(Gb(e.static_bytes()), 5.66, 0.05);
  EXPECT_NEAR(Gb(e.bytes[Category::kActivation]), 1.41, 0.01);
  EXPECT_NEAR(Gb(e.bytes.total), 7.07, 0.05);
  // Measured 6.5 to 6.7 GB; within 25% of either end.
  EXPECT_LE(Gb(e.bytes.total), 6.5 * 1.25);
  EXPECT_GE(Gb(e.bytes.total), 6.7 * 0.75);
  EXPECT_EQ(e.verdict, Verdict::kFits);
}

TEST(EstimateTest, RobertaAdamBatch64IsOom) {
  const MemoryEstimate e = WithBudget(
      EstimateFootprint("roberta-large", OptimizerKind::kAdam, 64,
                        DType::kF32),
      static_cast<uint64_t>(12 * kGB));
  EXPECT_NEAR(Gb(e.bytes[Category::kActivation]), 11.27, 0.05);
  EXPECT_NEAR(Gb(e.bytes.total), 16.94, 0.05);
  EXPECT_EQ(e.verdict, Verdict::kOom);
  EXPECT_LT(e.headroom, 0);
}

TEST(EstimateTest, RobertaMezoBatch64Fits) {
  const MemoryEstimate e = WithBudget(
      EstimateFootprint("roberta-large", OptimizerKind::kMezo, 64,
                        DType::kF32),
      static_cast<uint64_t>(12 * kGB));
  EXPECT_NEAR(Gb(e.bytes[Category::kWeights]), 1.42, 0.01);
  EXPECT_EQ(e.bytes[Category::kGrads], 0u);
  EXPECT_EQ(e.bytes[Category::kOptState], 0u);
  EXPECT_EQ(e.verdict, Verdict::kFits);
  // Measured 4.0 to 4.5 GB; the model covers the tensors only.
  EXPECT_LT(Gb(e.bytes.total), 4.0);
}

TEST(EstimateTest, OptMezoBetweenWeightsAndMeasurement) {
  const MemoryEstimate e = WithBudget(
      EstimateFootprint("opt-1.3b", OptimizerKind::kMezo, 8, DType::kF32),
      static_cast<uint64_t>(12 * kGB));
  EXPECT_NEAR(Gb(e.bytes[Category::kWeights]), 5.25, 0.01);
  EXPECT_GE(e.bytes.total, e.bytes[Category::kWeights]);
  EXPECT_LE(Gb(e.bytes.total), 6.5);
  EXPECT_EQ(e.verdict, Verdict::kFits);
}

TEST(EstimateTest, ParallelWorkersAddReplicas) {
  const uint64_t p = FindPreset("toy").param_count;
  const MemoryEstimate serial =
      EstimateFootprint("toy", OptimizerKind::kMezo, 8, DType::kF32, 4, 1);
  const MemoryEstimate par =
      EstimateFootprint("toy", OptimizerKind::kMezo, 8, DType::kF32, 4, 4);
  EXPECT_EQ(par.bytes[Category::kTransient], 4 * 4 * p);
  EXPECT_EQ(par.bytes[Category::kActivation],
            4 * serial.bytes[Category::kActivation]);
}

TEST(EstimateTest, InvalidQueries) {
  EXPECT_THROW(EstimateFootprint("toy", OptimizerKind::kAdam, 0, DType::kF32),
               ConfigError);
  EXPECT_THROW(
      EstimateFootprint("toy", OptimizerKind::kMezo, 1, DType::kF32, 0),
      ConfigError);
  EXPECT_THROW(ParseOptimizer("lion"), ConfigError);
  for (OptimizerKind k :
       {OptimizerKind::kMezo, OptimizerKind::kAdam, OptimizerKind::kSgd}) {
    EXPECT_EQ(ParseOptimizer(OptimizerName(k)), k);
  }
}

TEST(PredictOomTest, VerdictAndHeadroom) {
  const MemoryEstimate e =
      EstimateFootprint("toy", OptimizerKind::kAdam, 8, DType::kF32);
  const uint64_t total = e.bytes.total;
  OomPrediction at = PredictOom(e, total);
  EXPECT_EQ(at.verdict, Verdict::kFits);
  EXPECT_EQ(at.headroom, 0);
  OomPrediction below = PredictOom(e, total - 1);
  EXPECT_EQ(below.verdict, Verdict::kOom);
  EXPECT_EQ(below.headroom, -1);
  EXPECT_THROW(PredictOom(e, 0), PreconditionError);
}

TEST(PredictOomTest, TinyBudgetIsOomForEveryPreset) {
  for (const ModelPreset& preset : Presets()) {
    for (OptimizerKind k :
         {OptimizerKind::kMezo, OptimizerKind::kAdam, OptimizerKind::kSgd}) {
      const MemoryEstimate e =
          EstimateFootprint(preset.name, k, 1, DType::kF32);
      EXPECT_EQ(PredictOom(e, static_cast<uint64_t>(1e-4 * kGB)).verdict,
                Verdict::kOom)
          << preset.name;
    }
  }
}

TEST(ToJsonTest, CarriesCategoriesAndVerdict) {
  const MemoryEstimate e = WithBudget(
      EstimateFootprint("toy", OptimizerKind::kSgd, 1, DType::kF32), 1000);
  const auto j = nlohmann::json::parse(ToJson(e));
  EXPECT_EQ(j["model"], "toy");
  EXPECT_EQ(j["optimizer"], "sgd");
  EXPECT_EQ(j["bytes"]["optstate"], 0);
  EXPECT_EQ(j["bytes"]["total"], e.bytes.total);
  EXPECT_EQ(j["budget"], 1000);
  EXPECT_EQ(j["verdict"], "oom");
  const auto unbudgeted = nlohmann::json::parse(ToJson(
      EstimateFootprint("toy", OptimizerKind::kSgd, 1, DType::kF32)));
  EXPECT_TRUE(unbudgeted["budget"].is_null());
}

// Peaks measured by the ledger over one training step.
CategoryBytes MeasureDerivative(const ModelConfig& c, int64_t bsz) {
  AllocationLedger ledger;
  auto params = InitModel<float>(c, 1, ledger);
  DerivativeTrainer<float> trainer(AdamConfig{}, ledger);
  Batch batch{bsz, c.seq_len, std::vector<int32_t>(bsz * c.seq_len, 7), {}};
  for (int64_t i = 0; i < bsz; ++i) batch.labels.push_back(i % 2);
  trainer.Step(params, batch, 1);
  return ledger.Peaks();
}

TEST(LedgerAgreementTest, AdamMeasuredPeaksMatchFormula) {
  for (const char* name : {"toy", "toy-1m"}) {
    const ModelConfig& c = FindPreset(name).config;
    for (int64_t bsz : {1, 8, 64}) {
      const CategoryBytes measured = MeasureDerivative(c, bsz);
      const MemoryEstimate est =
          EstimateFootprint(name, OptimizerKind::kAdam, bsz, DType::kF32);
      for (Category cat :
           {Category::kWeights, Category::kGrads, Category::kOptState}) {
        EXPECT_NEAR(static_cast<double>(measured[cat]),
                    static_cast<double>(est.bytes[cat]),
                    0.15 * est.bytes[cat])
            << name << " B=" << bsz << " " << CategoryName(cat);
      }
      const double act = static_cast<double>(est.bytes[Category::kActivation]);
      EXPECT_NEAR(static_cast<double>(measured[Category::kActivation]), act,
                  0.25 * act)
          << name << " B=" << bsz;
    }
  }
}

TEST(LedgerAgreementTest, MezoMeasuredActivationStaysBelowFormula) {
  const ModelConfig& c = FindPreset("toy").config;
  for (int64_t bsz : {1, 8, 64}) {
    AllocationLedger ledger;
    auto params = InitModel<float>(c, 1, ledger);
    Batch batch{bsz, c.seq_len, std::vector<int32_t>(bsz * c.seq_len, 7), {}};
    for (int64_t i = 0; i < bsz; ++i) batch.labels.push_back(i % 2);
    ZoOptimizer<float> opt(ZoConfig{}, ledger);
    const ModelLayout& layout = params.layout();
    opt.Step(params.values(),
             [&](std::span<const float> v) {
               return ForwardLoss<float>(layout, v, batch, ledger);
             },
             1);
    const MemoryEstimate est =
        EstimateFootprint("toy", OptimizerKind::kMezo, bsz, DType::kF32);
    EXPECT_EQ(ledger.peak(Category::kWeights), est.bytes[Category::kWeights]);
    EXPECT_EQ(ledger.peak(Category::kGrads), 0u);
    EXPECT_EQ(ledger.peak(Category::kOptState), 0u);
    EXPECT_LE(ledger.peak(Category::kActivation),
              est.bytes[Category::kActivation]);
  }
}

}  // namespace
}  // namespace zolab
