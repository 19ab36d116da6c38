// Copyright 2026 The evgrid Authors
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

#include "evgrid/evidential.h"

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

#include "gtest/gtest.h"

namespace evgrid {
namespace {

TEST(FrameTest, OccupancyLayersAndSets) {
  EXPECT_EQ(NumLayers(Fod::kOccupancy), 8);
  EXPECT_EQ(NumLayers(Fod::kGround), 4);
  HypothesisSet objects = 0;
  for (int k = 0; k < kNumObjectClasses; ++k) {
    const HypothesisSet s = SetOf(static_cast<OccupancyHypothesis>(k));
    EXPECT_EQ(std::popcount<unsigned>(s), 1);
    EXPECT_EQ(objects & s, 0);
    objects |= s;
  }
  EXPECT_EQ(objects, SetOf(OccupancyHypothesis::kObject));
  // Everything but void is object or free.
  EXPECT_EQ(FullSet(Fod::kOccupancy) & ~SetOf(OccupancyHypothesis::kVoid),
            SetOf(OccupancyHypothesis::kObject) | SetOf(OccupancyHypothesis::kFree));
  EXPECT_EQ(SetOf(GroundHypothesis::kStreet) | SetOf(GroundHypothesis::kSidewalk) |
                SetOf(GroundHypothesis::kOtherGround),
            SetOf(GroundHypothesis::kAnyGround));
}

TEST(FrameTest, LabelNamesRoundTrip) {
  for (int k = 0; k < kNumSemanticLabels; ++k) {
    const auto label = static_cast<SemanticLabel>(k);
    EXPECT_EQ(ParseLabel(LabelName(label)), label);
  }
  EXPECT_FALSE(ParseLabel("banana"));
  EXPECT_TRUE(IsObjectLabel(SemanticLabel::kPedestrian));
  EXPECT_TRUE(IsGroundLabel(SemanticLabel::kSidewalk));
  EXPECT_FALSE(IsObjectLabel(SemanticLabel::kUnknown));
  EXPECT_FALSE(IsGroundLabel(SemanticLabel::kUnknown));
}

TEST(NotRelevantTest, Examples) {
  EXPECT_DOUBLE_EQ(NotRelevant({0.0, 1.0, 1.0, 1.0}), 0.0);
  EXPECT_DOUBLE_EQ(NotRelevant({1.0, 0.3, 0.2, 0.9}), 1.0);
  // 1 - 0.9 * 0.8 * 0.9 * 0.5
  EXPECT_NEAR(NotRelevant({0.1, 0.8, 0.9, 0.5}), 0.676, 1e-12);
}

TEST(NotRelevantTest, RejectsOutOfRange) {
  EXPECT_THROW(NotRelevant({-0.1, 0.5, 0.5, 0.5}), std::domain_error);
  EXPECT_THROW(NotRelevant({0.0, 1.5, 0.5, 0.5}), std::domain_error);
  EXPECT_THROW(NotRelevant({0.0, 0.5, NAN, 0.5}), std::domain_error);
}

TEST(NotRelevantTest, MatchesProductForm) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const RelevanceInputs r{u(rng), u(rng), u(rng), u(rng)};
    EXPECT_NEAR(NotRelevant(r), 1.0 - (1.0 - r.p_fp) * r.p_occ * r.p_omega * r.p_ism,
                1e-12);
  }
}

TEST(LogAccumulatorTest, Examples) {
  EXPECT_DOUBLE_EQ(BbaFromLogAccumulator(0.0), 0.0);
  EXPECT_NEAR(BbaFromLogAccumulator(std::log(0.5)), 0.5, 1e-15);
  EXPECT_NEAR(BbaFromLogAccumulator(std::log(0.9) + std::log(0.8)), 0.28, 1e-15);
  EXPECT_THROW(BbaFromLogAccumulator(0.1), std::domain_error);
}

TEST(LogAccumulatorTest, MonotoneDecreasing) {
  double previous = BbaFromLogAccumulator(0.0);
  for (double h = -0.01; h > -40.0; h -= 0.37) {
    const double m = BbaFromLogAccumulator(h);
    EXPECT_GE(m, previous);
    previous = m;
  }
}

TEST(ValidateTest, Examples) {
  const BbaReport empty = Validate(Bba(Fod::kOccupancy));
  EXPECT_TRUE(empty.ok);
  EXPECT_DOUBLE_EQ(empty.residual, 1.0);

  const BbaReport over = Validate(Bba(Fod::kGround, {0.5, 0.5, 0.5, 0.0}));
  EXPECT_FALSE(over.ok);
  EXPECT_NEAR(over.excess, 0.5, 1e-12);
  EXPECT_FALSE(over.violation.empty());

  EXPECT_TRUE(Validate(Bba(Fod::kGround, {0.5, 0.25, 0.25 + 1e-12, 0.0})).ok);
  EXPECT_TRUE(Validate(Bba(Fod::kGround, {0.5, 0.25, 0.25 - 1e-12, 0.0})).ok);
  EXPECT_FALSE(Validate(Bba(Fod::kGround, {-0.1, 0.0, 0.0, 0.0})).ok);
}

TEST(BbaTest, WrongLayerCountThrows) {
  EXPECT_THROW(Bba(Fod::kGround, {0.1, 0.2}), std::invalid_argument);
}

TEST(PignisticTest, Examples) {
  // Total ignorance spreads evenly over the frame.
  const Bba vacuous(Fod::kGround);
  EXPECT_NEAR(Pignistic(vacuous, SetOf(GroundHypothesis::kStreet)), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(Pignistic(Bba(Fod::kOccupancy), SetOf(OccupancyHypothesis::kFree)),
              1.0 / 7.0, 1e-15);

  // Bayesian BBA: singleton masses come back unchanged.
  const Bba bayes(Fod::kGround, {0.2, 0.3, 0.5, 0.0});
  EXPECT_NEAR(Pignistic(bayes, SetOf(GroundHypothesis::kStreet)), 0.2, 1e-15);
  EXPECT_NEAR(Pignistic(bayes, SetOf(GroundHypothesis::kOtherGround)), 0.5, 1e-15);

  // m(O) = 0.6 over five classes, m(car) = 0.4: Pr(car) = 0.4 + 0.6 / 5.
  std::vector<double> m(kNumOccupancyLayers, 0.0);
  m[static_cast<int>(OccupancyHypothesis::kObject)] = 0.6;
  m[static_cast<int>(OccupancyHypothesis::kCar)] = 0.4;
  const Bba occ(Fod::kOccupancy, m);
  EXPECT_NEAR(Pignistic(occ, SetOf(OccupancyHypothesis::kCar)), 0.52, 1e-15);
  EXPECT_NEAR(Pignistic(occ, SetOf(OccupancyHypothesis::kObject)), 1.0, 1e-15);
}

Bba RandomBba(Fod fod, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> m(NumLayers(fod));
  double total = 0.0;
  for (double& v : m) total += (v = u(rng));
  const double scale = u(rng) / total;
  for (double& v : m) v *= scale;
  return Bba(fod, m);
}

TEST(PignisticTest, SingletonsSumToOne) {
  std::mt19937_64 rng(12);
  for (Fod fod : {Fod::kOccupancy, Fod::kGround}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const Bba bba = RandomBba(fod, rng);
      ASSERT_TRUE(Validate(bba).ok);
      double sum = 0.0;
      const HypothesisSet full = FullSet(fod);
      for (int bit = 0; bit < 8; ++bit) {
        const auto s = static_cast<HypothesisSet>(1u << bit);
        if (full & s) sum += Pignistic(bba, s);
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
  }
}

TEST(PignisticTest, MonotoneInQuery) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> pick(0, 127);
  for (int trial = 0; trial < 2000; ++trial) {
    const Bba bba = RandomBba(Fod::kOccupancy, rng);
    const auto a = static_cast<HypothesisSet>(pick(rng));
    const auto b = static_cast<HypothesisSet>(a | pick(rng));
    EXPECT_LE(Pignistic(bba, a), Pignistic(bba, b) + 1e-15);
  }
}

}  // namespace
}  // namespace evgrid
