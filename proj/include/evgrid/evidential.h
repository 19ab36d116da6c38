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

#ifndef EVGRID_EVIDENTIAL_H_
#define EVGRID_EVIDENTIAL_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evgrid {

// Addressable layers of the occupancy frame {c, cy, p, om, im, f, v}.
enum class OccupancyHypothesis : std::uint8_t {
  kCar = 0,
  kTwoWheeler,
  kPedestrian,
  kOtherMobile,
  kImmobile,
  kObject,  // union of the five object singletons
  kFree,
  kVoid,
};
inline constexpr int kNumOccupancyLayers = 8;
inline constexpr int kNumObjectClasses = 5;

// Addressable layers of the ground frame {s, sw, t}.
enum class GroundHypothesis : std::uint8_t {
  kStreet = 0,
  kSidewalk,
  kOtherGround,
  kAnyGround,  // the full ground frame
};
inline constexpr int kNumGroundLayers = 4;

enum class Fod : std::uint8_t { kOccupancy, kGround };

// Bitmask over the elements of one frame. Occupancy bits: c, cy, p, om, im,
// f, v (bit 0..6). Ground bits: s, sw, t (bit 0..2).
using HypothesisSet = std::uint8_t;

HypothesisSet SetOf(OccupancyHypothesis h);
HypothesisSet SetOf(GroundHypothesis h);
HypothesisSet FullSet(Fod fod);
int FodSize(Fod fod);
int NumLayers(Fod fod);
// Set addressed by layer index `layer` of `fod`.
HypothesisSet LayerSet(Fod fod, int layer);

// Per-measurement semantic label: a singleton of O or of the ground frame.
enum class SemanticLabel : std::uint8_t {
  kUnknown = 0,
  kCar,
  kTwoWheeler,
  kPedestrian,
  kOtherMobile,
  kImmobile,
  kStreet,
  kSidewalk,
  kOtherGround,
};
inline constexpr int kNumSemanticLabels = 9;

bool IsObjectLabel(SemanticLabel label);
bool IsGroundLabel(SemanticLabel label);
// Layer receiving object evidence from a measurement with this label; the
// union O for unlabeled measurements, nullopt for ground labels.
std::optional<OccupancyHypothesis> ObjectLayerFor(SemanticLabel label);
// Same for the ground frame; the full ground frame for unlabeled ones.
std::optional<GroundHypothesis> GroundLayerFor(SemanticLabel label);
std::string_view LabelName(SemanticLabel label);
std::optional<SemanticLabel> ParseLabel(std::string_view name);

// Basic belief assignment over the addressable layers of one frame. Mass not
// assigned explicitly (the residual) rests on the full frame.
class Bba {
 public:
  explicit Bba(Fod fod);
  Bba(Fod fod, std::vector<double> masses);

  Fod fod() const { return fod_; }
  std::span<const double> masses() const { return masses_; }
  double mass(int layer) const { return masses_.at(layer); }
  double mass(OccupancyHypothesis h) const;
  double mass(GroundHypothesis h) const;
  double ExplicitSum() const;
  double Residual() const { return 1.0 - ExplicitSum(); }

 private:
  Fod fod_;
  std::vector<double> masses_;
};

struct BbaReport {
  bool ok = true;
  std::string violation;  // empty when ok
  double excess = 0.0;    // amount by which the violated bound is exceeded
  double residual = 1.0;
};

BbaReport Validate(const Bba& bba);

// Pignistic probability of `query` with the residual treated as mass on the
// full frame.
double Pignistic(const Bba& bba, HypothesisSet query);

struct RelevanceInputs {
  double p_fp = 0.0;     // false-positive rate of the sensor
  double p_occ = 0.0;    // measurement stems from an occupying surface
  double p_omega = 0.0;  // semantic label matches the hypothesis
  double p_ism = 0.0;    // inverse sensor model Pr(C | m)
};

// Probability that a measurement is not relevant for a hypothesis in a cell,
// evaluated as the sum over the four nested binary queries. Ground callers
// pass 1 - p_occ. Throws std::domain_error for inputs outside [0, 1].
double NotRelevant(const RelevanceInputs& r);

// 1 - exp(log_sum): the mass implied by accumulated log non-relevance.
// Throws std::domain_error for log_sum > kMassEpsilon.
double BbaFromLogAccumulator(double log_sum);

}  // namespace evgrid

#endif  // EVGRID_EVIDENTIAL_H_
