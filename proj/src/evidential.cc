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

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "evgrid/common.h"

namespace evgrid {
namespace {

constexpr HypothesisSet kObjectSet = 0x1F;
constexpr HypothesisSet kFreeBit = 1 << 5;
constexpr HypothesisSet kVoidBit = 1 << 6;

constexpr std::array<std::string_view, kNumSemanticLabels> kLabelNames = {
    "unknown",      "car",    "two_wheeler", "pedestrian", "other_mobile",
    "immobile",     "street", "sidewalk",    "other_ground"};

void CheckProbability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream msg;
    msg << name << " = " << p << " is outside [0, 1]";
    throw std::domain_error(msg.str());
  }
}

}  // namespace

HypothesisSet SetOf(OccupancyHypothesis h) {
  switch (h) {
    case OccupancyHypothesis::kObject:
      return kObjectSet;
    case OccupancyHypothesis::kFree:
      return kFreeBit;
    case OccupancyHypothesis::kVoid:
      return kVoidBit;
    default:
      return static_cast<HypothesisSet>(1u << static_cast<int>(h));
  }
}

HypothesisSet SetOf(GroundHypothesis h) {
  if (h == GroundHypothesis::kAnyGround) return 0x7;
  return static_cast<HypothesisSet>(1u << static_cast<int>(h));
}

HypothesisSet FullSet(Fod fod) { return fod == Fod::kOccupancy ? 0x7F : 0x7; }

int FodSize(Fod fod) { return fod == Fod::kOccupancy ? 7 : 3; }

int NumLayers(Fod fod) {
  return fod == Fod::kOccupancy ? kNumOccupancyLayers : kNumGroundLayers;
}

HypothesisSet LayerSet(Fod fod, int layer) {
  if (layer < 0 || layer >= NumLayers(fod)) {
    throw std::out_of_range("layer index out of range");
  }
  return fod == Fod::kOccupancy
             ? SetOf(static_cast<OccupancyHypothesis>(layer))
             : SetOf(static_cast<GroundHypothesis>(layer));
}

bool IsObjectLabel(SemanticLabel label) {
  return label >= SemanticLabel::kCar && label <= SemanticLabel::kImmobile;
}

bool IsGroundLabel(SemanticLabel label) {
  return label >= SemanticLabel::kStreet &&
         label <= SemanticLabel::kOtherGround;
}

std::optional<OccupancyHypothesis> ObjectLayerFor(SemanticLabel label) {
  if (label == SemanticLabel::kUnknown) return OccupancyHypothesis::kObject;
  if (!IsObjectLabel(label)) return std::nullopt;
  return static_cast<OccupancyHypothesis>(static_cast<int>(label) -
                                          static_cast<int>(SemanticLabel::kCar));
}

std::optional<GroundHypothesis> GroundLayerFor(SemanticLabel label) {
  if (label == SemanticLabel::kUnknown) return GroundHypothesis::kAnyGround;
  if (!IsGroundLabel(label)) return std::nullopt;
  return static_cast<GroundHypothesis>(static_cast<int>(label) -
                                       static_cast<int>(SemanticLabel::kStreet));
}

std::string_view LabelName(SemanticLabel label) {
  return kLabelNames[static_cast<int>(label)];
}

std::optional<SemanticLabel> ParseLabel(std::string_view name) {
  for (int i = 0; i < kNumSemanticLabels; ++i) {
    if (kLabelNames[i] == name) return static_cast<SemanticLabel>(i);
  }
  return std::nullopt;
}

Bba::Bba(Fod fod) : fod_(fod), masses_(NumLayers(fod), 0.0) {}

Bba::Bba(Fod fod, std::vector<double> masses)
    : fod_(fod), masses_(std::move(masses)) {
  if (static_cast<int>(masses_.size()) != NumLayers(fod_)) {
    throw std::invalid_argument("BBA mass vector has the wrong layer count");
  }
}

double Bba::mass(OccupancyHypothesis h) const {
  if (fod_ != Fod::kOccupancy) throw std::invalid_argument("not occupancy");
  return masses_[static_cast<int>(h)];
}

double Bba::mass(GroundHypothesis h) const {
  if (fod_ != Fod::kGround) throw std::invalid_argument("not ground");
  return masses_[static_cast<int>(h)];
}

double Bba::ExplicitSum() const {
  double sum = 0.0;
  for (double m : masses_) sum += m;
  return sum;
}

BbaReport Validate(const Bba& bba) {
  BbaReport report;
  const auto masses = bba.masses();
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!std::isfinite(masses[i])) {
      report.ok = false;
      report.violation = "mass of layer " + std::to_string(i) + " not finite";
      report.excess = std::numeric_limits<double>::infinity();
      return report;
    }
    if (masses[i] < -kMassEpsilon) {
      report.ok = false;
      report.violation = "mass of layer " + std::to_string(i) + " negative";
      report.excess = -masses[i];
      return report;
    }
  }
  const double sum = bba.ExplicitSum();
  report.residual = 1.0 - sum;
  if (sum > 1.0 + kMassEpsilon) {
    report.ok = false;
    report.violation = "explicit masses sum above one";
    report.excess = sum - 1.0;
  }
  return report;
}

double Pignistic(const Bba& bba, HypothesisSet query) {
  const Fod fod = bba.fod();
  query &= FullSet(fod);
  double p = 0.0;
  for (int layer = 0; layer < NumLayers(fod); ++layer) {
    const HypothesisSet b = LayerSet(fod, layer);
    p += static_cast<double>(std::popcount<unsigned>(query & b)) /
         std::popcount<unsigned>(b) * bba.mass(layer);
  }
  p += static_cast<double>(std::popcount<unsigned>(query)) / FodSize(fod) *
       bba.Residual();
  return p;
}

double NotRelevant(const RelevanceInputs& r) {
  CheckProbability(r.p_fp, "p_fp");
  CheckProbability(r.p_occ, "p_occ");
  CheckProbability(r.p_omega, "p_omega");
  CheckProbability(r.p_ism, "p_ism");
  const double tp = 1.0 - r.p_fp;
  return r.p_fp + tp * (1.0 - r.p_occ) + tp * r.p_occ * (1.0 - r.p_omega) +
         tp * r.p_occ * r.p_omega * (1.0 - r.p_ism);
}

double BbaFromLogAccumulator(double log_sum) {
  if (!(log_sum <= kMassEpsilon)) {
    throw std::domain_error("log accumulator must be <= 0, got " +
                            std::to_string(log_sum));
  }
  return -std::expm1(std::min(log_sum, 0.0));
}

}  // namespace evgrid
