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

#ifndef EVGRID_MEASUREMENT_MAPPING_H_
#define EVGRID_MEASUREMENT_MAPPING_H_

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "evgrid/evidential.h"
#include "evgrid/grid.h"
#include "evgrid/sensor_image.h"

namespace evgrid {

// Range normally distributed around the measurement with
// sigma(r) = sigma + sigma_per_range * r, in measurement-grid range units.
struct GaussianIsm {
  double sigma = 0.03;
  double sigma_per_range = 0.0;
};

// Range uniformly distributed between a pixel and its vertical neighbor.
struct IntervalIsm {};

using InverseSensorModel = std::variant<GaussianIsm, IntervalIsm>;

double GaussianSigma(const GaussianIsm& model, double r_m);

// Pr(C | m) for the cell range interval [lo, hi). r_adjacent is required by
// the interval model; a missing value yields 0. Throws ConfigError for a
// non-positive Gaussian sigma.
double IsmProbability(const InverseSensorModel& model, double lo, double hi,
                      double r_m, std::optional<double> r_adjacent = {});

struct Corridors {
  double d_z_max = 2.5;  // driving-corridor ceiling above ground (m)
  double f_z_min = 0.3;  // free-space corridor floor (m)
  double f_z_max = 1.8;  // free-space corridor ceiling (m)
  double r_max = 50.0;   // maximum free-space range (m)

  // Throws ConfigError unless 0 <= f_z_min < f_z_max <= d_z_max, r_max > 0.
  void Check() const;
};

// Layer names of the evidential map, in hypothesis order.
std::string OccupancyLayerName(OccupancyHypothesis h);
std::string GroundLayerName(GroundHypothesis h);
std::vector<std::string> EvidentialLayerNames();
// Log-evidence layers (every addressable hypothesis except free space) plus
// the permeability layer.
std::vector<std::string> MeasurementLayerNames();
inline constexpr const char* kPermeabilityLayer = "permeability";

// Per-cell lower bound of one log contribution.
inline const double kLogFloor = std::log(1e-9);

// One pixel prepared for accumulation.
struct MeasurementElement {
  PixelIndex pixel;               // source pixel
  int u_cell = 0;                 // measurement-grid column
  double r = 0.0;                 // range coordinate in grid units
  double r_adjacent = kUnknown;   // range of the pixel above, if known
  double p_occ = 0.0;
  double p_omega = 1.0;
  SemanticLabel label = SemanticLabel::kUnknown;
  bool object_evidence = false;   // inside the driving corridor
  bool ground_evidence = false;   // ground-classified
};

struct MappingParams {
  InverseSensorModel object_ism = GaussianIsm{};
  InverseSensorModel ground_ism = GaussianIsm{};
  Corridors corridors;
  double p_fp = 0.0;
  int workers = 1;

  // Throws ConfigError. Interval models are accepted for camera ground
  // evidence only.
  void Check(SensorKind sensor) const;
};

// Measurement-grid column of image column u; nullopt outside the grid.
std::optional<int> ColumnCell(const Calibration& calibration,
                              const GridSpec& spec, int u);

std::vector<MeasurementElement> BuildElements(const SensorReading& reading,
                                              const DerivedImages& derived,
                                              const GridSpec& spec,
                                              const Corridors& corridors);

// Log-evidence layers of h_M; the permeability layer stays zero. The result
// does not depend on the order of `elements` beyond floating-point
// reassociation.
LayeredGrid AccumulateElements(std::span<const MeasurementElement> elements,
                               const GridSpec& spec,
                               const MappingParams& params);

// Ray permeability on the measurement grid, clamped to [0, 1].
std::vector<double> RayPermeability(const SensorReading& reading,
                                    const DerivedImages& derived,
                                    const GridSpec& spec,
                                    const Corridors& corridors,
                                    int workers = 1);

// Full h_M for one reading.
LayeredGrid Accumulate(const SensorReading& reading,
                       const DerivedImages& derived, const GridSpec& spec,
                       const MappingParams& params);

// Masses from log-evidence and permeability layers that already live on the
// target grid. `h` carries MeasurementLayerNames().
LayeredGrid FinalizeCells(const LayeredGrid& h, int workers = 1);

// Warps h_M into the Cartesian grid and finalizes the masses.
LayeredGrid Finalize(const LayeredGrid& h_m, const WarpTable& table,
                     int workers = 1);
LayeredGrid Finalize(const LayeredGrid& h_m, const MeasurementGridKind& kind,
                     const GridSpec& dst, const WarpOptions& options = {});

// Per-cell BBAs of an evidential map.
Bba OccupancyBbaAt(const LayeredGrid& map, std::size_t cell);
Bba GroundBbaAt(const LayeredGrid& map, std::size_t cell);

}  // namespace evgrid

#endif  // EVGRID_MEASUREMENT_MAPPING_H_
