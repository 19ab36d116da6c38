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

#ifndef EVGRID_EVALUATION_H_
#define EVGRID_EVALUATION_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "evgrid/grid.h"
#include "evgrid/measurement_mapping.h"
#include "evgrid/pointset_mapping.h"
#include "evgrid/sensor_image.h"

namespace evgrid {

struct ConfusionRates {
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  double tn = 0.0;
};

// Grid-wide rates from per-cell object masses. Cells with mask == 0 or
// m_all == 0 are ignored; an empty mask includes every cell. nullopt when
// no cell carries m_all mass.
std::optional<ConfusionRates> ComputeConfusionRates(
    std::span<const double> m_i, std::span<const double> m_ref,
    std::span<const double> m_all, std::span<const std::uint8_t> mask = {});

enum class OccupancyMethod { kFlat, kFittedPlane, kNormals };
std::string MethodName(OccupancyMethod method);

struct EvaluationParams {
  double ground_tolerance = 0.3;  // delta_G for the plane models (m)
  PlaneFitOptions plane_fit;
  std::vector<OccupancyMethod> methods = {OccupancyMethod::kFlat,
                                          OccupancyMethod::kFittedPlane,
                                          OccupancyMethod::kNormals};
};

struct MethodResult {
  OccupancyMethod method;
  std::vector<double> object_mass;   // m_i(O) per Cartesian cell
  std::optional<ConfusionRates> rates;
};

struct FrameEvaluation {
  std::vector<double> reference_mass;  // m_ref(O)
  std::vector<double> all_mass;        // m_all(O)
  std::vector<std::uint8_t> mask;      // 0 for cells with other-ground labels
  std::vector<MethodResult> methods;
};

// Image path. reading.semantic holds the reference labels; pixels without a
// label are excluded.
FrameEvaluation EvaluateReading(const SensorReading& reading,
                                const DerivedImages& derived,
                                const WarpTable& table,
                                const MappingParams& mapping,
                                const EvaluationParams& params);

// Point-set path; the normals method is not available and is skipped.
FrameEvaluation EvaluatePointSet(const LabeledPointSet& set,
                                 const GridSpec& spec,
                                 const PointsetParams& mapping,
                                 const EvaluationParams& params);

void WriteRatesCsvHeader(std::ostream& out);
void WriteRatesCsv(std::ostream& out, int frame_index,
                   const FrameEvaluation& frame);

}  // namespace evgrid

#endif  // EVGRID_EVALUATION_H_
