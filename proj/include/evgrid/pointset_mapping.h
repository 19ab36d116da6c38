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

#ifndef EVGRID_POINTSET_MAPPING_H_
#define EVGRID_POINTSET_MAPPING_H_

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "evgrid/evidential.h"
#include "evgrid/grid.h"
#include "evgrid/measurement_mapping.h"
#include "evgrid/sensor_image.h"

namespace evgrid {

struct LabeledPoint {
  Vec3 position = Vec3::Zero();  // vehicle frame (m)
  SemanticLabel label = SemanticLabel::kUnknown;
  double confidence = 1.0;       // p_omega
};

struct LabeledPointSet {
  std::vector<LabeledPoint> points;
  Vec3 sensor_origin = Vec3::Zero();  // vehicle frame (m)
};

struct PlaneCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

// Ground height f_G(x, y) with the segmentation margin delta_G.
class GroundModel {
 public:
  using HeightFunction = std::function<double(double, double)>;

  static GroundModel Flat(double tolerance = 0.3);
  // z = a x + b y + c.
  static GroundModel Plane(const PlaneCoefficients& plane,
                           double tolerance = 0.3);
  static GroundModel External(HeightFunction fn, double tolerance = 0.3);

  double Height(double x, double y) const;
  double tolerance() const { return tolerance_; }
  // nullopt for external models.
  std::optional<PlaneCoefficients> plane() const;

 private:
  GroundModel(std::variant<PlaneCoefficients, HeightFunction> model,
              double tolerance);
  std::variant<PlaneCoefficients, HeightFunction> model_;
  double tolerance_;
};

// 1 for points between delta_G and d_z_max above the ground, 0 otherwise.
std::vector<double> ClassifyPoints(std::span<const LabeledPoint> points,
                                   const GroundModel& model,
                                   const Corridors& corridors);

struct PlaneFitOptions {
  double cell_size = 2.0;      // candidate selection cell (m)
  int refit_iterations = 2;    // 0 disables outlier rejection
  double inlier_threshold = 0.3;  // m
  double tolerance = 0.3;      // delta_G of the returned model
};

// Least-squares plane through the lowest point of each coarse cell; nullopt
// for fewer than three candidates or collinear candidates.
std::optional<GroundModel> FitPlane(std::span<const LabeledPoint> points,
                                    const PlaneFitOptions& options = {});

struct PointsetParams {
  GaussianIsm ism{0.03, 0.0};  // isotropic, per axis (m)
  Corridors corridors;
  double p_fp = 0.0;
};

// Log-evidence and permeability layers on the Cartesian grid; p_occ
// overrides the model classification when non-empty.
LayeredGrid PointsetEvidence(const LabeledPointSet& set, const GroundModel& model,
                             const GridSpec& spec, const PointsetParams& params,
                             std::span<const double> p_occ = {});

LayeredGrid PointsetToGrid(const LabeledPointSet& set, const GroundModel& model,
                           const GridSpec& spec, const PointsetParams& params);

}  // namespace evgrid

#endif  // EVGRID_POINTSET_MAPPING_H_
