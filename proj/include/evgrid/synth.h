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

#ifndef EVGRID_SYNTH_H_
#define EVGRID_SYNTH_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "evgrid/evidential.h"
#include "evgrid/grid.h"
#include "evgrid/measurement_mapping.h"
#include "evgrid/pointset_mapping.h"
#include "evgrid/sensor_image.h"

namespace evgrid {

// Axis-aligned box in world coordinates; center z is absolute.
struct Box {
  Vec3 center = Vec3::Zero();
  Vec3 size = Vec3::Ones();
  SemanticLabel label = SemanticLabel::kImmobile;
};

// Zero-thickness vertical strip from the ground up to `height` above it.
struct Wall {
  Eigen::Vector2d a = Eigen::Vector2d::Zero();
  Eigen::Vector2d b = Eigen::Vector2d::UnitX();
  double height = 1.0;
  SemanticLabel label = SemanticLabel::kImmobile;
};

struct Scene {
  PlaneCoefficients ground;
  SemanticLabel ground_label = SemanticLabel::kStreet;
  std::vector<Box> boxes;
  std::vector<Wall> walls;

  double GroundHeight(double x, double y) const {
    return ground.a * x + ground.b * y + ground.c;
  }
  // Throws ConfigError for non-positive sizes or obstacles below the ground.
  void Check() const;
};

// Level vehicle pose in the world: position of the vehicle-frame origin and
// heading.
struct VehiclePose {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;  // rad
};

struct SensorModel {
  Calibration calibration;      // extrinsics relative to the vehicle
  VehiclePose pose;
  double noise_sigma = 0.0;     // additive noise on the range channel
  std::uint64_t seed = 0;
  double max_range = 120.0;     // m, longer rays report no return
};

struct Rendering {
  SensorReading reading;  // semantic channel carries the true labels
  Image<Vec3> points;     // exact hits, sensor frame
  Image<Vec3> normals;    // face normals, sensor frame
};

Rendering Render(const Scene& scene, const SensorModel& sensor);

// Noiseless hits of a rendering as a vehicle-frame point set.
LabeledPointSet ToPointSet(const Rendering& rendering);

enum class CellState : std::uint8_t { kFree = 0, kOccupied = 1, kVoid = 2 };

// Exact per-cell state of a vehicle-frame grid: occupied when a steep face
// meets the cell's driving-corridor column, free when that column is empty,
// void otherwise.
std::vector<CellState> TrueGrid(const Scene& scene, const GridSpec& spec,
                                const Corridors& corridors,
                                const VehiclePose& pose = {});

// Text scene description, one primitive per line:
//   ground a b c
//   box cx cy cz sx sy sz label
//   wall x1 y1 x2 y2 h label
// '#' starts a comment. Throws FormatError with the line number.
Scene ParseScene(std::istream& in);
Scene LoadScene(const std::string& path);

}  // namespace evgrid

#endif  // EVGRID_SYNTH_H_
