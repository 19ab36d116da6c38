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

#ifndef EVGRID_PIPELINE_H_
#define EVGRID_PIPELINE_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "evgrid/evaluation.h"
#include "evgrid/grid.h"
#include "evgrid/io.h"
#include "evgrid/measurement_mapping.h"
#include "evgrid/pointset_mapping.h"
#include "evgrid/sensor_image.h"
#include "evgrid/synth.h"

namespace evgrid {

enum class GroundModelKind { kFlat, kFittedPlane };

struct SynthSettings {
  VehiclePose pose;
  double step_x = 1.0;   // vehicle displacement per frame (m)
  int frames = 1;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  double max_range = 120.0;
};

struct PipelineConfig {
  Calibration calibration;
  GridSpec measurement_grid;
  GridSpec cartesian_grid;
  ProcessingParams processing;
  MappingParams mapping;
  WarpOptions warp;
  // Point-set path.
  GroundModelKind ground_model = GroundModelKind::kFlat;
  double delta_g = 0.3;
  PlaneFitOptions plane_fit;
  double pointset_sigma = 0.03;
  // Inputs.
  double disparity_scale = 256.0;
  ClassMap class_map = DefaultClassMap();
  EvaluationParams evaluation;
  SynthSettings synth;
  int workers = 1;

  // Throws ConfigError.
  void Check() const;
  // Copies `workers` into every stage.
  void SetWorkers(int n);
};

// Defaults for a sensor kind, including sensor-specific grids and ISM widths.
PipelineConfig DefaultConfig(SensorKind kind);

// Line-oriented "key = value" text; '#' starts a comment. Unknown keys and
// malformed values throw ConfigError naming the line.
PipelineConfig ParseConfig(std::istream& in);
PipelineConfig LoadConfig(const std::string& path);
// Every accepted key with a one-line description, for documentation.
std::vector<std::pair<std::string, std::string>> ConfigKeys();

// Error raised by RunPipeline, naming the failing stage.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Image path with a reusable warp table.
class ImagePipeline {
 public:
  explicit ImagePipeline(PipelineConfig config);
  const PipelineConfig& config() const { return config_; }
  const WarpTable& table() const { return table_; }

  DerivedImages Derive(const SensorReading& reading) const;
  LayeredGrid MeasurementGrid(const SensorReading& reading,
                              const DerivedImages& derived) const;
  LayeredGrid Map(const SensorReading& reading) const;

 private:
  PipelineConfig config_;
  WarpTable table_;
};

// Point-set path in the vehicle frame.
LayeredGrid MapPointSet(const LabeledPointSet& set, const PipelineConfig& config);

// Sensor-frame point set (as stored on disk) to the vehicle frame.
LabeledPointSet SensorToVehicleFrame(const LabeledPointSet& set,
                                     const Extrinsics& extrinsics);
LabeledPointSet VehicleToSensorFrame(const LabeledPointSet& set,
                                     const Extrinsics& extrinsics);

enum class PipelineMode { kLidar, kStereo, kPoints };

struct PipelineInputs {
  PipelineMode mode = PipelineMode::kLidar;
  std::string input;                  // point cloud or disparity image
  std::optional<std::string> labels;  // label file or label image
};

LayeredGrid RunPipeline(const PipelineConfig& config,
                        const PipelineInputs& inputs);

// Synthetic reading of frame k (vehicle moved by k * step_x along x).
Rendering RenderFrame(const Scene& scene, const PipelineConfig& config, int k);

// Evaluates every configured method on a synthetic sequence.
std::vector<FrameEvaluation> EvaluateSequence(const Scene& scene,
                                              const PipelineConfig& config,
                                              bool pointset_path = false);

}  // namespace evgrid

#endif  // EVGRID_PIPELINE_H_
