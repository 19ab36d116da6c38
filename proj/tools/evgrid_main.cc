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

// Command-line driver: map-lidar, map-stereo, map-points, render, eval, synth.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evgrid/pipeline.h"

namespace {

using evgrid::PipelineConfig;

struct Common {
  std::string config_path;
  std::string output;
  int workers = 0;
};

PipelineConfig ConfigFor(const Common& common) {
  PipelineConfig config = common.config_path.empty()
                              ? evgrid::DefaultConfig(evgrid::SensorKind::kLidar)
                              : evgrid::LoadConfig(common.config_path);
  if (common.workers > 0) config.SetWorkers(common.workers);
  return config;
}

evgrid::VisualizationMode ParseMode(const std::string& mode) {
  if (mode == "occupancy") return evgrid::VisualizationMode::kOccupancy;
  if (mode == "semantic") return evgrid::VisualizationMode::kSemantic;
  throw CLI::ValidationError("--mode", "expected occupancy or semantic");
}

void AddCommon(CLI::App* cmd, Common& common, bool output_required) {
  cmd->add_option("--config", common.config_path, "Pipeline configuration file")
      ->check(CLI::ExistingFile);
  auto* out = cmd->add_option("--output", common.output, "Output path");
  if (output_required) out->required();
  cmd->add_option("--workers", common.workers, "Worker threads (overrides config)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evidential top-view grid mapping from range images and point sets"};
  app.require_subcommand(1);

  Common common;
  std::string input;
  std::optional<std::string> labels;
  std::string render_path;
  std::string mode = "semantic";

  auto add_map = [&](const std::string& name, const std::string& help) {
    auto* cmd = app.add_subcommand(name, help);
    AddCommon(cmd, common, true);
    cmd->add_option("input", input, "Input file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--labels", labels, "Label file or label image")
        ->check(CLI::ExistingFile);
    cmd->add_option("--render", render_path, "Also write a visualization");
    cmd->add_option("--mode", mode, "Visualization mode: occupancy | semantic");
    return cmd;
  };
  auto* map_lidar = add_map("map-lidar", "LiDAR point cloud through the range-image path");
  auto* map_stereo = add_map("map-stereo", "Disparity image through the image path");
  auto* map_points = add_map("map-points", "Point cloud through the point-set path");

  auto* render = app.add_subcommand("render", "Render a grid map file");
  AddCommon(render, common, true);
  render->add_option("input", input, "Grid map (.evgm)")->required()->check(CLI::ExistingFile);
  render->add_option("--mode", mode, "occupancy | semantic");

  std::string scene_path;
  bool pointset = false;
  auto* eval = app.add_subcommand("eval", "Confusion rates of the occupancy methods");
  AddCommon(eval, common, true);
  eval->add_option("--scene", scene_path, "Synthetic scene file")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_flag("--pointset", pointset, "Evaluate the point-set path");

  int frame = 0;
  std::string truth_path;
  auto* synth = app.add_subcommand("synth", "Render a synthetic measurement");
  AddCommon(synth, common, true);
  synth->add_option("--scene", scene_path, "Scene file")->required()->check(CLI::ExistingFile);
  synth->add_option("--frame", frame, "Frame index of the sequence");
  synth->add_option("--truth", truth_path, "Also write the true cell states (.evgm)");

  CLI11_PARSE(app, argc, argv);

  try {
    const PipelineConfig config = ConfigFor(common);
    if (app.got_subcommand(map_lidar) || app.got_subcommand(map_stereo) ||
        app.got_subcommand(map_points)) {
      evgrid::PipelineInputs inputs;
      inputs.mode = app.got_subcommand(map_lidar)    ? evgrid::PipelineMode::kLidar
                    : app.got_subcommand(map_stereo) ? evgrid::PipelineMode::kStereo
                                                     : evgrid::PipelineMode::kPoints;
      inputs.input = input;
      inputs.labels = labels;
      const evgrid::LayeredGrid map = evgrid::RunPipeline(config, inputs);
      evgrid::SaveGridMap(common.output, map);
      if (!render_path.empty()) {
        evgrid::SaveImage(render_path, evgrid::RenderVisualization(map, ParseMode(mode)));
      }
    } else if (app.got_subcommand(render)) {
      const evgrid::LayeredGrid map = evgrid::LoadGridMap(input);
      evgrid::SaveImage(common.output, evgrid::RenderVisualization(map, ParseMode(mode)));
    } else if (app.got_subcommand(eval)) {
      const evgrid::Scene scene = evgrid::LoadScene(scene_path);
      const auto frames = evgrid::EvaluateSequence(scene, config, pointset);
      std::ofstream out(common.output);
      if (!out) throw std::runtime_error("cannot write '" + common.output + "'");
      out << std::setprecision(10);
      evgrid::WriteRatesCsvHeader(out);
      for (std::size_t k = 0; k < frames.size(); ++k) {
        evgrid::WriteRatesCsv(out, static_cast<int>(k), frames[k]);
      }
    } else if (app.got_subcommand(synth)) {
      const evgrid::Scene scene = evgrid::LoadScene(scene_path);
      const evgrid::Rendering r = evgrid::RenderFrame(scene, config, frame);
      const auto& calib = config.calibration;
      if (calib.kind == evgrid::SensorKind::kLidar) {
        const auto set = evgrid::VehicleToSensorFrame(evgrid::ToPointSet(r),
                                                      calib.extrinsics);
        evgrid::SavePointCloud(common.output, set,
                               evgrid::CompanionLabelPath(common.output),
                               config.class_map);
      } else {
        evgrid::SaveDisparityImage(common.output, r.reading.range,
                                   config.disparity_scale);
        evgrid::SaveLabelImage(common.output + ".labels.png", r.reading.semantic,
                               config.class_map);
      }
      if (!truth_path.empty()) {
        evgrid::VehiclePose pose = config.synth.pose;
        pose.position.x() += frame * config.synth.step_x;
        const auto states = evgrid::TrueGrid(scene, config.cartesian_grid,
                                             config.mapping.corridors, pose);
        evgrid::LayeredGrid truth(config.cartesian_grid,
                                  {"truth.free", "truth.occupied", "truth.void"});
        for (std::size_t c = 0; c < states.size(); ++c) {
          truth.layer(static_cast<int>(states[c]))[c] = 1.0;
        }
        evgrid::SaveGridMap(truth_path, truth);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "evgrid: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
