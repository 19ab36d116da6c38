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

#include "evgrid/pipeline.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace evgrid {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ToDouble(const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(out)) {
    throw ConfigError("expected a number, got '" + v + "'");
  }
  return out;
}

long long ToInteger(const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("expected an integer, got '" + v + "'");
  }
  return out;
}

int ToInt(const std::string& v) {
  const long long x = ToInteger(v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw ConfigError("integer out of range: '" + v + "'");
  }
  return static_cast<int>(x);
}

SensorKind ParseSensorKind(const std::string& v) {
  if (v == "lidar") return SensorKind::kLidar;
  if (v == "stereo") return SensorKind::kStereo;
  if (v == "depth") return SensorKind::kDepthCamera;
  throw ConfigError("sensor.kind must be lidar, stereo or depth, got '" + v + "'");
}

InverseSensorModel ParseIsm(const std::string& v, const InverseSensorModel& current) {
  if (v == "gaussian") {
    if (const auto* g = std::get_if<GaussianIsm>(&current)) return *g;
    return GaussianIsm{};
  }
  if (v == "interval") return IntervalIsm{};
  throw ConfigError("ISM must be gaussian or interval, got '" + v + "'");
}

struct Setter {
  std::string description;
  std::function<void(PipelineConfig&, const std::string&)> apply;
};

template <typename Field>
Setter Number(std::string description, Field field) {
  return {std::move(description),
          [field](PipelineConfig& c, const std::string& v) { field(c) = ToDouble(v); }};
}

template <typename Field>
Setter Integer(std::string description, Field field) {
  return {std::move(description),
          [field](PipelineConfig& c, const std::string& v) { field(c) = ToInt(v); }};
}

// Ordered so the documentation lists keys by section.
const std::vector<std::pair<std::string, Setter>>& Setters() {
  using C = PipelineConfig;
  static const std::vector<std::pair<std::string, Setter>> kSetters = {
      {"sensor.kind", {"lidar | stereo | depth; selects the defaults", nullptr}},
      {"sensor.rows", Integer("image rows", [](C& c) -> int& { return c.calibration.rows; })},
      {"sensor.cols", Integer("image columns", [](C& c) -> int& { return c.calibration.cols; })},
      {"lidar.fov_up", Number("upper vertical field-of-view limit (deg)",
                              [](C& c) -> double& { return c.calibration.lidar.fov_up_deg; })},
      {"lidar.fov_down", Number("lower vertical field-of-view limit (deg)",
                                [](C& c) -> double& { return c.calibration.lidar.fov_down_deg; })},
      {"lidar.azimuth_offset", Number("azimuth of the left edge of column 0 (deg)",
                                      [](C& c) -> double& { return c.calibration.lidar.azimuth_offset_deg; })},
      {"camera.focal_length", Number("focal length (px)",
                                     [](C& c) -> double& { return c.calibration.camera.focal_length; })},
      {"camera.principal_u", Number("principal point column (px)",
                                    [](C& c) -> double& { return c.calibration.camera.principal_u; })},
      {"camera.principal_v", Number("principal point row (px)",
                                    [](C& c) -> double& { return c.calibration.camera.principal_v; })},
      {"camera.baseline", Number("stereo baseline (m)",
                                 [](C& c) -> double& { return c.calibration.camera.baseline; })},
      {"extrinsics.x", Number("sensor x in the vehicle frame (m)",
                              [](C& c) -> double& { return c.calibration.extrinsics.x; })},
      {"extrinsics.y", Number("sensor y in the vehicle frame (m)",
                              [](C& c) -> double& { return c.calibration.extrinsics.y; })},
      {"extrinsics.z", Number("sensor height above the ground (m)",
                              [](C& c) -> double& { return c.calibration.extrinsics.z; })},
      {"extrinsics.yaw", {"sensor heading in the vehicle frame (deg)",
                          [](C& c, const std::string& v) {
                            c.calibration.extrinsics.yaw = DegToRad(ToDouble(v));
                          }}},
      {"measurement_grid.origin_u", Number("first column coordinate",
                                           [](C& c) -> double& { return c.measurement_grid.origin[0]; })},
      {"measurement_grid.origin_r", Number("first range coordinate",
                                           [](C& c) -> double& { return c.measurement_grid.origin[1]; })},
      {"measurement_grid.resolution_u", Number("column cell width",
                                               [](C& c) -> double& { return c.measurement_grid.resolution[0]; })},
      {"measurement_grid.resolution_r", Number("range cell width",
                                               [](C& c) -> double& { return c.measurement_grid.resolution[1]; })},
      {"measurement_grid.size_u", Integer("number of columns",
                                          [](C& c) -> int& { return c.measurement_grid.size[0]; })},
      {"measurement_grid.size_r", Integer("number of range cells",
                                          [](C& c) -> int& { return c.measurement_grid.size[1]; })},
      {"cartesian_grid.origin_x", Number("lower x bound (m)",
                                         [](C& c) -> double& { return c.cartesian_grid.origin[0]; })},
      {"cartesian_grid.origin_y", Number("lower y bound (m)",
                                         [](C& c) -> double& { return c.cartesian_grid.origin[1]; })},
      {"cartesian_grid.resolution_x", Number("cell size along x (m)",
                                             [](C& c) -> double& { return c.cartesian_grid.resolution[0]; })},
      {"cartesian_grid.resolution_y", Number("cell size along y (m)",
                                             [](C& c) -> double& { return c.cartesian_grid.resolution[1]; })},
      {"cartesian_grid.size_x", Integer("cells along x",
                                        [](C& c) -> int& { return c.cartesian_grid.size[0]; })},
      {"cartesian_grid.size_y", Integer("cells along y",
                                        [](C& c) -> int& { return c.cartesian_grid.size[1]; })},
      {"corridors.d_z_max", Number("driving-corridor ceiling (m)",
                                   [](C& c) -> double& { return c.mapping.corridors.d_z_max; })},
      {"corridors.f_z_min", Number("free-space corridor floor (m)",
                                   [](C& c) -> double& { return c.mapping.corridors.f_z_min; })},
      {"corridors.f_z_max", Number("free-space corridor ceiling (m)",
                                   [](C& c) -> double& { return c.mapping.corridors.f_z_max; })},
      {"corridors.r_max", Number("maximum free-space range (m)",
                                 [](C& c) -> double& { return c.mapping.corridors.r_max; })},
      {"ism.object", {"gaussian", [](C& c, const std::string& v) {
                        c.mapping.object_ism = ParseIsm(v, c.mapping.object_ism);
                      }}},
      {"ism.ground", {"gaussian | interval (interval: cameras only)",
                      [](C& c, const std::string& v) {
                        c.mapping.ground_ism = ParseIsm(v, c.mapping.ground_ism);
                      }}},
      {"ism.sigma", {"Gaussian range deviation in measurement-grid range units",
                     [](C& c, const std::string& v) {
                       const double s = ToDouble(v);
                       for (auto* ism : {&c.mapping.object_ism, &c.mapping.ground_ism}) {
                         if (auto* g = std::get_if<GaussianIsm>(ism)) g->sigma = s;
                       }
                     }}},
      {"ism.sigma_per_range", {"additional deviation per unit of range",
                               [](C& c, const std::string& v) {
                                 const double s = ToDouble(v);
                                 for (auto* ism : {&c.mapping.object_ism, &c.mapping.ground_ism}) {
                                   if (auto* g = std::get_if<GaussianIsm>(ism)) g->sigma_per_range = s;
                                 }
                               }}},
      {"mapping.p_fp", Number("sensor false-positive rate",
                              [](C& c) -> double& { return c.mapping.p_fp; })},
      {"filter.height.sigma_range", Number("bilateral range deviation of the height image (m)",
                                           [](C& c) -> double& { return c.processing.height_filter.sigma_range; })},
      {"filter.height.sigma_spatial", Number("bilateral spatial deviation of the height image (px)",
                                             [](C& c) -> double& { return c.processing.height_filter.sigma_spatial; })},
      {"filter.height.radius", Integer("bilateral window radius of the height image (px)",
                                       [](C& c) -> int& { return c.processing.height_filter.radius; })},
      {"filter.dist_xy.sigma_range", Number("bilateral range deviation of the distance image (m)",
                                            [](C& c) -> double& { return c.processing.dist_xy_filter.sigma_range; })},
      {"filter.dist_xy.sigma_spatial", Number("bilateral spatial deviation of the distance image (px)",
                                              [](C& c) -> double& { return c.processing.dist_xy_filter.sigma_spatial; })},
      {"filter.dist_xy.radius", Integer("bilateral window radius of the distance image (px)",
                                        [](C& c) -> int& { return c.processing.dist_xy_filter.radius; })},
      {"normals.max_neighbor_offset", Integer("neighbor search reach (px)",
                                              [](C& c) -> int& { return c.processing.max_neighbor_offset; })},
      {"normals.occupancy_slope", Number("logistic slope of the orientation weight (1/rad)",
                                         [](C& c) -> double& { return c.processing.occupancy_slope; })},
      {"normals.confidence_slope", Number("logistic slope of the normal confidence (1/m)",
                                          [](C& c) -> double& { return c.processing.confidence_slope; })},
      {"normals.lidar_sigma_range", Number("LiDAR range deviation (m)",
                                           [](C& c) -> double& { return c.processing.lidar_sigma_range; })},
      {"normals.disparity_error", Number("camera disparity deviation (px)",
                                         [](C& c) -> double& { return c.processing.disparity_error; })},
      {"ground.bottom_row_threshold", Number("height offset marking the lowest pixel as obstacle (m)",
                                             [](C& c) -> double& { return c.processing.bottom_row_threshold; })},
      {"pointset.ground_model", {"flat | fitted_plane", [](C& c, const std::string& v) {
                                   if (v == "flat") {
                                     c.ground_model = GroundModelKind::kFlat;
                                   } else if (v == "fitted_plane") {
                                     c.ground_model = GroundModelKind::kFittedPlane;
                                   } else {
                                     throw ConfigError("unknown ground model '" + v + "'");
                                   }
                                 }}},
      {"pointset.delta_g", Number("ground tolerance margin (m)",
                                  [](C& c) -> double& { return c.delta_g; })},
      {"pointset.sigma", Number("point position deviation (m)",
                                [](C& c) -> double& { return c.pointset_sigma; })},
      {"plane_fit.cell_size", Number("candidate cell size (m)",
                                     [](C& c) -> double& { return c.plane_fit.cell_size; })},
      {"plane_fit.refit_iterations", Integer("outlier rejection rounds",
                                             [](C& c) -> int& { return c.plane_fit.refit_iterations; })},
      {"plane_fit.inlier_threshold", Number("residual bound for inliers (m)",
                                            [](C& c) -> double& { return c.plane_fit.inlier_threshold; })},
      {"warp.min_subsamples", Integer("minimum samples per source-cell side",
                                      [](C& c) -> int& { return c.warp.min_subsamples; })},
      {"warp.max_subsamples", Integer("maximum samples per source-cell side",
                                      [](C& c) -> int& { return c.warp.max_subsamples; })},
      {"input.disparity_scale", Number("raw disparity units per pixel",
                                       [](C& c) -> double& { return c.disparity_scale; })},
      {"evaluation.methods", {"comma-separated subset of flat, fitted_plane, normals",
                              [](C& c, const std::string& v) {
                                c.evaluation.methods.clear();
                                std::stringstream ss(v);
                                std::string item;
                                while (std::getline(ss, item, ',')) {
                                  item = Trim(item);
                                  if (item == "flat") {
                                    c.evaluation.methods.push_back(OccupancyMethod::kFlat);
                                  } else if (item == "fitted_plane") {
                                    c.evaluation.methods.push_back(OccupancyMethod::kFittedPlane);
                                  } else if (item == "normals") {
                                    c.evaluation.methods.push_back(OccupancyMethod::kNormals);
                                  } else {
                                    throw ConfigError("unknown method '" + item + "'");
                                  }
                                }
                              }}},
      {"synth.pose_x", Number("vehicle x in the world at frame 0 (m)",
                              [](C& c) -> double& { return c.synth.pose.position.x(); })},
      {"synth.pose_y", Number("vehicle y in the world (m)",
                              [](C& c) -> double& { return c.synth.pose.position.y(); })},
      {"synth.pose_z", Number("vehicle z in the world (m)",
                              [](C& c) -> double& { return c.synth.pose.position.z(); })},
      {"synth.pose_yaw", {"vehicle heading in the world (deg)",
                          [](C& c, const std::string& v) { c.synth.pose.yaw = DegToRad(ToDouble(v)); }}},
      {"synth.step_x", Number("vehicle displacement per frame along world x (m)",
                              [](C& c) -> double& { return c.synth.step_x; })},
      {"synth.frames", Integer("number of frames", [](C& c) -> int& { return c.synth.frames; })},
      {"synth.noise_sigma", Number("additive noise on the range channel",
                                   [](C& c) -> double& { return c.synth.noise_sigma; })},
      {"synth.seed", {"noise seed", [](C& c, const std::string& v) {
                        const long long s = ToInteger(v);
                        if (s < 0) throw ConfigError("seed must be >= 0");
                        c.synth.seed = static_cast<std::uint64_t>(s);
                      }}},
      {"synth.max_range", Number("longest rendered ray (m)",
                                 [](C& c) -> double& { return c.synth.max_range; })},
      {"run.workers", {"worker threads", [](C& c, const std::string& v) { c.SetWorkers(ToInt(v)); }}},
  };
  return kSetters;
}

template <typename Fn>
auto Stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what());
  }
}

GroundModel BuildGroundModel(const LabeledPointSet& set,
                             const PipelineConfig& config) {
  if (config.ground_model == GroundModelKind::kFlat) {
    return GroundModel::Flat(config.delta_g);
  }
  PlaneFitOptions fit = config.plane_fit;
  fit.tolerance = config.delta_g;
  auto model = FitPlane(set.points, fit);
  if (!model) throw std::runtime_error("ground plane fit failed");
  return *model;
}

WarpTable CheckedTable(const PipelineConfig& config) {
  config.Check();
  return WarpTable::Build(config.calibration.GridKind(), config.measurement_grid,
                          config.cartesian_grid, config.warp);
}

PointsetParams PointsetParamsOf(const PipelineConfig& config) {
  return {GaussianIsm{config.pointset_sigma, 0.0}, config.mapping.corridors,
          config.mapping.p_fp};
}

}  // namespace

void PipelineConfig::Check() const {
  calibration.Check();
  measurement_grid.Check();
  cartesian_grid.Check();
  mapping.Check(calibration.kind);
  if (processing.max_neighbor_offset < 1) {
    throw ConfigError("normals.max_neighbor_offset must be >= 1");
  }
  if (!(processing.occupancy_slope > 0.0) || !(processing.confidence_slope > 0.0)) {
    throw ConfigError("logistic slopes must be > 0");
  }
  if (!(processing.lidar_sigma_range >= 0.0) || !(processing.disparity_error >= 0.0)) {
    throw ConfigError("range deviations must be >= 0");
  }
  for (const auto* f : {&processing.height_filter, &processing.dist_xy_filter}) {
    if (f->radius < 1 || !(f->sigma_range > 0.0) || !(f->sigma_spatial > 0.0)) {
      throw ConfigError("bilateral filter needs radius >= 1 and positive sigmas");
    }
  }
  if (warp.min_subsamples < 1 || warp.max_subsamples < warp.min_subsamples) {
    throw ConfigError("warp subsamples need 1 <= min <= max");
  }
  if (!(delta_g >= 0.0)) throw ConfigError("pointset.delta_g must be >= 0");
  if (!(pointset_sigma > 0.0)) throw ConfigError("pointset.sigma must be > 0");
  if (!(disparity_scale > 0.0)) throw ConfigError("disparity scale must be > 0");
  if (synth.frames < 1) throw ConfigError("synth.frames must be >= 1");
  if (!(synth.noise_sigma >= 0.0)) throw ConfigError("synth.noise_sigma must be >= 0");
  if (workers < 1) throw ConfigError("run.workers must be >= 1");
}

void PipelineConfig::SetWorkers(int n) {
  workers = n;
  processing.workers = n;
  mapping.workers = n;
  warp.workers = n;
}

PipelineConfig DefaultConfig(SensorKind kind) {
  PipelineConfig c;
  c.calibration.kind = kind;
  c.cartesian_grid = GridSpec{{-50.0, -50.0}, {0.5, 0.5}, {200, 200}};
  if (kind == SensorKind::kLidar) {
    c.calibration.rows = 64;
    c.calibration.cols = 2000;
    c.calibration.extrinsics.z = 1.73;
    c.measurement_grid = GridSpec{{0.0, 0.0}, {0.5, 0.2}, {720, 250}};
    c.mapping.object_ism = GaussianIsm{0.03, 0.0};
    c.mapping.ground_ism = GaussianIsm{0.03, 0.0};
  } else {
    c.calibration.rows = 375;
    c.calibration.cols = 1242;
    c.calibration.camera = {721.5, 609.6, 172.9, 0.54};
    c.calibration.extrinsics.z = 1.65;
    c.cartesian_grid = GridSpec{{0.0, -40.0}, {0.5, 0.5}, {160, 160}};
    if (kind == SensorKind::kStereo) {
      c.measurement_grid = GridSpec{{-0.5, 1.0}, {1.0, 0.5}, {1242, 256}};
      c.mapping.object_ism = GaussianIsm{0.5, 0.0};
      c.mapping.ground_ism = GaussianIsm{0.5, 0.0};
    } else {
      c.measurement_grid = GridSpec{{-0.5, 0.0}, {1.0, 0.2}, {1242, 250}};
      c.mapping.object_ism = GaussianIsm{0.05, 0.0};
      c.mapping.ground_ism = GaussianIsm{0.05, 0.0};
    }
  }
  return c;
}

PipelineConfig ParseConfig(std::istream& in) {
  struct Entry {
    std::string key;
    std::string value;
    int line;
  };
  std::vector<Entry> entries;
  std::string line;
  int number = 0;
  std::optional<SensorKind> kind;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) +
                        ": expected 'key = value'");
    }
    Entry e{Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)), number};
    if (e.key.empty() || e.value.empty()) {
      throw ConfigError("config line " + std::to_string(number) +
                        ": empty key or value");
    }
    if (e.key == "sensor.kind") {
      try {
        kind = ParseSensorKind(e.value);
      } catch (const ConfigError& err) {
        throw ConfigError("config line " + std::to_string(number) + ": " + err.what());
      }
    }
    entries.push_back(std::move(e));
  }
  PipelineConfig config = DefaultConfig(kind.value_or(SensorKind::kLidar));
  bool size_u_set = false;
  bool origin_u_set = false;
  std::map<std::string, int> seen;
  for (const Entry& e : entries) {
    const std::string where = "config line " + std::to_string(e.line) + ": ";
    if (auto [it, fresh] = seen.emplace(e.key, e.line); !fresh) {
      throw ConfigError(where + "duplicate key '" + e.key + "' (first on line " +
                        std::to_string(it->second) + ")");
    }
    if (e.key == "sensor.kind") continue;
    try {
      if (e.key.rfind("classmap.", 0) == 0) {
        const long long id = ToInteger(e.key.substr(9));
        if (id < 0 || id > 0xFFFF) throw ConfigError("class id out of range");
        const auto label = ParseLabel(e.value);
        if (!label) throw ConfigError("unknown label '" + e.value + "'");
        config.class_map[static_cast<std::uint16_t>(id)] = *label;
        continue;
      }
      const auto& setters = Setters();
      const auto it = std::find_if(setters.begin(), setters.end(),
                                   [&](const auto& s) { return s.first == e.key; });
      if (it == setters.end()) throw ConfigError("unknown key '" + e.key + "'");
      it->second.apply(config, e.value);
      size_u_set |= e.key == "measurement_grid.size_u";
      origin_u_set |= e.key == "measurement_grid.origin_u";
    } catch (const ConfigError& err) {
      throw ConfigError(where + err.what());
    }
  }
  // Camera grids default to one column per image column.
  if (config.calibration.kind != SensorKind::kLidar) {
    if (!size_u_set) config.measurement_grid.size[0] = config.calibration.cols;
    if (!origin_u_set) config.measurement_grid.origin[0] = -0.5;
  }
  config.Check();
  return config;
}

PipelineConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  try {
    return ParseConfig(in);
  } catch (const ConfigError& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

std::vector<std::pair<std::string, std::string>> ConfigKeys() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, setter] : Setters()) out.push_back({key, setter.description});
  out.push_back({"classmap.<id>", "dataset class id to label override"});
  return out;
}

ImagePipeline::ImagePipeline(PipelineConfig config)
    : config_(std::move(config)), table_(CheckedTable(config_)) {}

DerivedImages ImagePipeline::Derive(const SensorReading& reading) const {
  return ComputeDerivedImages(reading, config_.processing);
}

LayeredGrid ImagePipeline::MeasurementGrid(const SensorReading& reading,
                                           const DerivedImages& derived) const {
  return Accumulate(reading, derived, config_.measurement_grid, config_.mapping);
}

LayeredGrid ImagePipeline::Map(const SensorReading& reading) const {
  const DerivedImages derived = Stage("derive", [&] { return Derive(reading); });
  const LayeredGrid h =
      Stage("accumulate", [&] { return MeasurementGrid(reading, derived); });
  return Stage("finalize", [&] { return Finalize(h, table_, config_.workers); });
}

LayeredGrid MapPointSet(const LabeledPointSet& set, const PipelineConfig& config) {
  const GroundModel model = Stage("ground", [&] { return BuildGroundModel(set, config); });
  return Stage("accumulate", [&] {
    return PointsetToGrid(set, model, config.cartesian_grid, PointsetParamsOf(config));
  });
}

LabeledPointSet SensorToVehicleFrame(const LabeledPointSet& set,
                                     const Extrinsics& extrinsics) {
  LabeledPointSet out = set;
  for (auto& p : out.points) {
    const Eigen::Vector2d xy =
        extrinsics.SensorToVehicle({p.position.x(), p.position.y()});
    p.position = Vec3(xy.x(), xy.y(), p.position.z() + extrinsics.z);
  }
  out.sensor_origin = Vec3(extrinsics.x, extrinsics.y, extrinsics.z);
  return out;
}

LabeledPointSet VehicleToSensorFrame(const LabeledPointSet& set,
                                     const Extrinsics& extrinsics) {
  LabeledPointSet out = set;
  for (auto& p : out.points) {
    const Eigen::Vector2d xy =
        extrinsics.VehicleToSensor({p.position.x(), p.position.y()});
    p.position = Vec3(xy.x(), xy.y(), p.position.z() - extrinsics.z);
  }
  out.sensor_origin = Vec3::Zero();
  return out;
}

LayeredGrid RunPipeline(const PipelineConfig& config, const PipelineInputs& inputs) {
  Stage("config", [&] { config.Check(); });
  const Calibration& calib = config.calibration;
  switch (inputs.mode) {
    case PipelineMode::kLidar:
    case PipelineMode::kPoints: {
      if (inputs.mode == PipelineMode::kLidar && calib.kind != SensorKind::kLidar) {
        throw PipelineError("config", "map-lidar needs sensor.kind = lidar");
      }
      const LabeledPointSet set = Stage("load", [&] {
        return SensorToVehicleFrame(
            LoadPointCloud(inputs.input, inputs.labels, config.class_map),
            calib.extrinsics);
      });
      if (inputs.mode == PipelineMode::kPoints) return MapPointSet(set, config);
      const SensorReading reading =
          Stage("project", [&] { return LidarToRangeImage(set, calib); });
      const ImagePipeline pipeline = Stage("warp", [&] { return ImagePipeline(config); });
      return pipeline.Map(reading);
    }
    case PipelineMode::kStereo: {
      if (calib.kind == SensorKind::kLidar) {
        throw PipelineError("config", "map-stereo needs a camera sensor.kind");
      }
      SensorReading reading;
      Stage("load", [&] {
        reading.calibration = calib;
        reading.range = LoadDisparityImage(inputs.input, config.disparity_scale);
        if (inputs.labels) reading.semantic = LoadLabelImage(*inputs.labels, config.class_map);
        reading.Check();
      });
      const ImagePipeline pipeline = Stage("warp", [&] { return ImagePipeline(config); });
      return pipeline.Map(reading);
    }
  }
  throw PipelineError("config", "unknown mode");
}

Rendering RenderFrame(const Scene& scene, const PipelineConfig& config, int k) {
  SensorModel sensor;
  sensor.calibration = config.calibration;
  sensor.pose = config.synth.pose;
  sensor.pose.position.x() += k * config.synth.step_x;
  sensor.noise_sigma = config.synth.noise_sigma;
  sensor.seed = config.synth.seed + static_cast<std::uint64_t>(k);
  sensor.max_range = config.synth.max_range;
  return Render(scene, sensor);
}

std::vector<FrameEvaluation> EvaluateSequence(const Scene& scene,
                                              const PipelineConfig& config,
                                              bool pointset_path) {
  config.Check();
  EvaluationParams params = config.evaluation;
  params.ground_tolerance = config.delta_g;
  params.plane_fit = config.plane_fit;
  std::vector<FrameEvaluation> frames;
  std::optional<ImagePipeline> pipeline;
  if (!pointset_path) pipeline.emplace(config);
  for (int k = 0; k < config.synth.frames; ++k) {
    const Rendering r = RenderFrame(scene, config, k);
    if (pointset_path) {
      frames.push_back(EvaluatePointSet(ToPointSet(r), config.cartesian_grid,
                                        PointsetParamsOf(config), params));
    } else {
      const DerivedImages derived = pipeline->Derive(r.reading);
      frames.push_back(EvaluateReading(r.reading, derived, pipeline->table(),
                                       config.mapping, params));
    }
  }
  return frames;
}

}  // namespace evgrid
