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

#ifndef EVGRID_SENSOR_IMAGE_H_
#define EVGRID_SENSOR_IMAGE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "Eigen/Core"
#include "evgrid/common.h"
#include "evgrid/evidential.h"
#include "evgrid/grid.h"

namespace evgrid {

// Dense row-major image; row 0 is the top row.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int rows, int cols, const T& fill = T())
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  T& operator()(int v, int u) { return data_[Offset(v, u)]; }
  const T& operator()(int v, int u) const { return data_[Offset(v, u)]; }
  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  bool SameShape(int rows, int cols) const {
    return rows_ == rows && cols_ == cols;
  }

 private:
  std::size_t Offset(int v, int u) const {
    return static_cast<std::size_t>(v) * cols_ + u;
  }
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using Vec3 = Eigen::Vector3d;

inline Vec3 UnknownPoint() { return Vec3::Constant(kUnknown); }
inline bool IsKnown(const Vec3& p) { return !std::isnan(p.x()); }

enum class SensorKind : std::uint8_t { kLidar, kStereo, kDepthCamera };

// Rotating LiDAR: row v looks at elevation
// fov_up - (v + 0.5) * (fov_up - fov_down) / rows, column u at azimuth
// azimuth_offset + (u + 0.5) * 360 / cols (degrees, counter-clockwise from x).
struct LidarIntrinsics {
  double fov_up_deg = 2.0;
  double fov_down_deg = -24.8;
  double azimuth_offset_deg = 0.0;
};

// Pinhole camera; pixel centers sit at integer coordinates.
struct CameraIntrinsics {
  double focal_length = 700.0;  // px
  double principal_u = 0.0;
  double principal_v = 0.0;
  double baseline = 0.54;  // m, stereo only
};

struct Calibration {
  SensorKind kind = SensorKind::kLidar;
  int rows = 0;
  int cols = 0;
  LidarIntrinsics lidar;
  CameraIntrinsics camera;
  Extrinsics extrinsics;

  // Throws ConfigError.
  void Check() const;
  // Horizontal direction of column u in the sensor frame (rad).
  double ColumnAzimuth(int u) const;
  // Elevation of the ray through row v (rad); on the principal column for
  // cameras.
  double RowElevation(int v) const;
  // Vertical angle between adjacent rows (rad).
  double VerticalStep() const;
  // Unit ray direction of a pixel in the sensor frame.
  Vec3 RayDirection(int v, int u) const;
  // Sensor-frame point of a measurement; nullopt for unknown or invalid range.
  std::optional<Vec3> BackProject(int v, int u, double range) const;
  MeasurementGridKind GridKind() const;
  // Measurement-grid (u, r) coordinates of a sensor-frame point seen in
  // column u; nullopt when the point has no valid measurement coordinates.
  std::optional<Eigen::Vector2d> ToMeasurement(int u, const Vec3& p) const;
  // Sensor-frame point from planar distance and height in column u.
  Vec3 PointFromHeightDist(int u, double height, double dist_xy) const;
};

// Organized measurement. The range channel holds metric range (LiDAR),
// disparity (stereo) or depth (depth camera); kUnknown marks missing pixels.
struct SensorReading {
  Calibration calibration;
  Image<double> range;
  Image<SemanticLabel> semantic;  // optional
  Image<double> confidence;       // optional, p_omega per pixel

  // Throws ConfigError on shape mismatch or invalid calibration.
  void Check() const;
};

struct HeightDistImages {
  Image<double> height;   // relative to the sensor origin (m)
  Image<double> dist_xy;  // planar distance to the sensor origin (m)
};

HeightDistImages SplitRangeImage(const SensorReading& reading);

struct BilateralParams {
  double sigma_range = 0.1;    // value units
  double sigma_spatial = 1.5;  // px
  int radius = 2;
};

// Edge-preserving smoothing; unknown pixels carry no weight and stay unknown.
// With wrap_columns the image is treated as cyclic horizontally.
Image<double> BilateralFilter(const Image<double>& image,
                              const BilateralParams& params,
                              bool wrap_columns = false, int workers = 1);

struct PixelIndex {
  int v = 0;
  int u = 0;
  bool operator==(const PixelIndex&) const = default;
};

struct Neighbors {
  PixelIndex horizontal;
  PixelIndex vertical;
};

// Picks the nearer (in 3-D) of the left/right and of the below/above
// candidates, widening the search up to max_offset pixels. Ties go to right
// and below.
std::optional<Neighbors> SelectNeighbors(const Image<Vec3>& points,
                                         PixelIndex pixel, int max_offset = 3,
                                         bool wrap_columns = false);

// Normalized (p_h - p) x (p_v - p), oriented towards `origin`. nullopt for
// (near-)collinear input.
std::optional<Vec3> SurfaceNormal(const Vec3& p, const Vec3& p_h,
                                  const Vec3& p_v,
                                  const Vec3& origin = Vec3::Zero());

double OccupancyWeight(double n3, double slope);
double NormalConfidence(double d_h, double d_v, double sigma_range,
                        double slope);
double OccupancyProbability(double confidence, double weight);

struct GroundImages {
  Image<double> ground;            // height above propagated ground (m)
  Image<std::uint8_t> is_ground;   // ground-classified pixels
};

// Column-wise, bottom-to-top ground classification and height propagation.
// `points` are sensor-frame points, `normals` unit normals (unknown where
// unavailable); sensor_height is the mounting height above the ground.
GroundImages GroundHeightImage(const Image<Vec3>& points,
                               const Image<Vec3>& normals,
                               double sensor_height,
                               double bottom_row_threshold = 0.5,
                               int workers = 1);

struct ProcessingParams {
  BilateralParams height_filter;
  BilateralParams dist_xy_filter;
  int max_neighbor_offset = 3;
  double occupancy_slope = 10.0;   // k, 1/rad
  double confidence_slope = 50.0;  // k', 1/m
  double lidar_sigma_range = 0.03;  // m
  double disparity_error = 1.0;     // px, for camera range uncertainty
  double bottom_row_threshold = 0.5;  // m
  int workers = 1;
};

struct DerivedImages {
  Image<double> height;   // filtered
  Image<double> dist_xy;  // filtered
  Image<Vec3> points;     // sensor frame, from the filtered images
  Image<Vec3> normals;
  Image<double> neighbor_distance;  // min(|p_h - p|, |p_v - p|)
  Image<double> occupancy;          // f_occ
  Image<double> ground;             // f_ground
  Image<std::uint8_t> is_ground;
};

// Range uncertainty of one pixel used by the normal confidence.
double SigmaRange(const Calibration& calibration, const ProcessingParams& params,
                  const Vec3& point);

DerivedImages ComputeDerivedImages(const SensorReading& reading,
                                   const ProcessingParams& params);

}  // namespace evgrid

#endif  // EVGRID_SENSOR_IMAGE_H_
