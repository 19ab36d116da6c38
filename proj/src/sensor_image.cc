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

#include "evgrid/sensor_image.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "Eigen/Geometry"

namespace evgrid {
namespace {

constexpr double kTieTolerance = 1e-9;

// Column index after a horizontal step, or -1 when leaving the image.
int StepColumn(int u, int step, int cols, bool wrap) {
  const int target = u + step;
  if (wrap) return ((target % cols) + cols) % cols;
  return (target >= 0 && target < cols) ? target : -1;
}

constexpr double kHeightDropMargin = 1e-6;  // m

}  // namespace

void Calibration::Check() const {
  if (rows < 1 || cols < 1) throw ConfigError("image dimensions must be >= 1");
  switch (kind) {
    case SensorKind::kLidar:
      if (!(lidar.fov_up_deg > lidar.fov_down_deg)) {
        throw ConfigError("lidar fov_up must exceed fov_down");
      }
      if (lidar.fov_up_deg > 90.0 || lidar.fov_down_deg < -90.0) {
        throw ConfigError("lidar vertical field of view exceeds +-90 deg");
      }
      break;
    case SensorKind::kStereo:
      if (!(camera.baseline > 0.0)) throw ConfigError("baseline must be > 0");
      [[fallthrough]];
    case SensorKind::kDepthCamera:
      if (!(camera.focal_length > 0.0)) {
        throw ConfigError("focal length must be > 0");
      }
      break;
  }
}

double Calibration::ColumnAzimuth(int u) const {
  if (kind == SensorKind::kLidar) {
    return DegToRad(lidar.azimuth_offset_deg + (u + 0.5) * 360.0 / cols);
  }
  return std::atan2(-(u - camera.principal_u), camera.focal_length);
}

double Calibration::RowElevation(int v) const {
  if (kind == SensorKind::kLidar) {
    return DegToRad(lidar.fov_up_deg -
                    (v + 0.5) * (lidar.fov_up_deg - lidar.fov_down_deg) / rows);
  }
  return std::atan2(-(v - camera.principal_v), camera.focal_length);
}

double Calibration::VerticalStep() const {
  if (kind == SensorKind::kLidar) {
    return DegToRad((lidar.fov_up_deg - lidar.fov_down_deg) / rows);
  }
  return 1.0 / camera.focal_length;
}

Vec3 Calibration::RayDirection(int v, int u) const {
  if (kind == SensorKind::kLidar) {
    const double el = RowElevation(v);
    const double az = ColumnAzimuth(u);
    return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
            std::sin(el)};
  }
  const double f = camera.focal_length;
  return Vec3(1.0, -(u - camera.principal_u) / f, -(v - camera.principal_v) / f)
      .normalized();
}

std::optional<Vec3> Calibration::BackProject(int v, int u, double range) const {
  if (!(range > 0.0) || !std::isfinite(range)) return std::nullopt;
  switch (kind) {
    case SensorKind::kLidar:
      return range * RayDirection(v, u);
    case SensorKind::kStereo:
    case SensorKind::kDepthCamera: {
      const double f = camera.focal_length;
      const double z = kind == SensorKind::kStereo
                           ? f * camera.baseline / range
                           : range;
      return Vec3(z, -(u - camera.principal_u) * z / f,
                  -(v - camera.principal_v) * z / f);
    }
  }
  return std::nullopt;
}

MeasurementGridKind Calibration::GridKind() const {
  switch (kind) {
    case SensorKind::kLidar:
      return PolarKind{extrinsics};
    case SensorKind::kStereo:
      return UDisparityKind{camera.focal_length, camera.baseline,
                            camera.principal_u, extrinsics};
    case SensorKind::kDepthCamera:
      return UDistanceKind{camera.focal_length, camera.principal_u, extrinsics};
  }
  return PolarKind{extrinsics};
}

std::optional<Eigen::Vector2d> Calibration::ToMeasurement(int u,
                                                          const Vec3& p) const {
  if (!IsKnown(p)) return std::nullopt;
  switch (kind) {
    case SensorKind::kLidar: {
      double az = RadToDeg(ColumnAzimuth(u));
      az = std::fmod(std::fmod(az, 360.0) + 360.0, 360.0);
      return Eigen::Vector2d(az, std::hypot(p.x(), p.y()));
    }
    case SensorKind::kStereo:
      if (!(p.x() > 0.0)) return std::nullopt;
      return Eigen::Vector2d(u, camera.focal_length * camera.baseline / p.x());
    case SensorKind::kDepthCamera:
      if (!(p.x() > 0.0)) return std::nullopt;
      return Eigen::Vector2d(u, p.x());
  }
  return std::nullopt;
}

Vec3 Calibration::PointFromHeightDist(int u, double height,
                                      double dist_xy) const {
  const double az = ColumnAzimuth(u);
  return {dist_xy * std::cos(az), dist_xy * std::sin(az), height};
}

void SensorReading::Check() const {
  calibration.Check();
  const int rows = calibration.rows;
  const int cols = calibration.cols;
  if (!range.SameShape(rows, cols)) {
    throw ConfigError("range image does not match calibration dimensions");
  }
  if (!semantic.empty() && !semantic.SameShape(rows, cols)) {
    throw ConfigError("semantic image does not match range image");
  }
  if (!confidence.empty() && !confidence.SameShape(rows, cols)) {
    throw ConfigError("confidence image does not match range image");
  }
}

HeightDistImages SplitRangeImage(const SensorReading& reading) {
  reading.Check();
  const Calibration& calib = reading.calibration;
  HeightDistImages out{Image<double>(calib.rows, calib.cols, kUnknown),
                       Image<double>(calib.rows, calib.cols, kUnknown)};
  for (int v = 0; v < calib.rows; ++v) {
    for (int u = 0; u < calib.cols; ++u) {
      const auto p = calib.BackProject(v, u, reading.range(v, u));
      if (!p) continue;
      out.height(v, u) = p->z();
      out.dist_xy(v, u) = std::hypot(p->x(), p->y());
    }
  }
  return out;
}

Image<double> BilateralFilter(const Image<double>& image,
                              const BilateralParams& params, bool wrap_columns,
                              int workers) {
  if (params.radius < 1) throw ConfigError("bilateral window radius < 1");
  if (!(params.sigma_range > 0.0) || !(params.sigma_spatial > 0.0)) {
    throw ConfigError("bilateral sigmas must be positive");
  }
  const int rows = image.rows();
  const int cols = image.cols();
  const int radius = params.radius;
  const int width = 2 * radius + 1;
  std::vector<double> spatial(static_cast<std::size_t>(width) * width);
  for (int dv = -radius; dv <= radius; ++dv) {
    for (int du = -radius; du <= radius; ++du) {
      spatial[(dv + radius) * width + du + radius] =
          std::exp(-(dv * dv + du * du) /
                   (2.0 * params.sigma_spatial * params.sigma_spatial));
    }
  }
  const double inv_two_sr2 =
      1.0 / (2.0 * params.sigma_range * params.sigma_range);

  Image<double> out(rows, cols, kUnknown);
  ParallelFor(rows, workers, [&](std::size_t v0, std::size_t v1) {
    for (int v = static_cast<int>(v0); v < static_cast<int>(v1); ++v) {
      for (int u = 0; u < cols; ++u) {
        const double center = image(v, u);
        if (!IsKnown(center)) continue;
        double sum = 0.0;
        double weight = 0.0;
        for (int dv = -radius; dv <= radius; ++dv) {
          const int vv = v + dv;
          if (vv < 0 || vv >= rows) continue;
          for (int du = -radius; du <= radius; ++du) {
            const int uu = StepColumn(u, du, cols, wrap_columns);
            if (uu < 0) continue;
            const double value = image(vv, uu);
            if (!IsKnown(value)) continue;
            const double diff = value - center;
            const double w = spatial[(dv + radius) * width + du + radius] *
                             std::exp(-diff * diff * inv_two_sr2);
            sum += w * value;
            weight += w;
          }
        }
        out(v, u) = sum / weight;
      }
    }
  });
  return out;
}

std::optional<Neighbors> SelectNeighbors(const Image<Vec3>& points,
                                         PixelIndex pixel, int max_offset,
                                         bool wrap_columns) {
  const int rows = points.rows();
  const int cols = points.cols();
  if (pixel.v < 0 || pixel.v >= rows || pixel.u < 0 || pixel.u >= cols) {
    return std::nullopt;
  }
  const Vec3& p = points(pixel.v, pixel.u);
  if (!IsKnown(p)) return std::nullopt;

  // Chooses between two candidates; `preferred` wins ties.
  auto pick = [&](std::optional<PixelIndex> preferred,
                  std::optional<PixelIndex> other) -> std::optional<PixelIndex> {
    if (preferred && !IsKnown(points(preferred->v, preferred->u))) {
      preferred.reset();
    }
    if (other && !IsKnown(points(other->v, other->u))) other.reset();
    if (preferred && other) {
      const double dp = (points(preferred->v, preferred->u) - p).norm();
      const double d_other = (points(other->v, other->u) - p).norm();
      return d_other < dp - kTieTolerance ? other : preferred;
    }
    return preferred ? preferred : other;
  };

  std::optional<PixelIndex> horizontal;
  std::optional<PixelIndex> vertical;
  for (int k = 1; k <= max_offset && !horizontal; ++k) {
    std::optional<PixelIndex> right;
    std::optional<PixelIndex> left;
    if (const int ur = StepColumn(pixel.u, k, cols, wrap_columns); ur >= 0 &&
        ur != pixel.u) {
      right = PixelIndex{pixel.v, ur};
    }
    if (const int ul = StepColumn(pixel.u, -k, cols, wrap_columns); ul >= 0 &&
        ul != pixel.u) {
      left = PixelIndex{pixel.v, ul};
    }
    horizontal = pick(right, left);
  }
  for (int k = 1; k <= max_offset && !vertical; ++k) {
    std::optional<PixelIndex> below;
    std::optional<PixelIndex> above;
    if (pixel.v + k < rows) below = PixelIndex{pixel.v + k, pixel.u};
    if (pixel.v - k >= 0) above = PixelIndex{pixel.v - k, pixel.u};
    vertical = pick(below, above);
  }
  if (!horizontal || !vertical) return std::nullopt;
  return Neighbors{*horizontal, *vertical};
}

std::optional<Vec3> SurfaceNormal(const Vec3& p, const Vec3& p_h,
                                  const Vec3& p_v, const Vec3& origin) {
  Vec3 n = (p_h - p).cross(p_v - p);
  const double norm = n.norm();
  if (!(norm >= 1e-12)) return std::nullopt;
  n /= norm;
  if (n.dot(origin - p) < 0.0) n = -n;
  return n;
}

double OccupancyWeight(double n3, double slope) {
  const double angle = std::acos(std::clamp(n3, -1.0, 1.0));
  return Logistic(angle - kPi / 4.0, slope);
}

double NormalConfidence(double d_h, double d_v, double sigma_range,
                        double slope) {
  return Logistic(std::min(d_h, d_v) - sigma_range, slope);
}

double OccupancyProbability(double confidence, double weight) {
  return confidence * weight;
}

GroundImages GroundHeightImage(const Image<Vec3>& points,
                               const Image<Vec3>& normals,
                               double sensor_height,
                               double bottom_row_threshold, int workers) {
  const int rows = points.rows();
  const int cols = points.cols();
  if (!normals.SameShape(rows, cols)) {
    throw std::invalid_argument("normal image does not match point image");
  }
  GroundImages out{Image<double>(rows, cols, kUnknown),
                   Image<std::uint8_t>(rows, cols, 0)};
  ParallelFor(cols, workers, [&](std::size_t u0, std::size_t u1) {
    for (int u = static_cast<int>(u0); u < static_cast<int>(u1); ++u) {
      const Vec3* below = nullptr;
      bool below_is_obstacle = false;
      bool have_ground = false;
      double ground_height = 0.0;
      for (int v = rows - 1; v >= 0; --v) {
        const Vec3& p = points(v, u);
        if (!IsKnown(p)) continue;
        const Vec3& n = normals(v, u);
        bool obstacle = IsKnown(n) &&
                        std::acos(std::clamp(n.z(), -1.0, 1.0)) > kPi / 4.0;
        if (below == nullptr) {
          // Lowest measurement of the column seeds the ground estimate.
          obstacle = obstacle ||
                     std::abs(p.z() + sensor_height) > bottom_row_threshold;
        } else {
          // A ray stepping towards the sensor hit a raised surface.
          obstacle = obstacle || p.norm() < below->norm();
          // Leaving an obstacle requires the measured height to drop; the
          // margin keeps filter rounding on flat roofs from counting.
          if (!obstacle && below_is_obstacle &&
              !(p.z() < below->z() - kHeightDropMargin)) {
            obstacle = true;
          }
        }
        if (!obstacle) {
          ground_height = p.z();
          have_ground = true;
        }
        out.is_ground(v, u) = obstacle ? 0 : 1;
        if (have_ground) out.ground(v, u) = p.z() - ground_height;
        below = &p;
        below_is_obstacle = obstacle;
      }
    }
  });
  return out;
}

double SigmaRange(const Calibration& calibration, const ProcessingParams& params,
                  const Vec3& point) {
  if (calibration.kind == SensorKind::kStereo) {
    const double z = point.x();
    return z * z * params.disparity_error /
           (calibration.camera.focal_length * calibration.camera.baseline);
  }
  return params.lidar_sigma_range;
}

DerivedImages ComputeDerivedImages(const SensorReading& reading,
                                   const ProcessingParams& params) {
  reading.Check();
  const Calibration& calib = reading.calibration;
  const int rows = calib.rows;
  const int cols = calib.cols;
  const bool wrap = calib.kind == SensorKind::kLidar;
  const int workers = params.workers;

  const HeightDistImages split = SplitRangeImage(reading);
  DerivedImages out;
  out.height = BilateralFilter(split.height, params.height_filter, wrap, workers);
  out.dist_xy =
      BilateralFilter(split.dist_xy, params.dist_xy_filter, wrap, workers);

  out.points = Image<Vec3>(rows, cols, UnknownPoint());
  for (int v = 0; v < rows; ++v) {
    for (int u = 0; u < cols; ++u) {
      const double h = out.height(v, u);
      const double d = out.dist_xy(v, u);
      if (IsKnown(h) && IsKnown(d)) {
        out.points(v, u) = calib.PointFromHeightDist(u, h, d);
      }
    }
  }

  out.normals = Image<Vec3>(rows, cols, UnknownPoint());
  out.neighbor_distance = Image<double>(rows, cols, kUnknown);
  out.occupancy = Image<double>(rows, cols, kUnknown);
  ParallelFor(rows, workers, [&](std::size_t v0, std::size_t v1) {
    for (int v = static_cast<int>(v0); v < static_cast<int>(v1); ++v) {
      for (int u = 0; u < cols; ++u) {
        const Vec3& p = out.points(v, u);
        if (!IsKnown(p)) continue;
        out.occupancy(v, u) = 0.0;
        const auto nb = SelectNeighbors(out.points, {v, u},
                                        params.max_neighbor_offset, wrap);
        if (!nb) continue;
        const Vec3& p_h = out.points(nb->horizontal.v, nb->horizontal.u);
        const Vec3& p_v = out.points(nb->vertical.v, nb->vertical.u);
        const auto n = SurfaceNormal(p, p_h, p_v);
        if (!n) continue;
        const double d_h = (p_h - p).norm();
        const double d_v = (p_v - p).norm();
        out.normals(v, u) = *n;
        out.neighbor_distance(v, u) = std::min(d_h, d_v);
        const double conf =
            NormalConfidence(d_h, d_v, SigmaRange(calib, params, p),
                             params.confidence_slope);
        const double weight = OccupancyWeight(n->z(), params.occupancy_slope);
        out.occupancy(v, u) = OccupancyProbability(conf, weight);
      }
    }
  });

  GroundImages ground =
      GroundHeightImage(out.points, out.normals, calib.extrinsics.z,
                        params.bottom_row_threshold, workers);
  out.ground = std::move(ground.ground);
  out.is_ground = std::move(ground.is_ground);
  return out;
}

}  // namespace evgrid
