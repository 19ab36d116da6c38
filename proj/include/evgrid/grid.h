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

#ifndef EVGRID_GRID_H_
#define EVGRID_GRID_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "Eigen/Core"

namespace evgrid {

// Equidistant rectangular grid. Cell (i, j) covers
// [origin[0] + i * resolution[0], origin[0] + (i + 1) * resolution[0]) x
// [origin[1] + j * resolution[1], origin[1] + (j + 1) * resolution[1]).
struct GridSpec {
  std::array<double, 2> origin = {0.0, 0.0};
  std::array<double, 2> resolution = {1.0, 1.0};
  std::array<int, 2> size = {1, 1};

  // Throws ConfigError for non-positive resolution or size.
  void Check() const;
  std::size_t NumCells() const {
    return static_cast<std::size_t>(size[0]) * static_cast<std::size_t>(size[1]);
  }
  // Storage is row-major over (i, j): j varies fastest.
  std::size_t Index(int i, int j) const {
    return static_cast<std::size_t>(i) * size[1] + j;
  }
  double Lower(int dim, int k) const { return origin[dim] + k * resolution[dim]; }
  double Center(int dim, int k) const {
    return origin[dim] + (k + 0.5) * resolution[dim];
  }
  double Upper(int dim) const { return origin[dim] + size[dim] * resolution[dim]; }
  double CellArea() const { return resolution[0] * resolution[1]; }

  bool operator==(const GridSpec&) const = default;
};

struct CellIndex {
  int i = 0;
  int j = 0;
  bool operator==(const CellIndex&) const = default;
};

std::optional<CellIndex> CellOf(const GridSpec& spec, double x0, double x1);
// Index along one dimension, or nullopt when outside [origin, upper).
std::optional<int> CellOf1d(const GridSpec& spec, int dim, double x);

// Named real-valued planes sharing one grid.
class LayeredGrid {
 public:
  LayeredGrid() = default;
  LayeredGrid(GridSpec spec, std::vector<std::string> names);

  const GridSpec& spec() const { return spec_; }
  int num_layers() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  // Index of the named layer; throws std::out_of_range if absent.
  int LayerIndex(std::string_view name) const;
  bool HasLayer(std::string_view name) const;

  std::span<double> layer(int index) { return data_.at(index); }
  std::span<const double> layer(int index) const { return data_.at(index); }
  std::span<double> layer(std::string_view name) {
    return layer(LayerIndex(name));
  }
  std::span<const double> layer(std::string_view name) const {
    return layer(LayerIndex(name));
  }
  double& at(int index, int i, int j) { return data_[index][spec_.Index(i, j)]; }
  double at(int index, int i, int j) const {
    return data_[index][spec_.Index(i, j)];
  }

 private:
  GridSpec spec_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> data_;
};

// Pose of a level-mounted sensor in the vehicle frame (x forward, y left,
// z up). Only yaw is modeled.
struct Extrinsics {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;  // mounting height above the vehicle-frame ground
  double yaw = 0.0;  // rad

  Eigen::Vector2d SensorToVehicle(const Eigen::Vector2d& p) const;
  Eigen::Vector2d VehicleToSensor(const Eigen::Vector2d& p) const;
};

// u: azimuth in degrees (wraps at 360), r: planar range in meters.
struct PolarKind {
  Extrinsics extrinsics;
};

// u: image column (pixel-center coordinates), r: depth in meters.
struct UDistanceKind {
  double focal_length = 1.0;  // px
  double principal_u = 0.0;   // px
  Extrinsics extrinsics;
};

// u: image column (pixel-center coordinates), r: disparity in pixels.
struct UDisparityKind {
  double focal_length = 1.0;  // px
  double baseline = 1.0;      // m
  double principal_u = 0.0;   // px
  Extrinsics extrinsics;
};

// u, r are sensor-frame x, y directly. Used where the measurement grid is
// already Cartesian.
struct AlignedKind {
  Extrinsics extrinsics;
};

using MeasurementGridKind =
    std::variant<PolarKind, UDistanceKind, UDisparityKind, AlignedKind>;

const Extrinsics& ExtrinsicsOf(const MeasurementGridKind& kind);
void CheckKind(const MeasurementGridKind& kind);

// Measurement-grid coordinates to vehicle-frame top-view coordinates. Throws
// std::domain_error for disparity <= 0 or negative depth.
Eigen::Vector2d TransformUrToXy(const MeasurementGridKind& kind,
                                const Eigen::Vector2d& ur);
// Inverse of TransformUrToXy; nullopt where the kind has no pre-image (behind
// a camera). Polar azimuths are returned in [0, 360).
std::optional<Eigen::Vector2d> TransformXyToUr(const MeasurementGridKind& kind,
                                               const Eigen::Vector2d& xy);
// Cell of measurement-grid coordinates, wrapping polar azimuths into the
// grid's [origin, origin + 360) window.
std::optional<CellIndex> MeasurementCellOf(const MeasurementGridKind& kind,
                                           const GridSpec& spec,
                                           const Eigen::Vector2d& ur);

enum class WarpMode { kIntegrate, kAverage };

struct WarpOptions {
  // Sub-samples per source-cell side; raised adaptively up to max_subsamples
  // so that the sample spacing in the destination stays below half a cell.
  int min_subsamples = 4;
  int max_subsamples = 64;
  int workers = 1;
};

// Sparse map from measurement-grid cells to Cartesian cells. Each entry holds
// the fraction of a source cell's (u, r) area whose image falls into the
// destination cell.
class WarpTable {
 public:
  static WarpTable Build(const MeasurementGridKind& kind, const GridSpec& src,
                         const GridSpec& dst, const WarpOptions& options = {});

  const GridSpec& src_spec() const { return src_; }
  const GridSpec& dst_spec() const { return dst_; }

  // Integrate: sum of value * fraction. Average: area-weighted mean over the
  // observed part of the pre-image, 0 where unobserved.
  std::vector<double> Apply(std::span<const double> src_layer, WarpMode mode,
                            int workers = 1) const;
  // Whether any source area maps into the destination cell.
  std::vector<std::uint8_t> Observed() const;

 private:
  GridSpec src_;
  GridSpec dst_;
  std::vector<std::size_t> offsets_;  // CSR by destination cell
  std::vector<std::uint32_t> src_index_;
  std::vector<double> fraction_;
};

struct WarpResult {
  LayeredGrid grid;
  std::vector<std::uint8_t> observed;
};

// Warps every layer of `src` with the same mode. Throws ConfigError for a
// degenerate destination spec.
WarpResult WarpToCartesian(const LayeredGrid& src,
                           const MeasurementGridKind& kind,
                           const GridSpec& dst, WarpMode mode,
                           const WarpOptions& options = {});

}  // namespace evgrid

#endif  // EVGRID_GRID_H_
