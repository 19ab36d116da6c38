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

#include "evgrid/grid.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "evgrid/common.h"

namespace evgrid {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Forward transform that reports invalid coordinates instead of throwing.
std::optional<Eigen::Vector2d> TryUrToXy(const MeasurementGridKind& kind,
                                         double u, double r) {
  return std::visit(
      Overloaded{
          [&](const PolarKind& k) -> std::optional<Eigen::Vector2d> {
            const double theta = DegToRad(u);
            return k.extrinsics.SensorToVehicle(
                {r * std::cos(theta), r * std::sin(theta)});
          },
          [&](const UDistanceKind& k) -> std::optional<Eigen::Vector2d> {
            if (!(r >= 0.0)) return std::nullopt;
            return k.extrinsics.SensorToVehicle(
                {r, -(u - k.principal_u) * r / k.focal_length});
          },
          [&](const UDisparityKind& k) -> std::optional<Eigen::Vector2d> {
            if (!(r > 0.0)) return std::nullopt;
            return k.extrinsics.SensorToVehicle(
                {k.focal_length * k.baseline / r,
                 -(u - k.principal_u) * k.baseline / r});
          },
          [&](const AlignedKind& k) -> std::optional<Eigen::Vector2d> {
            return k.extrinsics.SensorToVehicle({u, r});
          },
      },
      kind);
}

// Number of independent work blocks for table construction. Fixed so the
// result does not depend on the worker count.
constexpr std::size_t kBuildBlocks = 64;

struct Entry {
  std::uint32_t dst;
  std::uint32_t src;
  double fraction;
};

}  // namespace

void GridSpec::Check() const {
  for (int d = 0; d < 2; ++d) {
    if (!(resolution[d] > 0.0) || !std::isfinite(resolution[d])) {
      throw ConfigError("grid resolution must be positive and finite");
    }
    if (size[d] < 1) throw ConfigError("grid size must be at least 1");
    if (!std::isfinite(origin[d])) throw ConfigError("grid origin not finite");
  }
}

std::optional<int> CellOf1d(const GridSpec& spec, int dim, double x) {
  const double o = spec.origin[dim];
  if (!(x >= o)) return std::nullopt;  // also rejects NaN
  if (!(x < spec.Upper(dim))) return std::nullopt;
  auto k = static_cast<long long>(std::floor((x - o) / spec.resolution[dim]));
  k = std::clamp<long long>(k, 0, spec.size[dim] - 1);
  return static_cast<int>(k);
}

std::optional<CellIndex> CellOf(const GridSpec& spec, double x0, double x1) {
  const auto i = CellOf1d(spec, 0, x0);
  if (!i) return std::nullopt;
  const auto j = CellOf1d(spec, 1, x1);
  if (!j) return std::nullopt;
  return CellIndex{*i, *j};
}

LayeredGrid::LayeredGrid(GridSpec spec, std::vector<std::string> names)
    : spec_(spec), names_(std::move(names)) {
  spec_.Check();
  data_.assign(names_.size(), std::vector<double>(spec_.NumCells(), 0.0));
}

int LayeredGrid::LayerIndex(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i);
  }
  throw std::out_of_range("no layer named '" + std::string(name) + "'");
}

bool LayeredGrid::HasLayer(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

Eigen::Vector2d Extrinsics::SensorToVehicle(const Eigen::Vector2d& p) const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {c * p.x() - s * p.y() + x, s * p.x() + c * p.y() + y};
}

Eigen::Vector2d Extrinsics::VehicleToSensor(const Eigen::Vector2d& p) const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const double dx = p.x() - x;
  const double dy = p.y() - y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

const Extrinsics& ExtrinsicsOf(const MeasurementGridKind& kind) {
  return std::visit(
      [](const auto& k) -> const Extrinsics& { return k.extrinsics; }, kind);
}

void CheckKind(const MeasurementGridKind& kind) {
  std::visit(Overloaded{
                 [](const PolarKind&) {},
                 [](const AlignedKind&) {},
                 [](const UDistanceKind& k) {
                   if (!(k.focal_length > 0.0)) {
                     throw ConfigError("focal length must be positive");
                   }
                 },
                 [](const UDisparityKind& k) {
                   if (!(k.focal_length > 0.0) || !(k.baseline > 0.0)) {
                     throw ConfigError(
                         "focal length and baseline must be positive");
                   }
                 },
             },
             kind);
}

Eigen::Vector2d TransformUrToXy(const MeasurementGridKind& kind,
                                const Eigen::Vector2d& ur) {
  if (const auto* k = std::get_if<UDisparityKind>(&kind);
      k && !(ur.y() > 0.0)) {
    throw std::domain_error("disparity must be positive");
  }
  if (const auto* k = std::get_if<UDistanceKind>(&kind); k && !(ur.y() >= 0.0)) {
    throw std::domain_error("depth must be non-negative");
  }
  return *TryUrToXy(kind, ur.x(), ur.y());
}

std::optional<Eigen::Vector2d> TransformXyToUr(const MeasurementGridKind& kind,
                                               const Eigen::Vector2d& xy) {
  const Eigen::Vector2d s = ExtrinsicsOf(kind).VehicleToSensor(xy);
  return std::visit(
      Overloaded{
          [&](const PolarKind&) -> std::optional<Eigen::Vector2d> {
            double az = RadToDeg(std::atan2(s.y(), s.x()));
            if (az < 0.0) az += 360.0;
            if (az >= 360.0) az = 0.0;
            return Eigen::Vector2d(az, std::hypot(s.x(), s.y()));
          },
          [&](const UDistanceKind& k) -> std::optional<Eigen::Vector2d> {
            if (!(s.x() > 0.0)) return std::nullopt;
            return Eigen::Vector2d(
                k.principal_u - s.y() * k.focal_length / s.x(), s.x());
          },
          [&](const UDisparityKind& k) -> std::optional<Eigen::Vector2d> {
            if (!(s.x() > 0.0)) return std::nullopt;
            return Eigen::Vector2d(
                k.principal_u - s.y() * k.focal_length / s.x(),
                k.focal_length * k.baseline / s.x());
          },
          [&](const AlignedKind&) -> std::optional<Eigen::Vector2d> {
            return s;
          },
      },
      kind);
}

std::optional<CellIndex> MeasurementCellOf(const MeasurementGridKind& kind,
                                           const GridSpec& spec,
                                           const Eigen::Vector2d& ur) {
  double u = ur.x();
  if (std::holds_alternative<PolarKind>(kind)) {
    u = spec.origin[0] + std::fmod(std::fmod(u - spec.origin[0], 360.0) + 360.0,
                                   360.0);
  }
  return CellOf(spec, u, ur.y());
}

WarpTable WarpTable::Build(const MeasurementGridKind& kind, const GridSpec& src,
                           const GridSpec& dst, const WarpOptions& options) {
  src.Check();
  dst.Check();
  CheckKind(kind);
  if (options.min_subsamples < 1 ||
      options.max_subsamples < options.min_subsamples) {
    throw ConfigError("invalid warp subsample bounds");
  }
  if (src.NumCells() > std::numeric_limits<std::uint32_t>::max() ||
      dst.NumCells() > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigError("grid too large for warp table");
  }

  WarpTable table;
  table.src_ = src;
  table.dst_ = dst;

  const double dst_cell = std::min(dst.resolution[0], dst.resolution[1]);
  const double x_lo = dst.origin[0] - dst_cell;
  const double x_hi = dst.Upper(0) + dst_cell;
  const double y_lo = dst.origin[1] - dst_cell;
  const double y_hi = dst.Upper(1) + dst_cell;

  const std::size_t num_src = src.NumCells();
  const std::size_t block_size = (num_src + kBuildBlocks - 1) / kBuildBlocks;
  std::vector<std::vector<Entry>> blocks(kBuildBlocks);

  ParallelFor(kBuildBlocks, options.workers, [&](std::size_t b0, std::size_t b1) {
    std::vector<std::uint32_t> hits;
    for (std::size_t b = b0; b < b1; ++b) {
      auto& out = blocks[b];
      const std::size_t s_begin = b * block_size;
      const std::size_t s_end = std::min(num_src, s_begin + block_size);
      for (std::size_t s = s_begin; s < s_end; ++s) {
        const int i = static_cast<int>(s / src.size[1]);
        const int j = static_cast<int>(s % src.size[1]);
        const double u0 = src.Lower(0, i);
        const double r0 = src.Lower(1, j);
        const double du = src.resolution[0];
        const double dr = src.resolution[1];

        // Bounding box of the cell image from points along its boundary.
        double bx0 = std::numeric_limits<double>::infinity();
        double by0 = bx0;
        double bx1 = -bx0;
        double by1 = -bx0;
        constexpr int kEdge = 4;
        for (int e = 0; e <= kEdge; ++e) {
          const double t = static_cast<double>(e) / kEdge;
          const std::array<std::pair<double, double>, 4> pts = {
              std::pair{u0 + t * du, r0}, std::pair{u0 + t * du, r0 + dr},
              std::pair{u0, r0 + t * dr}, std::pair{u0 + du, r0 + t * dr}};
          for (const auto& [pu, pr] : pts) {
            if (const auto p = TryUrToXy(kind, pu, pr)) {
              bx0 = std::min(bx0, p->x());
              bx1 = std::max(bx1, p->x());
              by0 = std::min(by0, p->y());
              by1 = std::max(by1, p->y());
            }
          }
        }
        if (!(bx1 >= bx0)) continue;
        if (!std::isfinite(bx0) || !std::isfinite(bx1) ||
            !std::isfinite(by0) || !std::isfinite(by1)) {
          // Degenerate (e.g. zero disparity edge); clamp to the region.
          bx0 = std::max(bx0, x_lo);
          bx1 = std::min(bx1, x_hi);
          by0 = std::max(by0, y_lo);
          by1 = std::min(by1, y_hi);
        }
        const double margin = 0.1 * std::max(bx1 - bx0, by1 - by0);
        if (bx1 + margin < x_lo || bx0 - margin > x_hi ||
            by1 + margin < y_lo || by0 - margin > y_hi) {
          continue;
        }
        const double extent = std::min(
            std::max(bx1 - bx0, by1 - by0),
            std::max(x_hi - x_lo, y_hi - y_lo));
        const int n = std::clamp(
            static_cast<int>(std::ceil(2.0 * extent / dst_cell)),
            options.min_subsamples, options.max_subsamples);

        hits.clear();
        for (int a = 0; a < n; ++a) {
          const double pu = u0 + (a + 0.5) / n * du;
          for (int c = 0; c < n; ++c) {
            const double pr = r0 + (c + 0.5) / n * dr;
            const auto p = TryUrToXy(kind, pu, pr);
            if (!p) continue;
            if (const auto cell = CellOf(dst, p->x(), p->y())) {
              hits.push_back(static_cast<std::uint32_t>(
                  dst.Index(cell->i, cell->j)));
            }
          }
        }
        if (hits.empty()) continue;
        std::sort(hits.begin(), hits.end());
        const double w = 1.0 / (static_cast<double>(n) * n);
        std::size_t k = 0;
        while (k < hits.size()) {
          std::size_t run = k;
          while (run < hits.size() && hits[run] == hits[k]) ++run;
          out.push_back({hits[k], static_cast<std::uint32_t>(s),
                         w * static_cast<double>(run - k)});
          k = run;
        }
      }
    }
  });

  // Counting sort by destination; within a destination, source order.
  const std::size_t num_dst = dst.NumCells();
  table.offsets_.assign(num_dst + 1, 0);
  std::size_t total = 0;
  for (const auto& block : blocks) {
    for (const Entry& e : block) ++table.offsets_[e.dst + 1];
    total += block.size();
  }
  for (std::size_t d = 0; d < num_dst; ++d) {
    table.offsets_[d + 1] += table.offsets_[d];
  }
  table.src_index_.resize(total);
  table.fraction_.resize(total);
  std::vector<std::size_t> cursor(table.offsets_.begin(),
                                  table.offsets_.end() - 1);
  for (const auto& block : blocks) {
    for (const Entry& e : block) {
      const std::size_t pos = cursor[e.dst]++;
      table.src_index_[pos] = e.src;
      table.fraction_[pos] = e.fraction;
    }
  }
  return table;
}

std::vector<double> WarpTable::Apply(std::span<const double> src_layer,
                                     WarpMode mode, int workers) const {
  if (src_layer.size() != src_.NumCells()) {
    throw std::invalid_argument("source layer does not match warp table");
  }
  const std::size_t num_dst = dst_.NumCells();
  std::vector<double> out(num_dst, 0.0);
  ParallelFor(num_dst, workers, [&](std::size_t d0, std::size_t d1) {
    for (std::size_t d = d0; d < d1; ++d) {
      double sum = 0.0;
      double weight = 0.0;
      for (std::size_t k = offsets_[d]; k < offsets_[d + 1]; ++k) {
        sum += src_layer[src_index_[k]] * fraction_[k];
        weight += fraction_[k];
      }
      if (mode == WarpMode::kIntegrate) {
        out[d] = sum;
      } else {
        out[d] = weight > 0.0 ? sum / weight : 0.0;
      }
    }
  });
  return out;
}

std::vector<std::uint8_t> WarpTable::Observed() const {
  std::vector<std::uint8_t> observed(dst_.NumCells(), 0);
  for (std::size_t d = 0; d < observed.size(); ++d) {
    observed[d] = offsets_[d + 1] > offsets_[d] ? 1 : 0;
  }
  return observed;
}

WarpResult WarpToCartesian(const LayeredGrid& src,
                           const MeasurementGridKind& kind,
                           const GridSpec& dst, WarpMode mode,
                           const WarpOptions& options) {
  for (int l = 0; l < src.num_layers(); ++l) {
    for (double v : src.layer(l)) {
      if (!std::isfinite(v)) {
        throw std::domain_error("warp source layer '" + src.names()[l] +
                                "' has non-finite values");
      }
    }
  }
  const WarpTable table = WarpTable::Build(kind, src.spec(), dst, options);
  WarpResult result{LayeredGrid(dst, src.names()), table.Observed()};
  for (int l = 0; l < src.num_layers(); ++l) {
    const auto values = table.Apply(src.layer(l), mode, options.workers);
    std::copy(values.begin(), values.end(), result.grid.layer(l).begin());
  }
  return result;
}

}  // namespace evgrid
