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

#include "evgrid/pointset_mapping.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "Eigen/Dense"

namespace evgrid {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGaussianCutoff = 8.0;

double NormalCdfDiff(double lo, double hi, double mean, double sigma) {
  const double s = sigma * std::sqrt(2.0);
  return 0.5 * (std::erf((hi - mean) / s) - std::erf((lo - mean) / s));
}

// Clips the segment p0 + t (p1 - p0), t in [t0, t1], against the grid box.
bool ClipToBox(const GridSpec& spec, const Eigen::Vector2d& p0,
               const Eigen::Vector2d& d, double& t0, double& t1) {
  for (int k = 0; k < 2; ++k) {
    const double lo = spec.origin[k];
    const double hi = spec.Upper(k);
    if (d[k] == 0.0) {
      if (p0[k] < lo || p0[k] >= hi) return false;
      continue;
    }
    double a = (lo - p0[k]) / d[k];
    double b = (hi - p0[k]) / d[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  return t1 > t0;
}

std::optional<PlaneCoefficients> SolvePlane(
    const std::vector<Eigen::Vector3d>& pts) {
  if (pts.size() < 3) return std::nullopt;
  Eigen::MatrixXd a(pts.size(), 3);
  Eigen::VectorXd z(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    a(i, 0) = pts[i].x();
    a(i, 1) = pts[i].y();
    a(i, 2) = 1.0;
    z(i) = pts[i].z();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-9);
  if (qr.rank() < 3) return std::nullopt;
  const Eigen::Vector3d x = qr.solve(z);
  return PlaneCoefficients{x(0), x(1), x(2)};
}

}  // namespace

GroundModel::GroundModel(std::variant<PlaneCoefficients, HeightFunction> model,
                         double tolerance)
    : model_(std::move(model)), tolerance_(tolerance) {
  if (!(tolerance_ >= 0.0)) throw ConfigError("ground tolerance must be >= 0");
}

GroundModel GroundModel::Flat(double tolerance) {
  return GroundModel(PlaneCoefficients{}, tolerance);
}

GroundModel GroundModel::Plane(const PlaneCoefficients& plane,
                               double tolerance) {
  return GroundModel(plane, tolerance);
}

GroundModel GroundModel::External(HeightFunction fn, double tolerance) {
  if (!fn) throw ConfigError("external ground model without a function");
  return GroundModel(std::move(fn), tolerance);
}

double GroundModel::Height(double x, double y) const {
  if (const auto* p = std::get_if<PlaneCoefficients>(&model_)) {
    return p->a * x + p->b * y + p->c;
  }
  return std::get<HeightFunction>(model_)(x, y);
}

std::optional<PlaneCoefficients> GroundModel::plane() const {
  if (const auto* p = std::get_if<PlaneCoefficients>(&model_)) return *p;
  return std::nullopt;
}

std::vector<double> ClassifyPoints(std::span<const LabeledPoint> points,
                                   const GroundModel& model,
                                   const Corridors& corridors) {
  std::vector<double> p_occ(points.size(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3& p = points[i].position;
    const double above = p.z() - model.Height(p.x(), p.y());
    p_occ[i] = (above > model.tolerance() && above < corridors.d_z_max) ? 1.0
                                                                        : 0.0;
  }
  return p_occ;
}

std::optional<GroundModel> FitPlane(std::span<const LabeledPoint> points,
                                    const PlaneFitOptions& options) {
  if (!(options.cell_size > 0.0)) throw ConfigError("cell_size must be > 0");
  std::map<std::pair<long, long>, Eigen::Vector3d> lowest;
  for (const auto& lp : points) {
    const Vec3& p = lp.position;
    if (!p.allFinite()) continue;
    const std::pair<long, long> key{
        static_cast<long>(std::floor(p.x() / options.cell_size)),
        static_cast<long>(std::floor(p.y() / options.cell_size))};
    auto [it, inserted] = lowest.emplace(key, p);
    if (!inserted && p.z() < it->second.z()) it->second = p;
  }
  std::vector<Eigen::Vector3d> candidates;
  candidates.reserve(lowest.size());
  for (const auto& [key, p] : lowest) candidates.push_back(p);

  auto plane = SolvePlane(candidates);
  if (!plane) return std::nullopt;
  for (int it = 0; it < options.refit_iterations; ++it) {
    std::vector<Eigen::Vector3d> inliers;
    for (const auto& p : candidates) {
      const double residual = p.z() - (plane->a * p.x() + plane->b * p.y() +
                                       plane->c);
      if (std::abs(residual) <= options.inlier_threshold) inliers.push_back(p);
    }
    if (inliers.size() == candidates.size()) break;
    const auto refit = SolvePlane(inliers);
    if (!refit) break;
    plane = refit;
    candidates = std::move(inliers);
  }
  return GroundModel::Plane(*plane, options.tolerance);
}

LayeredGrid PointsetEvidence(const LabeledPointSet& set, const GroundModel& model,
                             const GridSpec& spec, const PointsetParams& params,
                             std::span<const double> p_occ_override) {
  spec.Check();
  params.corridors.Check();
  if (!(params.ism.sigma > 0.0)) throw ConfigError("ISM sigma must be > 0");
  if (!(params.p_fp >= 0.0 && params.p_fp <= 1.0)) {
    throw ConfigError("p_fp outside [0, 1]");
  }
  const bool overridden = !p_occ_override.empty();
  if (overridden && p_occ_override.size() != set.points.size()) {
    throw std::invalid_argument("p_occ override has the wrong length");
  }
  const Corridors& corr = params.corridors;
  LayeredGrid h(spec, MeasurementLayerNames());
  const std::vector<double> classified =
      overridden ? std::vector<double>{}
                 : ClassifyPoints(set.points, model, corr);

  std::array<int, kNumOccupancyLayers> occ_layer{};
  for (int i = 0; i < kNumOccupancyLayers; ++i) {
    const auto hyp = static_cast<OccupancyHypothesis>(i);
    occ_layer[i] = hyp == OccupancyHypothesis::kFree
                       ? -1
                       : h.LayerIndex(OccupancyLayerName(hyp));
  }
  std::array<int, kNumGroundLayers> gnd_layer{};
  for (int i = 0; i < kNumGroundLayers; ++i) {
    gnd_layer[i] = h.LayerIndex(GroundLayerName(static_cast<GroundHypothesis>(i)));
  }

  // Separable Gaussian footprint of one point.
  auto deposit = [&](const Vec3& p, int layer, double p_occ, double p_omega) {
    const double sigma = GaussianSigma(params.ism, 0.0);
    const double reach = kGaussianCutoff * sigma;
    std::array<int, 2> lo{};
    std::array<int, 2> hi{};
    for (int k = 0; k < 2; ++k) {
      lo[k] = std::max(0, static_cast<int>(std::floor(
                              (p[k] - reach - spec.origin[k]) / spec.resolution[k])));
      hi[k] = std::min(spec.size[k] - 1,
                       static_cast<int>(std::floor((p[k] + reach - spec.origin[k]) /
                                                   spec.resolution[k])));
    }
    auto values = h.layer(layer);
    for (int i = lo[0]; i <= hi[0]; ++i) {
      const double px =
          NormalCdfDiff(spec.Lower(0, i), spec.Lower(0, i + 1), p.x(), sigma);
      if (!(px > 0.0)) continue;
      for (int j = lo[1]; j <= hi[1]; ++j) {
        const double py =
            NormalCdfDiff(spec.Lower(1, j), spec.Lower(1, j + 1), p.y(), sigma);
        const double p_ism = std::min(px * py, 1.0);
        if (!(p_ism > 0.0)) continue;
        const double nr = NotRelevant({params.p_fp, p_occ, p_omega, p_ism});
        values[spec.Index(i, j)] +=
            nr > 0.0 ? std::max(std::log(nr), kLogFloor) : kLogFloor;
      }
    }
  };

  std::vector<double> h_min(spec.NumCells(), kInf);
  std::vector<double> h_max(spec.NumCells(), -kInf);
  const Vec3& o = set.sensor_origin;

  for (std::size_t n = 0; n < set.points.size(); ++n) {
    const LabeledPoint& lp = set.points[n];
    const Vec3& p = lp.position;
    if (!p.allFinite()) continue;
    const double above = p.z() - model.Height(p.x(), p.y());
    const double p_occ =
        std::clamp(overridden ? p_occ_override[n] : classified[n], 0.0, 1.0);
    const double p_omega = std::clamp(lp.confidence, 0.0, 1.0);

    const bool object_evidence =
        overridden || (above >= 0.0 && above < corr.d_z_max);
    if (object_evidence) {
      if (const auto layer = ObjectLayerFor(lp.label)) {
        deposit(p, occ_layer[static_cast<int>(*layer)], p_occ, p_omega);
      }
    }
    if (!overridden && above <= model.tolerance()) {
      if (const auto layer = GroundLayerFor(lp.label)) {
        deposit(p, gnd_layer[static_cast<int>(*layer)], 1.0 - p_occ, p_omega);
      }
    }

    // Heights of the ray from the sensor to the point, per traversed cell.
    const Eigen::Vector2d p0(o.x(), o.y());
    const Eigen::Vector2d d(p.x() - o.x(), p.y() - o.y());
    const double length = d.norm();
    if (!(length > 0.0)) continue;
    double t0 = 0.0;
    double t1 = std::min(1.0, corr.r_max / length);
    if (!ClipToBox(spec, p0, d, t0, t1)) continue;

    auto above_at = [&](double t) {
      const Eigen::Vector2d xy = p0 + t * d;
      return o.z() + t * (p.z() - o.z()) - model.Height(xy.x(), xy.y());
    };
    const Eigen::Vector2d start = p0 + t0 * d;
    std::array<int, 2> cell{};
    std::array<int, 2> step{};
    std::array<double, 2> t_next{};
    std::array<double, 2> t_delta{};
    for (int k = 0; k < 2; ++k) {
      cell[k] = std::clamp(static_cast<int>(std::floor(
                               (start[k] - spec.origin[k]) / spec.resolution[k])),
                           0, spec.size[k] - 1);
      if (d[k] > 0.0) {
        step[k] = 1;
        t_next[k] = (spec.Lower(k, cell[k] + 1) - p0[k]) / d[k];
        t_delta[k] = spec.resolution[k] / d[k];
      } else if (d[k] < 0.0) {
        step[k] = -1;
        t_next[k] = (spec.Lower(k, cell[k]) - p0[k]) / d[k];
        t_delta[k] = -spec.resolution[k] / d[k];
      } else {
        step[k] = 0;
        t_next[k] = kInf;
        t_delta[k] = kInf;
      }
    }
    double t_in = t0;
    double a_in = above_at(t_in);
    while (t_in < t1) {
      const int axis = t_next[0] < t_next[1] ? 0 : 1;
      const double t_out = std::min(t_next[axis], t1);
      const double a_out = above_at(t_out);
      const double lo = std::max(std::min(a_in, a_out), corr.f_z_min);
      const double hi = std::min(std::max(a_in, a_out), corr.f_z_max);
      if (hi >= lo) {
        const std::size_t idx = spec.Index(cell[0], cell[1]);
        h_min[idx] = std::min(h_min[idx], lo);
        h_max[idx] = std::max(h_max[idx], hi);
      }
      if (t_out >= t1) break;
      cell[axis] += step[axis];
      if (cell[axis] < 0 || cell[axis] >= spec.size[axis]) break;
      t_next[axis] += t_delta[axis];
      t_in = t_out;
      a_in = a_out;
    }
  }

  auto rho = h.layer(kPermeabilityLayer);
  const double band = corr.f_z_max - corr.f_z_min;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    rho[i] = h_max[i] >= h_min[i]
                 ? std::clamp((h_max[i] - h_min[i]) / band, 0.0, 1.0)
                 : 0.0;
  }
  return h;
}

LayeredGrid PointsetToGrid(const LabeledPointSet& set, const GroundModel& model,
                           const GridSpec& spec, const PointsetParams& params) {
  return FinalizeCells(PointsetEvidence(set, model, spec, params));
}

}  // namespace evgrid
