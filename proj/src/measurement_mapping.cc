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

#include "evgrid/measurement_mapping.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace evgrid {
namespace {

// Gaussian support is truncated here; the dropped tail is below 1e-15.
constexpr double kGaussianCutoff = 8.0;

constexpr int kNumLogOccupancy = 7;  // every occupancy layer except free
constexpr int kFreeLayer = static_cast<int>(OccupancyHypothesis::kFree);

// Index of an occupancy hypothesis among the measurement log layers.
int LogIndex(OccupancyHypothesis h) {
  const int i = static_cast<int>(h);
  return i < kFreeLayer ? i : i - 1;
}

int LogIndex(GroundHypothesis h) {
  return kNumLogOccupancy + static_cast<int>(h);
}

constexpr int kPermeabilityIndex = kNumLogOccupancy + kNumGroundLayers;

void CheckIsm(const InverseSensorModel& model) {
  if (const auto* g = std::get_if<GaussianIsm>(&model)) {
    if (!(g->sigma > 0.0) || !(g->sigma_per_range >= 0.0)) {
      throw ConfigError("Gaussian ISM needs sigma > 0 and sigma_per_range >= 0");
    }
  }
}

double Contribution(double p_fp, double p_occ, double p_omega, double p_ism) {
  const double nr = NotRelevant({p_fp, p_occ, p_omega, p_ism});
  return nr > 0.0 ? std::max(std::log(nr), kLogFloor) : kLogFloor;
}

// Adds the contributions of one element to the log layer `column` (one
// contiguous measurement-grid column).
void Deposit(const InverseSensorModel& model, const GridSpec& spec,
             const MeasurementElement& e, double p_fp, double p_occ,
             std::span<double> column) {
  const double r0 = spec.origin[1];
  const double dr = spec.resolution[1];
  const int n = spec.size[1];
  double lo;
  double hi;
  std::optional<double> adjacent;
  if (const auto* g = std::get_if<GaussianIsm>(&model)) {
    const double sigma = GaussianSigma(*g, e.r);
    lo = e.r - kGaussianCutoff * sigma;
    hi = e.r + kGaussianCutoff * sigma;
  } else {
    if (!IsKnown(e.r_adjacent)) return;
    adjacent = e.r_adjacent;
    lo = std::min(e.r, e.r_adjacent);
    hi = std::max(e.r, e.r_adjacent);
  }
  const int j0 = std::max(0, static_cast<int>(std::floor((lo - r0) / dr)));
  const int j1 = std::min(n - 1, static_cast<int>(std::floor((hi - r0) / dr)));
  for (int j = j0; j <= j1; ++j) {
    const double p = IsmProbability(model, spec.Lower(1, j), spec.Lower(1, j + 1),
                                    e.r, adjacent);
    if (!(p > 0.0)) continue;
    column[j] += Contribution(p_fp, p_occ, e.p_omega, std::min(p, 1.0));
  }
}

// Planar (LiDAR) or depth (camera) coordinate of the measurement-grid range
// coordinate r.
double RayCoordinate(const Calibration& c, double r) {
  if (c.kind == SensorKind::kStereo) {
    return r > 0.0 ? c.camera.focal_length * c.camera.baseline / r : 0.0;
  }
  return r;
}

double GridRange(const Calibration& c, double q) {
  if (c.kind == SensorKind::kStereo) {
    return q > 0.0 ? c.camera.focal_length * c.camera.baseline / q
                   : std::numeric_limits<double>::infinity();
  }
  return q;
}

// Splits the validated occupancy or ground masses of one cell.
void FinalizeFrame(std::span<const double> h, std::span<double> out) {
  double h_sum = 0.0;
  double raw_sum = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double hi = std::min(h[i], 0.0);
    out[i] = -std::expm1(hi);
    h_sum += hi;
    raw_sum += out[i];
  }
  if (raw_sum <= 0.0) return;
  const double k = -std::expm1(h_sum) / raw_sum;
  for (double& m : out) m *= k;
}

}  // namespace

double GaussianSigma(const GaussianIsm& model, double r_m) {
  return model.sigma + model.sigma_per_range * std::abs(r_m);
}

double IsmProbability(const InverseSensorModel& model, double lo, double hi,
                      double r_m, std::optional<double> r_adjacent) {
  if (!(hi > lo)) return 0.0;
  if (const auto* g = std::get_if<GaussianIsm>(&model)) {
    CheckIsm(model);
    const double s = GaussianSigma(*g, r_m) * std::sqrt(2.0);
    return 0.5 * (std::erf((hi - r_m) / s) - std::erf((lo - r_m) / s));
  }
  if (!r_adjacent || !IsKnown(*r_adjacent)) return 0.0;
  const double a = std::min(r_m, *r_adjacent);
  const double b = std::max(r_m, *r_adjacent);
  if (a == b) return (a >= lo && a < hi) ? 1.0 : 0.0;
  const double overlap = std::min(hi, b) - std::max(lo, a);
  return std::clamp(overlap / (hi - lo), 0.0, 1.0);
}

void Corridors::Check() const {
  if (!(f_z_min >= 0.0 && f_z_min < f_z_max && f_z_max <= d_z_max)) {
    throw ConfigError("corridors need 0 <= f_z_min < f_z_max <= d_z_max");
  }
  if (!(r_max > 0.0)) throw ConfigError("r_max must be > 0");
}

std::string OccupancyLayerName(OccupancyHypothesis h) {
  static const char* kNames[kNumOccupancyLayers] = {
      "occ.car",          "occ.two_wheeler", "occ.pedestrian", "occ.other_mobile",
      "occ.immobile",     "occ.object",      "occ.free",       "occ.void"};
  return kNames[static_cast<int>(h)];
}

std::string GroundLayerName(GroundHypothesis h) {
  static const char* kNames[kNumGroundLayers] = {
      "ground.street", "ground.sidewalk", "ground.other", "ground.any"};
  return kNames[static_cast<int>(h)];
}

std::vector<std::string> EvidentialLayerNames() {
  std::vector<std::string> names;
  for (int i = 0; i < kNumOccupancyLayers; ++i) {
    names.push_back(OccupancyLayerName(static_cast<OccupancyHypothesis>(i)));
  }
  for (int i = 0; i < kNumGroundLayers; ++i) {
    names.push_back(GroundLayerName(static_cast<GroundHypothesis>(i)));
  }
  return names;
}

std::vector<std::string> MeasurementLayerNames() {
  std::vector<std::string> names;
  for (int i = 0; i < kNumOccupancyLayers; ++i) {
    if (i == kFreeLayer) continue;
    names.push_back(OccupancyLayerName(static_cast<OccupancyHypothesis>(i)));
  }
  for (int i = 0; i < kNumGroundLayers; ++i) {
    names.push_back(GroundLayerName(static_cast<GroundHypothesis>(i)));
  }
  names.push_back(kPermeabilityLayer);
  return names;
}

void MappingParams::Check(SensorKind sensor) const {
  corridors.Check();
  CheckIsm(object_ism);
  CheckIsm(ground_ism);
  if (!(p_fp >= 0.0 && p_fp <= 1.0)) throw ConfigError("p_fp outside [0, 1]");
  if (std::holds_alternative<IntervalIsm>(object_ism)) {
    throw ConfigError("the interval ISM is only available for ground evidence");
  }
  if (std::holds_alternative<IntervalIsm>(ground_ism) &&
      sensor == SensorKind::kLidar) {
    throw ConfigError("the interval ISM is only available for cameras");
  }
}

std::optional<int> ColumnCell(const Calibration& calibration,
                              const GridSpec& spec, int u) {
  if (calibration.kind == SensorKind::kLidar) {
    const double az = RadToDeg(calibration.ColumnAzimuth(u));
    const double wrapped =
        spec.origin[0] +
        std::fmod(std::fmod(az - spec.origin[0], 360.0) + 360.0, 360.0);
    return CellOf1d(spec, 0, wrapped);
  }
  return CellOf1d(spec, 0, static_cast<double>(u));
}

std::vector<MeasurementElement> BuildElements(const SensorReading& reading,
                                              const DerivedImages& derived,
                                              const GridSpec& spec,
                                              const Corridors& corridors) {
  const Calibration& calib = reading.calibration;
  std::vector<MeasurementElement> elements;
  for (int u = 0; u < calib.cols; ++u) {
    const auto u_cell = ColumnCell(calib, spec, u);
    if (!u_cell) continue;
    for (int v = 0; v < calib.rows; ++v) {
      const Vec3& p = derived.points(v, u);
      if (!IsKnown(p)) continue;
      const auto ur = calib.ToMeasurement(u, p);
      if (!ur) continue;
      MeasurementElement e;
      e.pixel = {v, u};
      e.u_cell = *u_cell;
      e.r = ur->y();
      if (v > 0 && IsKnown(derived.points(v - 1, u))) {
        if (const auto adj = calib.ToMeasurement(u, derived.points(v - 1, u))) {
          e.r_adjacent = adj->y();
        }
      }
      e.p_occ = std::clamp(derived.occupancy(v, u), 0.0, 1.0);
      if (!reading.confidence.empty()) {
        e.p_omega = std::clamp(reading.confidence(v, u), 0.0, 1.0);
      }
      if (!reading.semantic.empty()) e.label = reading.semantic(v, u);
      const double f_ground = derived.ground(v, u);
      e.object_evidence = IsKnown(f_ground) && f_ground >= 0.0 &&
                          f_ground < corridors.d_z_max;
      e.ground_evidence = derived.is_ground(v, u) != 0;
      elements.push_back(e);
    }
  }
  return elements;
}

LayeredGrid AccumulateElements(std::span<const MeasurementElement> elements,
                               const GridSpec& spec,
                               const MappingParams& params) {
  spec.Check();
  params.corridors.Check();
  CheckIsm(params.object_ism);
  CheckIsm(params.ground_ism);
  LayeredGrid h(spec, MeasurementLayerNames());

  // Stable bucketing by column keeps the per-column order of the input.
  const int cols = spec.size[0];
  std::vector<std::size_t> offsets(cols + 1, 0);
  for (const auto& e : elements) {
    if (e.u_cell >= 0 && e.u_cell < cols) ++offsets[e.u_cell + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<const MeasurementElement*> sorted(offsets.back());
  {
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& e : elements) {
      if (e.u_cell >= 0 && e.u_cell < cols) sorted[cursor[e.u_cell]++] = &e;
    }
  }

  const std::size_t n_r = spec.size[1];
  ParallelFor(cols, params.workers, [&](std::size_t c0, std::size_t c1) {
    for (std::size_t c = c0; c < c1; ++c) {
      for (std::size_t k = offsets[c]; k < offsets[c + 1]; ++k) {
        const MeasurementElement& e = *sorted[k];
        if (e.object_evidence) {
          if (const auto layer = ObjectLayerFor(e.label)) {
            auto column = h.layer(LogIndex(*layer)).subspan(c * n_r, n_r);
            Deposit(params.object_ism, spec, e, params.p_fp,
                    std::clamp(e.p_occ, 0.0, 1.0), column);
          }
        }
        if (e.ground_evidence) {
          if (const auto layer = GroundLayerFor(e.label)) {
            auto column = h.layer(LogIndex(*layer)).subspan(c * n_r, n_r);
            Deposit(params.ground_ism, spec, e, params.p_fp,
                    1.0 - std::clamp(e.p_occ, 0.0, 1.0), column);
          }
        }
      }
    }
  });
  return h;
}

std::vector<double> RayPermeability(const SensorReading& reading,
                                    const DerivedImages& derived,
                                    const GridSpec& spec,
                                    const Corridors& corridors, int workers) {
  corridors.Check();
  spec.Check();
  const Calibration& calib = reading.calibration;
  const int n_u = spec.size[0];
  const int n_r = spec.size[1];
  std::vector<double> rho(spec.NumCells(), 0.0);

  std::vector<std::vector<int>> columns(n_u);
  for (int u = 0; u < calib.cols; ++u) {
    if (const auto c = ColumnCell(calib, spec, u)) columns[*c].push_back(u);
  }

  const bool lidar = calib.kind == SensorKind::kLidar;
  const double h_s = calib.extrinsics.z;
  const double step = calib.VerticalStep();
  const double r_lo = spec.origin[1];
  const double r_hi = spec.Upper(1);
  const double dr = spec.resolution[1];
  const double band = corridors.f_z_max - corridors.f_z_min;

  ParallelFor(n_u, workers, [&](std::size_t c0, std::size_t c1) {
    std::vector<double> diff(n_r + 1);
    std::vector<double> corr(n_r);
    std::vector<int> active(n_r + 1);  // exact ray count, avoids residue
    for (std::size_t c = c0; c < c1; ++c) {
      if (columns[c].empty()) continue;
      std::fill(diff.begin(), diff.end(), 0.0);
      std::fill(corr.begin(), corr.end(), 0.0);
      std::fill(active.begin(), active.end(), 0);

      // Marks the measurement-grid interval swept by one ray.
      auto mark = [&](double q_a, double q_b, double weight) {
        double a = GridRange(calib, q_a);
        double b = GridRange(calib, q_b);
        if (a > b) std::swap(a, b);
        a = std::max(a, r_lo);
        b = std::min(b, r_hi);
        if (!(b > a)) return;
        const int ka = std::clamp(static_cast<int>((a - r_lo) / dr), 0, n_r - 1);
        const int kb = std::clamp(static_cast<int>((b - r_lo) / dr), 0, n_r - 1);
        diff[ka] += weight;
        diff[kb + 1] -= weight;
        ++active[ka];
        --active[kb + 1];
        corr[ka] -= weight * (a - spec.Lower(1, ka)) / dr;
        corr[kb] -= weight * (spec.Lower(1, kb + 1) - b) / dr;
      };

      for (int u : columns[c]) {
        double ground_below = -h_s;
        for (int v = calib.rows - 1; v >= 0; --v) {
          const Vec3& p = derived.points(v, u);
          double q_end;
          double slope;  // above-ground height gained per unit of q
          if (IsKnown(p)) {
            q_end = lidar ? std::hypot(p.x(), p.y()) : p.x();
            if (!(q_end > 0.0)) continue;
            const double f_ground = derived.ground(v, u);
            const double ground_end =
                IsKnown(f_ground) ? p.z() - f_ground : -h_s;
            if (IsKnown(f_ground)) ground_below = ground_end;
            slope = (p.z() - ground_end - h_s) / q_end;
          } else {
            // Only a rotating LiDAR reports missing returns as open space.
            if (!lidar) continue;
            q_end = corridors.r_max;
            slope = std::tan(calib.RowElevation(v)) -
                    (ground_below + h_s) / q_end;
          }
          q_end = std::min(q_end, corridors.r_max);
          double q_a = 0.0;
          double q_b = q_end;
          if (slope == 0.0) {
            if (h_s < corridors.f_z_min || h_s > corridors.f_z_max) continue;
          } else {
            double t0 = (corridors.f_z_min - h_s) / slope;
            double t1 = (corridors.f_z_max - h_s) / slope;
            if (t0 > t1) std::swap(t0, t1);
            q_a = std::max(q_a, t0);
            q_b = std::min(q_b, t1);
          }
          if (q_b > q_a) {
            // Angular spacing grows into height spacing by 1 / cos^2 of the
            // elevation; camera rows are already uniform in tan.
            double weight = step;
            if (lidar) {
              const double t = std::tan(calib.RowElevation(v));
              weight *= 1.0 + t * t;
            }
            mark(q_a, q_b, weight);
          }
        }
      }

      const double n_cols = static_cast<double>(columns[c].size());
      double running = 0.0;
      int rays = 0;
      for (int k = 0; k < n_r; ++k) {
        running += diff[k];
        rays += active[k];
        if (rays == 0) {
          running = 0.0;
          continue;
        }
        const double coverage = running + corr[k];
        const double q = RayCoordinate(calib, spec.Center(1, k));
        const double d_z = coverage * q / n_cols;
        rho[spec.Index(static_cast<int>(c), k)] =
            std::clamp(d_z / band, 0.0, 1.0);
      }
    }
  });
  return rho;
}

LayeredGrid Accumulate(const SensorReading& reading,
                       const DerivedImages& derived, const GridSpec& spec,
                       const MappingParams& params) {
  params.Check(reading.calibration.kind);
  const auto elements = BuildElements(reading, derived, spec, params.corridors);
  LayeredGrid h = AccumulateElements(elements, spec, params);
  const auto rho = RayPermeability(reading, derived, spec, params.corridors,
                                   params.workers);
  std::copy(rho.begin(), rho.end(), h.layer(kPermeabilityIndex).begin());
  return h;
}

LayeredGrid FinalizeCells(const LayeredGrid& h, int workers) {
  if (h.names() != MeasurementLayerNames()) {
    throw std::invalid_argument("finalize expects measurement-grid layers");
  }
  LayeredGrid map(h.spec(), EvidentialLayerNames());
  const std::size_t n = h.spec().NumCells();
  ParallelFor(n, workers, [&](std::size_t b, std::size_t e) {
    std::array<double, kNumLogOccupancy> h_occ;
    std::array<double, kNumLogOccupancy> m_occ;
    std::array<double, kNumGroundLayers> h_gnd;
    std::array<double, kNumGroundLayers> m_gnd;
    for (std::size_t cell = b; cell < e; ++cell) {
      for (int i = 0; i < kNumLogOccupancy; ++i) h_occ[i] = h.layer(i)[cell];
      for (int i = 0; i < kNumGroundLayers; ++i) {
        h_gnd[i] = h.layer(kNumLogOccupancy + i)[cell];
      }
      FinalizeFrame(h_occ, m_occ);
      FinalizeFrame(h_gnd, m_gnd);
      double assigned = 0.0;
      for (int i = 0; i < kNumLogOccupancy; ++i) {
        const int layer = i < kFreeLayer ? i : i + 1;
        map.layer(layer)[cell] = m_occ[i];
        assigned += m_occ[i];
      }
      const double rho =
          std::clamp(h.layer(kPermeabilityIndex)[cell], 0.0, 1.0);
      map.layer(kFreeLayer)[cell] = std::max(0.0, 1.0 - assigned) * rho;
      for (int i = 0; i < kNumGroundLayers; ++i) {
        map.layer(kNumOccupancyLayers + i)[cell] = m_gnd[i];
      }
    }
  });
  return map;
}

LayeredGrid Finalize(const LayeredGrid& h_m, const WarpTable& table,
                     int workers) {
  if (!(h_m.spec() == table.src_spec())) {
    throw std::invalid_argument("warp table does not match the measurement grid");
  }
  LayeredGrid h_xy(table.dst_spec(), h_m.names());
  for (int l = 0; l < h_m.num_layers(); ++l) {
    const WarpMode mode =
        l == kPermeabilityIndex ? WarpMode::kAverage : WarpMode::kIntegrate;
    const auto values = table.Apply(h_m.layer(l), mode, workers);
    std::copy(values.begin(), values.end(), h_xy.layer(l).begin());
  }
  return FinalizeCells(h_xy, workers);
}

LayeredGrid Finalize(const LayeredGrid& h_m, const MeasurementGridKind& kind,
                     const GridSpec& dst, const WarpOptions& options) {
  const WarpTable table = WarpTable::Build(kind, h_m.spec(), dst, options);
  return Finalize(h_m, table, options.workers);
}

Bba OccupancyBbaAt(const LayeredGrid& map, std::size_t cell) {
  std::vector<double> m(kNumOccupancyLayers);
  for (int i = 0; i < kNumOccupancyLayers; ++i) m[i] = map.layer(i)[cell];
  return Bba(Fod::kOccupancy, std::move(m));
}

Bba GroundBbaAt(const LayeredGrid& map, std::size_t cell) {
  std::vector<double> m(kNumGroundLayers);
  for (int i = 0; i < kNumGroundLayers; ++i) {
    m[i] = map.layer(kNumOccupancyLayers + i)[cell];
  }
  return Bba(Fod::kGround, std::move(m));
}

}  // namespace evgrid
