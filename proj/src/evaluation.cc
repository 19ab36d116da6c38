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

#include "evgrid/evaluation.h"

#include <algorithm>
#include <stdexcept>

namespace evgrid {
namespace {

std::vector<double> ObjectLayer(const LayeredGrid& map) {
  const auto layer = map.layer(OccupancyLayerName(OccupancyHypothesis::kObject));
  return {layer.begin(), layer.end()};
}

double Above(const GroundModel& model, const Vec3& p) {
  return p.z() - model.Height(p.x(), p.y());
}

double PlaneOccupancy(const GroundModel& model, const Vec3& p,
                      const Corridors& corridors) {
  const double above = Above(model, p);
  return (above > model.tolerance() && above < corridors.d_z_max) ? 1.0 : 0.0;
}

void MarkCell(const GridSpec& spec, const Vec3& p,
              std::vector<std::uint8_t>& mask) {
  if (const auto cell = CellOf(spec, p.x(), p.y())) {
    mask[spec.Index(cell->i, cell->j)] = 0;
  }
}

void FillRates(FrameEvaluation& frame) {
  for (auto& m : frame.methods) {
    m.rates = ComputeConfusionRates(m.object_mass, frame.reference_mass,
                                    frame.all_mass, frame.mask);
  }
}

}  // namespace

std::optional<ConfusionRates> ComputeConfusionRates(
    std::span<const double> m_i, std::span<const double> m_ref,
    std::span<const double> m_all, std::span<const std::uint8_t> mask) {
  const std::size_t n = m_all.size();
  if (m_i.size() != n || m_ref.size() != n || (!mask.empty() && mask.size() != n)) {
    throw std::invalid_argument("confusion inputs differ in size");
  }
  ConfusionRates sum;
  for (std::size_t c = 0; c < n; ++c) {
    if (!mask.empty() && mask[c] == 0) continue;
    const double all = m_all[c];
    if (!(all > 0.0)) continue;
    const double mi = std::clamp(m_i[c] / all, 0.0, 1.0);
    const double mr = std::clamp(m_ref[c] / all, 0.0, 1.0);
    sum.tp += mi * mr * all;
    sum.fp += mi * (1.0 - mr) * all;
    sum.fn += (1.0 - mi) * mr * all;
    sum.tn += (1.0 - mi) * (1.0 - mr) * all;
  }
  const double total = sum.tp + sum.fp + sum.fn + sum.tn;
  if (!(total > 0.0)) return std::nullopt;
  return ConfusionRates{sum.tp / total, sum.fp / total, sum.fn / total,
                        sum.tn / total};
}

std::string MethodName(OccupancyMethod method) {
  switch (method) {
    case OccupancyMethod::kFlat:
      return "flat";
    case OccupancyMethod::kFittedPlane:
      return "fitted_plane";
    case OccupancyMethod::kNormals:
      return "normals";
  }
  return "unknown";
}

FrameEvaluation EvaluateReading(const SensorReading& reading,
                                const DerivedImages& derived,
                                const WarpTable& table,
                                const MappingParams& mapping,
                                const EvaluationParams& params) {
  if (reading.semantic.empty()) {
    throw std::invalid_argument("evaluation needs reference labels");
  }
  const Calibration& calib = reading.calibration;
  const GridSpec& meas = table.src_spec();
  const GridSpec& dst = table.dst_spec();
  const Extrinsics& ext = calib.extrinsics;

  std::vector<MeasurementElement> elements;
  std::vector<SemanticLabel> reference;
  std::vector<Vec3> vehicle_points;
  std::vector<std::uint8_t> mask(dst.NumCells(), 1);
  for (MeasurementElement e :
       BuildElements(reading, derived, meas, mapping.corridors)) {
    const SemanticLabel label = reading.semantic(e.pixel.v, e.pixel.u);
    const Vec3& p = derived.points(e.pixel.v, e.pixel.u);
    const Eigen::Vector2d xy = ext.SensorToVehicle({p.x(), p.y()});
    const Vec3 pv(xy.x(), xy.y(), p.z() + ext.z);
    if (label == SemanticLabel::kOtherGround) MarkCell(dst, pv, mask);
    if (label == SemanticLabel::kUnknown) continue;
    e.label = SemanticLabel::kUnknown;
    e.p_omega = 1.0;
    e.object_evidence = true;
    e.ground_evidence = false;
    elements.push_back(e);
    reference.push_back(label);
    vehicle_points.push_back(pv);
  }

  auto object_mass = [&](const std::vector<double>& p_occ) {
    std::vector<MeasurementElement> copy = elements;
    for (std::size_t i = 0; i < copy.size(); ++i) copy[i].p_occ = p_occ[i];
    const LayeredGrid h = AccumulateElements(copy, meas, mapping);
    return ObjectLayer(Finalize(h, table, mapping.workers));
  };

  const std::size_t n = elements.size();
  std::vector<double> p_ref(n);
  for (std::size_t i = 0; i < n; ++i) {
    p_ref[i] = IsObjectLabel(reference[i]) ? 1.0 : 0.0;
  }
  FrameEvaluation frame;
  frame.reference_mass = object_mass(p_ref);
  frame.all_mass = object_mass(std::vector<double>(n, 1.0));
  frame.mask = std::move(mask);

  for (OccupancyMethod method : params.methods) {
    std::vector<double> p_occ(n, 0.0);
    switch (method) {
      case OccupancyMethod::kNormals:
        for (std::size_t i = 0; i < n; ++i) p_occ[i] = elements[i].p_occ;
        break;
      case OccupancyMethod::kFlat: {
        const GroundModel model = GroundModel::Flat(params.ground_tolerance);
        for (std::size_t i = 0; i < n; ++i) {
          p_occ[i] = PlaneOccupancy(model, vehicle_points[i], mapping.corridors);
        }
        break;
      }
      case OccupancyMethod::kFittedPlane: {
        std::vector<LabeledPoint> pts;
        pts.reserve(n);
        for (const Vec3& p : vehicle_points) pts.push_back({p});
        PlaneFitOptions fit = params.plane_fit;
        fit.tolerance = params.ground_tolerance;
        const auto model = FitPlane(pts, fit);
        if (!model) throw std::runtime_error("ground plane fit failed");
        for (std::size_t i = 0; i < n; ++i) {
          p_occ[i] = PlaneOccupancy(*model, vehicle_points[i], mapping.corridors);
        }
        break;
      }
    }
    frame.methods.push_back({method, object_mass(p_occ), std::nullopt});
  }
  FillRates(frame);
  return frame;
}

FrameEvaluation EvaluatePointSet(const LabeledPointSet& set,
                                 const GridSpec& spec,
                                 const PointsetParams& mapping,
                                 const EvaluationParams& params) {
  LabeledPointSet labeled;
  labeled.sensor_origin = set.sensor_origin;
  std::vector<SemanticLabel> reference;
  std::vector<std::uint8_t> mask(spec.NumCells(), 1);
  for (const LabeledPoint& p : set.points) {
    if (p.label == SemanticLabel::kOtherGround) MarkCell(spec, p.position, mask);
    if (p.label == SemanticLabel::kUnknown) continue;
    labeled.points.push_back({p.position, SemanticLabel::kUnknown, 1.0});
    reference.push_back(p.label);
  }
  const std::size_t n = labeled.points.size();
  const GroundModel flat = GroundModel::Flat(params.ground_tolerance);

  auto object_mass = [&](const std::vector<double>& p_occ) {
    return ObjectLayer(
        FinalizeCells(PointsetEvidence(labeled, flat, spec, mapping, p_occ)));
  };

  std::vector<double> p_ref(n);
  for (std::size_t i = 0; i < n; ++i) {
    p_ref[i] = IsObjectLabel(reference[i]) ? 1.0 : 0.0;
  }
  FrameEvaluation frame;
  frame.mask = std::move(mask);
  if (n == 0) {
    frame.reference_mass.assign(spec.NumCells(), 0.0);
    frame.all_mass.assign(spec.NumCells(), 0.0);
  } else {
    frame.reference_mass = object_mass(p_ref);
    frame.all_mass = object_mass(std::vector<double>(n, 1.0));
  }

  for (OccupancyMethod method : params.methods) {
    if (method == OccupancyMethod::kNormals) continue;
    if (n == 0) {
      frame.methods.push_back({method, frame.all_mass, std::nullopt});
      continue;
    }
    std::optional<GroundModel> model;
    if (method == OccupancyMethod::kFlat) {
      model = flat;
    } else if (method == OccupancyMethod::kFittedPlane) {
      PlaneFitOptions fit = params.plane_fit;
      fit.tolerance = params.ground_tolerance;
      model = FitPlane(labeled.points, fit);
      if (!model) throw std::runtime_error("ground plane fit failed");
    } else {
      continue;
    }
    const std::vector<double> p_occ =
        ClassifyPoints(labeled.points, *model, mapping.corridors);
    frame.methods.push_back({method, object_mass(p_occ), std::nullopt});
  }
  FillRates(frame);
  return frame;
}

void WriteRatesCsvHeader(std::ostream& out) {
  out << "frame_index,method,xi_tp,xi_fp,xi_fn,xi_tn\n";
}

void WriteRatesCsv(std::ostream& out, int frame_index,
                   const FrameEvaluation& frame) {
  for (const auto& m : frame.methods) {
    out << frame_index << ',' << MethodName(m.method);
    if (m.rates) {
      out << ',' << m.rates->tp << ',' << m.rates->fp << ',' << m.rates->fn
          << ',' << m.rates->tn << '\n';
    } else {
      out << ",,,,\n";
    }
  }
}

}  // namespace evgrid
