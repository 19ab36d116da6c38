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

#include "evgrid/synth.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "Eigen/Geometry"

namespace evgrid {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinHit = 1e-9;

struct Hit {
  double t = kInf;
  Vec3 normal = Vec3::UnitZ();
  SemanticLabel label = SemanticLabel::kUnknown;
};

Eigen::Matrix3d Yaw(double yaw) {
  return Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
}

void IntersectGround(const Scene& scene, const Vec3& o, const Vec3& d,
                     Hit& best) {
  const auto& g = scene.ground;
  const double denom = d.z() - g.a * d.x() - g.b * d.y();
  if (denom == 0.0) return;
  const double t = (g.a * o.x() + g.b * o.y() + g.c - o.z()) / denom;
  if (t > kMinHit && t < best.t) {
    best.t = t;
    best.normal = Vec3(-g.a, -g.b, 1.0).normalized();
    best.label = scene.ground_label;
  }
}

void IntersectBox(const Box& box, const Vec3& o, const Vec3& d, Hit& best) {
  const Vec3 lo = box.center - 0.5 * box.size;
  const Vec3 hi = box.center + 0.5 * box.size;
  double t_near = -kInf;
  double t_far = kInf;
  int axis = -1;
  double sign = 0.0;
  for (int k = 0; k < 3; ++k) {
    if (d[k] == 0.0) {
      if (o[k] < lo[k] || o[k] > hi[k]) return;
      continue;
    }
    double t0 = (lo[k] - o[k]) / d[k];
    double t1 = (hi[k] - o[k]) / d[k];
    double s = -1.0;
    if (t0 > t1) {
      std::swap(t0, t1);
      s = 1.0;
    }
    if (t0 > t_near) {
      t_near = t0;
      axis = k;
      sign = s;
    }
    t_far = std::min(t_far, t1);
  }
  if (axis < 0 || t_near > t_far || t_near <= kMinHit || t_near >= best.t) {
    return;
  }
  best.t = t_near;
  best.normal = Vec3::Zero();
  best.normal[axis] = sign;
  best.label = box.label;
}

void IntersectWall(const Scene& scene, const Wall& wall, const Vec3& o,
                   const Vec3& d, Hit& best) {
  const Eigen::Vector2d e = wall.b - wall.a;
  const Eigen::Vector2d dxy(d.x(), d.y());
  const double denom = dxy.x() * e.y() - dxy.y() * e.x();
  if (denom == 0.0) return;
  const Eigen::Vector2d w = wall.a - Eigen::Vector2d(o.x(), o.y());
  const double t = (w.x() * e.y() - w.y() * e.x()) / denom;
  const double s = (w.x() * dxy.y() - w.y() * dxy.x()) / denom;
  if (t <= kMinHit || t >= best.t || s < 0.0 || s > 1.0) return;
  const Vec3 p = o + t * d;
  const double g = scene.GroundHeight(p.x(), p.y());
  if (p.z() < g || p.z() > g + wall.height) return;
  Vec3 n(-e.y(), e.x(), 0.0);
  n.normalize();
  if (n.dot(d) > 0.0) n = -n;
  best.t = t;
  best.normal = n;
  best.label = wall.label;
}

// Feasible parameter interval of alpha + beta * s > 0 intersected with [lo, hi].
void Constrain(double alpha, double beta, double& lo, double& hi) {
  if (beta == 0.0) {
    if (!(alpha > 0.0)) hi = lo - 1.0;
    return;
  }
  const double root = -alpha / beta;
  if (beta > 0.0) {
    lo = std::max(lo, root);
  } else {
    hi = std::min(hi, root);
  }
}

// A vertical face spanning [z_lo, z_hi] over the segment p(s) = a + s (b - a)
// meets the driving corridor if some s has g(s) < z_hi and
// g(s) + d_z_max > z_lo, with strict inequalities.
bool FaceMeetsCorridor(const std::function<double(const Eigen::Vector2d&)>& g,
                       const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                       double s0, double s1, double z_lo, double z_hi,
                       double d_z_max) {
  const double g0 = g(a);
  const double slope = g(b) - g0;
  double lo = s0;
  double hi = s1;
  Constrain(z_hi - g0, -slope, lo, hi);
  Constrain(g0 + d_z_max - z_lo, slope, lo, hi);
  if (hi > lo) return true;
  // Degenerate single point.
  if (hi == lo) {
    const double gs = g0 + slope * lo;
    return gs < z_hi && gs + d_z_max > z_lo;
  }
  return false;
}

// Clips the segment a + s (b - a) to the half-open cell; returns the s range.
bool ClipSegment(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                 const std::array<double, 2>& lo,
                 const std::array<double, 2>& hi, double& s0, double& s1) {
  s0 = 0.0;
  s1 = 1.0;
  const Eigen::Vector2d d = b - a;
  for (int k = 0; k < 2; ++k) {
    if (d[k] == 0.0) {
      if (a[k] < lo[k] || a[k] >= hi[k]) return false;
      continue;
    }
    double t0 = (lo[k] - a[k]) / d[k];
    double t1 = (hi[k] - a[k]) / d[k];
    if (t0 > t1) std::swap(t0, t1);
    s0 = std::max(s0, t0);
    s1 = std::min(s1, t1);
  }
  if (s1 < s0) return false;
  // Segments running along the upper cell boundary belong to the next cell.
  const Eigen::Vector2d mid = a + 0.5 * (s0 + s1) * d;
  for (int k = 0; k < 2; ++k) {
    if (mid[k] < lo[k] || mid[k] >= hi[k]) return false;
  }
  return true;
}

using Polygon = std::vector<Eigen::Vector2d>;

// Sutherland-Hodgman clip of `poly` by the convex counter-clockwise `clip`.
Polygon ClipPolygon(Polygon poly, const Polygon& clip) {
  for (std::size_t i = 0; i < clip.size() && !poly.empty(); ++i) {
    const Eigen::Vector2d& c0 = clip[i];
    const Eigen::Vector2d& c1 = clip[(i + 1) % clip.size()];
    const Eigen::Vector2d e = c1 - c0;
    auto side = [&](const Eigen::Vector2d& p) {
      return e.x() * (p.y() - c0.y()) - e.y() * (p.x() - c0.x());
    };
    Polygon out;
    for (std::size_t j = 0; j < poly.size(); ++j) {
      const Eigen::Vector2d& p = poly[j];
      const Eigen::Vector2d& q = poly[(j + 1) % poly.size()];
      const double sp = side(p);
      const double sq = side(q);
      if (sp >= 0.0) out.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) {
        out.push_back(p + (q - p) * (sp / (sp - sq)));
      }
    }
    poly = std::move(out);
  }
  return poly;
}

double PolygonArea(const Polygon& poly) {
  double area = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    area += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * area;
}

SemanticLabel ParseLabelOrThrow(const std::string& name, int line) {
  const auto label = ParseLabel(name);
  if (!label) {
    throw FormatError("scene line " + std::to_string(line) +
                      ": unknown label '" + name + "'");
  }
  return *label;
}

}  // namespace

void Scene::Check() const {
  for (const Box& box : boxes) {
    if (!(box.size.minCoeff() > 0.0)) throw ConfigError("box size must be > 0");
    double lowest_ground = kInf;
    for (double sx : {-0.5, 0.5}) {
      for (double sy : {-0.5, 0.5}) {
        lowest_ground = std::min(
            lowest_ground, GroundHeight(box.center.x() + sx * box.size.x(),
                                        box.center.y() + sy * box.size.y()));
      }
    }
    if (box.center.z() - 0.5 * box.size.z() < lowest_ground - 1e-6) {
      throw ConfigError("box extends below the ground plane");
    }
  }
  for (const Wall& wall : walls) {
    if (!(wall.height > 0.0)) throw ConfigError("wall height must be > 0");
    if ((wall.b - wall.a).norm() == 0.0) throw ConfigError("wall has no length");
  }
}

Rendering Render(const Scene& scene, const SensorModel& sensor) {
  scene.Check();
  const Calibration& calib = sensor.calibration;
  calib.Check();
  const int rows = calib.rows;
  const int cols = calib.cols;
  const Extrinsics& ext = calib.extrinsics;

  const Eigen::Matrix3d world_from_vehicle = Yaw(sensor.pose.yaw);
  const Eigen::Matrix3d world_from_sensor = world_from_vehicle * Yaw(ext.yaw);
  const Vec3 origin =
      sensor.pose.position + world_from_vehicle * Vec3(ext.x, ext.y, ext.z);

  Rendering out;
  out.reading.calibration = calib;
  out.reading.range = Image<double>(rows, cols, kUnknown);
  out.reading.semantic = Image<SemanticLabel>(rows, cols, SemanticLabel::kUnknown);
  out.points = Image<Vec3>(rows, cols, UnknownPoint());
  out.normals = Image<Vec3>(rows, cols, UnknownPoint());

  std::mt19937_64 rng(sensor.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  for (int v = 0; v < rows; ++v) {
    for (int u = 0; u < cols; ++u) {
      const Vec3 d_sensor = calib.RayDirection(v, u);
      const Vec3 d = world_from_sensor * d_sensor;
      Hit hit;
      IntersectGround(scene, origin, d, hit);
      for (const Box& box : scene.boxes) IntersectBox(box, origin, d, hit);
      for (const Wall& wall : scene.walls) {
        IntersectWall(scene, wall, origin, d, hit);
      }
      // Draw noise for every pixel so the stream does not depend on hits.
      const double n = sensor.noise_sigma > 0.0 ? noise(rng) : 0.0;
      if (!(hit.t <= sensor.max_range)) continue;
      const Vec3 p = hit.t * d_sensor;
      double value = 0.0;
      switch (calib.kind) {
        case SensorKind::kLidar:
          value = hit.t;
          break;
        case SensorKind::kStereo:
          value = calib.camera.focal_length * calib.camera.baseline / p.x();
          break;
        case SensorKind::kDepthCamera:
          value = p.x();
          break;
      }
      value += sensor.noise_sigma * n;
      if (!(value > 0.0)) continue;
      out.reading.range(v, u) = value;
      out.reading.semantic(v, u) = hit.label;
      out.points(v, u) = p;
      out.normals(v, u) = world_from_sensor.transpose() * hit.normal;
    }
  }
  return out;
}

LabeledPointSet ToPointSet(const Rendering& rendering) {
  const Calibration& calib = rendering.reading.calibration;
  const Extrinsics& ext = calib.extrinsics;
  LabeledPointSet set;
  set.sensor_origin = Vec3(ext.x, ext.y, ext.z);
  for (int v = 0; v < calib.rows; ++v) {
    for (int u = 0; u < calib.cols; ++u) {
      const Vec3& p = rendering.points(v, u);
      if (!IsKnown(p)) continue;
      const Eigen::Vector2d xy = ext.SensorToVehicle({p.x(), p.y()});
      LabeledPoint lp;
      lp.position = Vec3(xy.x(), xy.y(), p.z() + ext.z);
      lp.label = rendering.reading.semantic(v, u);
      set.points.push_back(lp);
    }
  }
  return set;
}

std::vector<CellState> TrueGrid(const Scene& scene, const GridSpec& spec,
                                const Corridors& corridors,
                                const VehiclePose& pose) {
  scene.Check();
  spec.Check();
  corridors.Check();
  const double d_z_max = corridors.d_z_max;
  const Eigen::Matrix2d r = Yaw(pose.yaw).topLeftCorner<2, 2>();
  const Eigen::Vector2d t = pose.position.head<2>();
  // World geometry expressed in the vehicle frame.
  auto to_vehicle = [&](const Eigen::Vector2d& w) {
    return Eigen::Vector2d(r.transpose() * (w - t));
  };
  auto ground = [&](const Eigen::Vector2d& v) {
    const Eigen::Vector2d w = r * v + t;
    return scene.GroundHeight(w.x(), w.y()) - pose.position.z();
  };

  struct Face {
    Eigen::Vector2d a, b;
    double z_lo, z_hi;  // absolute, vehicle frame; NaN for ground-relative
    double height;      // wall height above ground
  };
  std::vector<Face> faces;
  std::vector<std::pair<Polygon, std::array<double, 2>>> volumes;
  for (const Box& box : scene.boxes) {
    const Vec3 lo = box.center - 0.5 * box.size;
    const Vec3 hi = box.center + 0.5 * box.size;
    Polygon footprint = {to_vehicle({lo.x(), lo.y()}), to_vehicle({hi.x(), lo.y()}),
                         to_vehicle({hi.x(), hi.y()}), to_vehicle({lo.x(), hi.y()})};
    const double z_lo = lo.z() - pose.position.z();
    const double z_hi = hi.z() - pose.position.z();
    for (std::size_t i = 0; i < 4; ++i) {
      faces.push_back({footprint[i], footprint[(i + 1) % 4], z_lo, z_hi, 0.0});
    }
    volumes.push_back({footprint, {z_lo, z_hi}});
  }
  for (const Wall& wall : scene.walls) {
    faces.push_back({to_vehicle(wall.a), to_vehicle(wall.b), kUnknown, kUnknown,
                     wall.height});
  }

  std::vector<CellState> out(spec.NumCells(), CellState::kFree);
  for (int i = 0; i < spec.size[0]; ++i) {
    for (int j = 0; j < spec.size[1]; ++j) {
      const std::array<double, 2> lo = {spec.Lower(0, i), spec.Lower(1, j)};
      const std::array<double, 2> hi = {spec.Lower(0, i + 1),
                                        spec.Lower(1, j + 1)};
      bool occupied = false;
      for (const Face& f : faces) {
        double s0;
        double s1;
        if (!ClipSegment(f.a, f.b, lo, hi, s0, s1)) continue;
        if (!IsKnown(f.z_lo)) {
          occupied = true;  // a wall always spans the corridor floor
          break;
        }
        if (FaceMeetsCorridor(ground, f.a, f.b, s0, s1, f.z_lo, f.z_hi,
                              d_z_max)) {
          occupied = true;
          break;
        }
      }
      if (occupied) {
        out[spec.Index(i, j)] = CellState::kOccupied;
        continue;
      }
      const Polygon cell = {{lo[0], lo[1]}, {hi[0], lo[1]}, {hi[0], hi[1]},
                            {lo[0], hi[1]}};
      for (const auto& [footprint, z] : volumes) {
        const Polygon overlap = ClipPolygon(footprint, cell);
        if (overlap.size() < 3 || PolygonArea(overlap) <= 0.0) continue;
        double g_min = kInf;
        double g_max = -kInf;
        for (const auto& p : overlap) {
          g_min = std::min(g_min, ground(p));
          g_max = std::max(g_max, ground(p));
        }
        // Some ground height g in [g_min, g_max] with z_lo - d_z_max < g < z_hi.
        if (std::max(g_min, z[0] - d_z_max) < std::min(g_max, z[1]) ||
            (g_min == g_max && g_min > z[0] - d_z_max && g_min < z[1])) {
          out[spec.Index(i, j)] = CellState::kVoid;
          break;
        }
      }
    }
  }
  return out;
}

Scene ParseScene(std::istream& in) {
  Scene scene;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream fields(line);
    std::string kind;
    if (!(fields >> kind)) continue;
    auto fail = [&](const std::string& what) {
      return FormatError("scene line " + std::to_string(number) + ": " + what);
    };
    std::string label;
    if (kind == "ground") {
      if (!(fields >> scene.ground.a >> scene.ground.b >> scene.ground.c)) {
        throw fail("expected 'ground a b c'");
      }
    } else if (kind == "box") {
      Box box;
      if (!(fields >> box.center.x() >> box.center.y() >> box.center.z() >>
            box.size.x() >> box.size.y() >> box.size.z() >> label)) {
        throw fail("expected 'box cx cy cz sx sy sz label'");
      }
      box.label = ParseLabelOrThrow(label, number);
      scene.boxes.push_back(box);
    } else if (kind == "wall") {
      Wall wall;
      if (!(fields >> wall.a.x() >> wall.a.y() >> wall.b.x() >> wall.b.y() >>
            wall.height >> label)) {
        throw fail("expected 'wall x1 y1 x2 y2 h label'");
      }
      wall.label = ParseLabelOrThrow(label, number);
      scene.walls.push_back(wall);
    } else {
      throw fail("unknown primitive '" + kind + "'");
    }
    std::string extra;
    if (fields >> extra) throw fail("trailing field '" + extra + "'");
  }
  try {
    scene.Check();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid scene: ") + e.what());
  }
  return scene;
}

Scene LoadScene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene file '" + path + "'");
  return ParseScene(in);
}

}  // namespace evgrid
