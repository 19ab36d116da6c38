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

#include <cmath>
#include <random>

#include "evgrid/synth.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace evgrid {
namespace {

using testing::MakeLidar;

SensorReading SinglePixel(double elevation_deg, double range) {
  SensorReading r;
  r.calibration = MakeLidar(1, 4, 0.0, elevation_deg + 0.5, elevation_deg - 0.5);
  r.range = Image<double>(1, 4, range);
  return r;
}

TEST(SplitRangeImageTest, Examples) {
  const auto level = SplitRangeImage(SinglePixel(0.0, 10.0));
  EXPECT_NEAR(level.height(0, 0), 0.0, 1e-12);
  EXPECT_NEAR(level.dist_xy(0, 0), 10.0, 1e-12);

  const auto down = SplitRangeImage(SinglePixel(-30.0, 10.0));
  EXPECT_NEAR(down.height(0, 1), -5.0, 1e-12);
  EXPECT_NEAR(down.dist_xy(0, 1), 8.660254037844386, 1e-12);

  const auto unknown = SplitRangeImage(SinglePixel(0.0, kUnknown));
  EXPECT_FALSE(IsKnown(unknown.height(0, 2)));
  EXPECT_FALSE(IsKnown(unknown.dist_xy(0, 2)));
}

TEST(SplitRangeImageTest, ShapeMismatchIsConfigError) {
  SensorReading r = SinglePixel(0.0, 1.0);
  r.range = Image<double>(2, 4, 1.0);
  EXPECT_THROW(SplitRangeImage(r), ConfigError);
}

TEST(BilateralFilterTest, ConstantImageUnchanged) {
  const Image<double> img(6, 9, 3.25);
  const Image<double> out = BilateralFilter(img, {}, true);
  for (double v : out.data()) EXPECT_NEAR(v, 3.25, 1e-12);
}

TEST(BilateralFilterTest, PreservesStepEdge) {
  Image<double> img(8, 10, 0.0);
  for (int v = 0; v < 8; ++v) {
    for (int u = 5; u < 10; ++u) img(v, u) = 10.0;
  }
  const Image<double> out = BilateralFilter(img, {0.1, 1.5, 2});
  for (int v = 0; v < 8; ++v) {
    for (int u = 0; u < 10; ++u) EXPECT_NEAR(out(v, u), img(v, u), 1e-6);
  }
}

TEST(BilateralFilterTest, ReducesIsolatedNoise) {
  Image<double> img(3, 3, 1.0);
  img(1, 1) = 1.2;
  const BilateralParams p{0.5, 1.0, 1};
  const Image<double> out = BilateralFilter(img, p);
  // Explicit 3 x 3 weighted average around the noisy pixel.
  double sum = 1.2;
  double weight = 1.0;
  for (int dv = -1; dv <= 1; ++dv) {
    for (int du = -1; du <= 1; ++du) {
      if (dv == 0 && du == 0) continue;
      const double w = std::exp(-(dv * dv + du * du) / 2.0) * std::exp(-0.04 / 0.5);
      sum += w * 1.0;
      weight += w;
    }
  }
  EXPECT_NEAR(out(1, 1), sum / weight, 1e-12);
  EXPECT_LT(std::abs(out(1, 1) - 1.0), 0.2);
}

TEST(BilateralFilterTest, LargeRangeSigmaIsGaussianBlur) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Image<double> img(20, 30);
  for (double& v : img.data()) v = u(rng);
  const BilateralParams p{1e9, 1.5, 2};
  const Image<double> out = BilateralFilter(img, p);
  double worst = 0.0;
  for (int v = 0; v < 20; ++v) {
    for (int c = 0; c < 30; ++c) {
      double sum = 0.0, weight = 0.0;
      for (int dv = -2; dv <= 2; ++dv) {
        for (int du = -2; du <= 2; ++du) {
          if (v + dv < 0 || v + dv >= 20 || c + du < 0 || c + du >= 30) continue;
          const double w = std::exp(-(dv * dv + du * du) / (2.0 * 1.5 * 1.5));
          sum += w * img(v + dv, c + du);
          weight += w;
        }
      }
      worst = std::max(worst, std::abs(out(v, c) - sum / weight));
    }
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(BilateralFilterTest, UnknownStaysUnknown) {
  Image<double> img(3, 3, 1.0);
  img(0, 0) = kUnknown;
  const Image<double> out = BilateralFilter(img, {});
  EXPECT_FALSE(IsKnown(out(0, 0)));
  EXPECT_NEAR(out(1, 1), 1.0, 1e-12);
}

TEST(BilateralFilterTest, RejectsBadWindow) {
  EXPECT_THROW(BilateralFilter(Image<double>(2, 2, 0.0), {0.1, 1.5, 0}), ConfigError);
}

TEST(SelectNeighborsTest, PlaneInteriorPrefersRightAndBelow) {
  Image<Vec3> pts(5, 5);
  for (int v = 0; v < 5; ++v) {
    for (int u = 0; u < 5; ++u) pts(v, u) = Vec3(u, v, 0.0);
  }
  const auto n = SelectNeighbors(pts, {2, 2});
  ASSERT_TRUE(n);
  EXPECT_EQ(n->horizontal, (PixelIndex{2, 3}));
  EXPECT_EQ(n->vertical, (PixelIndex{3, 2}));
}

TEST(SelectNeighborsTest, ForegroundEdgeChoosesNearSide) {
  Image<Vec3> pts(3, 3);
  for (int v = 0; v < 3; ++v) {
    pts(v, 0) = Vec3(10.0, 0.1, 0.1 * v);
    pts(v, 1) = Vec3(10.0, 0.0, 0.1 * v);
    pts(v, 2) = Vec3(30.0, -0.3, 0.3 * v);  // background at 3x the distance
  }
  const auto n = SelectNeighbors(pts, {1, 1});
  ASSERT_TRUE(n);
  EXPECT_EQ(n->horizontal, (PixelIndex{1, 0}));
}

TEST(SelectNeighborsTest, IsolatedPixelFails) {
  Image<Vec3> pts(7, 7, UnknownPoint());
  pts(3, 3) = Vec3(5.0, 0.0, 0.0);
  EXPECT_FALSE(SelectNeighbors(pts, {3, 3}));
}

TEST(SurfaceNormalTest, Examples) {
  const auto a = SurfaceNormal(Vec3::Zero(), Vec3(1, 0, 0), Vec3(0, 1, 0));
  ASSERT_TRUE(a);
  EXPECT_NEAR((*a - Vec3(0, 0, 1)).norm(), 0.0, 1e-12);
  const auto b = SurfaceNormal(Vec3::Zero(), Vec3(0, 1, 0), Vec3(0, 0, 1));
  ASSERT_TRUE(b);
  EXPECT_NEAR((*b - Vec3(1, 0, 0)).norm(), 0.0, 1e-12);
  EXPECT_FALSE(SurfaceNormal(Vec3::Zero(), Vec3(1, 1, 1), Vec3(2, 2, 2)));
}

TEST(SurfaceNormalTest, UnitLengthAndFacesOrigin) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 p(u(rng), u(rng), u(rng));
    const Vec3 a(u(rng), u(rng), u(rng));
    const Vec3 b(u(rng), u(rng), u(rng));
    const auto n = SurfaceNormal(p, a, b);
    if (!n) continue;
    EXPECT_NEAR(n->norm(), 1.0, 1e-6);
    EXPECT_GE(n->dot(-p), 0.0);
  }
}

TEST(OccupancyWeightTest, Examples) {
  EXPECT_NEAR(OccupancyWeight(std::cos(kPi / 4.0), 10.0), 0.5, 1e-12);
  const double horizontal = 1.0 / (1.0 + std::exp(10.0 * kPi / 4.0));
  EXPECT_NEAR(OccupancyWeight(1.0, 10.0), horizontal, 1e-15);
  EXPECT_NEAR(OccupancyWeight(1.0, 10.0), 3.88e-4, 1e-6);
  const double vertical = 1.0 / (1.0 + std::exp(-10.0 * kPi / 4.0));
  EXPECT_NEAR(OccupancyWeight(0.0, 10.0), vertical, 1e-15);
  EXPECT_NEAR(OccupancyWeight(0.0, 10.0), 0.99961, 1e-5);
}

TEST(OccupancyWeightTest, MonotoneDecreasingInN3) {
  double previous = 2.0;
  for (double n3 = -1.0; n3 <= 1.0; n3 += 0.01) {
    const double w = OccupancyWeight(n3, 10.0);
    EXPECT_LE(w, previous);
    previous = w;
  }
}

TEST(NormalConfidenceTest, Examples) {
  EXPECT_NEAR(NormalConfidence(0.1, 0.3, 0.1, 50.0), 0.5, 1e-15);
  EXPECT_GT(NormalConfidence(5.0, 5.0, 0.1, 50.0), 1.0 - 1e-12);
  EXPECT_NEAR(NormalConfidence(0.05, 0.20, 0.10, 50.0), 1.0 / (1.0 + std::exp(2.5)),
              1e-15);
  EXPECT_NEAR(NormalConfidence(0.05, 0.20, 0.10, 50.0), 0.0759, 1e-4);
}

TEST(NormalConfidenceTest, MonotoneIncreasingInDistance) {
  double previous = -1.0;
  for (double d = 0.0; d < 1.0; d += 0.005) {
    const double c = NormalConfidence(d, 2.0, 0.1, 50.0);
    EXPECT_GE(c, previous);
    previous = c;
  }
}

TEST(OccupancyProbabilityTest, Examples) {
  EXPECT_DOUBLE_EQ(OccupancyProbability(1.0, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(OccupancyProbability(0.0, 0.7), 0.0);
  EXPECT_NEAR(OccupancyProbability(0.8, 0.9), 0.72, 1e-15);
}

Rendering RenderScene(const Scene& scene, int rows, int cols, double height) {
  SensorModel sensor;
  sensor.calibration = MakeLidar(rows, cols, height);
  return Render(scene, sensor);
}

bool Interior(const Rendering& r, int v, int u, SemanticLabel label, int margin) {
  const auto& img = r.reading.semantic;
  for (int dv = -margin; dv <= margin; ++dv) {
    for (int du = -margin; du <= margin; ++du) {
      const int vv = v + dv;
      const int uu = ((u + du) % img.cols() + img.cols()) % img.cols();
      if (vv < 0 || vv >= img.rows() || img(vv, uu) != label) return false;
    }
  }
  return true;
}

TEST(GroundHeightTest, FlatPlaneIsGround) {
  const Rendering r = RenderScene(Scene{}, 64, 512, 1.7);
  const DerivedImages d = ComputeDerivedImages(r.reading, {});
  int known = 0;
  for (int v = 0; v < 64; ++v) {
    for (int u = 0; u < 512; ++u) {
      if (!IsKnown(d.points(v, u))) continue;
      ++known;
      EXPECT_TRUE(d.is_ground(v, u)) << v << "," << u;
      EXPECT_NEAR(d.ground(v, u), 0.0, 0.02);
    }
  }
  EXPECT_GT(known, 1000);
}

TEST(GroundHeightTest, WallPixelsCarryHeightAboveGround) {
  Scene scene;
  scene.walls.push_back({{10.0, -20.0}, {10.0, 20.0}, 3.0, SemanticLabel::kImmobile});
  const Rendering r = RenderScene(scene, 64, 512, 1.7);
  const DerivedImages d = ComputeDerivedImages(r.reading, {});
  int checked = 0;
  for (int v = 0; v < 64; ++v) {
    for (int u = 0; u < 512; ++u) {
      if (!Interior(r, v, u, SemanticLabel::kImmobile, 2)) continue;
      const double true_height = r.points(v, u).z() + 1.7;
      EXPECT_FALSE(d.is_ground(v, u));
      EXPECT_NEAR(d.ground(v, u), true_height, 0.05);
      if (std::abs(true_height - 1.2) < 0.1) ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(GroundHeightTest, BoxRoofStaysObstacle) {
  Scene scene;
  // The lowest ray meets the ground at 4.1 m, in front of the box.
  scene.boxes.push_back({Vec3(6.5, 0.0, 0.75), Vec3(4.0, 4.0, 1.5), SemanticLabel::kCar});
  const Rendering r = RenderScene(scene, 128, 512, 1.9);
  const DerivedImages d = ComputeDerivedImages(r.reading, {});
  int roof = 0;
  for (int v = 0; v < 128; ++v) {
    for (int u = 0; u < 512; ++u) {
      if (!Interior(r, v, u, SemanticLabel::kCar, 2)) continue;
      // The whole filter window must lie on the roof.
      bool on_roof = true;
      for (int dv = -2; dv <= 2; ++dv) {
        for (int du = -2; du <= 2; ++du) {
          on_roof = on_roof && r.normals(v + dv, (u + du + 512) % 512).z() > 0.99;
        }
      }
      if (!on_roof) continue;
      ++roof;
      EXPECT_FALSE(d.is_ground(v, u));
      EXPECT_NEAR(d.ground(v, u), 1.5, 0.05);
    }
  }
  EXPECT_GT(roof, 0);
}

TEST(GroundHeightTest, ColumnLocal) {
  Scene scene;
  scene.boxes.push_back({Vec3(8.0, 2.0, 0.75), Vec3(4.0, 2.0, 1.5), SemanticLabel::kCar});
  scene.walls.push_back({{-5.0, -12.0}, {20.0, -12.0}, 2.5, SemanticLabel::kImmobile});
  const Rendering r = RenderScene(scene, 32, 256, 1.7);
  const DerivedImages d = ComputeDerivedImages(r.reading, {});
  std::vector<int> perm(256);
  for (int u = 0; u < 256; ++u) perm[u] = (u * 37 + 11) % 256;
  Image<Vec3> pts(32, 256), nrm(32, 256);
  for (int v = 0; v < 32; ++v) {
    for (int u = 0; u < 256; ++u) {
      pts(v, u) = d.points(v, perm[u]);
      nrm(v, u) = d.normals(v, perm[u]);
    }
  }
  const GroundImages a = GroundHeightImage(d.points, d.normals, 1.7);
  const GroundImages b = GroundHeightImage(pts, nrm, 1.7);
  for (int v = 0; v < 32; ++v) {
    for (int u = 0; u < 256; ++u) {
      const double x = a.ground(v, perm[u]);
      const double y = b.ground(v, u);
      EXPECT_TRUE((std::isnan(x) && std::isnan(y)) || x == y);
      EXPECT_EQ(a.is_ground(v, perm[u]), b.is_ground(v, u));
    }
  }
}

TEST(DerivedImagesTest, InvariantsAndWorkerIndependence) {
  Scene scene;
  scene.boxes.push_back({Vec3(6.0, -3.0, 0.9), Vec3(2.0, 2.0, 1.8), SemanticLabel::kCar});
  SensorModel sensor;
  sensor.calibration = MakeLidar(32, 400, 1.7);
  sensor.noise_sigma = 0.02;
  sensor.seed = 3;
  const Rendering r = Render(scene, sensor);
  ProcessingParams one;
  ProcessingParams many;
  many.workers = 3;
  const DerivedImages a = ComputeDerivedImages(r.reading, one);
  const DerivedImages b = ComputeDerivedImages(r.reading, many);
  for (int v = 0; v < 32; ++v) {
    for (int u = 0; u < 400; ++u) {
      if (IsKnown(a.normals(v, u))) EXPECT_NEAR(a.normals(v, u).norm(), 1.0, 1e-6);
      const double f = a.occupancy(v, u);
      if (IsKnown(f)) {
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0);
      }
      const double g = b.occupancy(v, u);
      EXPECT_TRUE((std::isnan(f) && std::isnan(g)) || f == g);
    }
  }
}

TEST(DerivedImagesTest, GentleSlopeHasLowOccupancy) {
  Scene scene;
  scene.ground = {std::tan(DegToRad(15.0)), 0.0, 0.0};
  const Rendering r = RenderScene(scene, 64, 720, 1.7);
  const DerivedImages d = ComputeDerivedImages(r.reading, {});
  double sum = 0.0;
  int n = 0;
  for (int v = 0; v < 64; ++v) {
    for (int u = 0; u < 720; ++u) {
      if (!IsKnown(d.normals(v, u))) continue;
      sum += d.occupancy(v, u);
      ++n;
    }
  }
  ASSERT_GT(n, 0);
  EXPECT_LT(sum / n, 0.1);
}

}  // namespace
}  // namespace evgrid
