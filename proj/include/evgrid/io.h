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

#ifndef EVGRID_IO_H_
#define EVGRID_IO_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evgrid/grid.h"
#include "evgrid/pointset_mapping.h"
#include "evgrid/sensor_image.h"

namespace evgrid {

// Dataset class id (lower 16 bits of a label word) to hypothesis label.
using ClassMap = std::map<std::uint16_t, SemanticLabel>;

// Mapping for the SemanticKITTI label ids; ids not listed map to unknown.
ClassMap DefaultClassMap();

// Binary little-endian records of (x, y, z, intensity) float32. When
// `labels_path` is given, reads one uint32 per point. Throws FormatError.
LabeledPointSet LoadPointCloud(const std::string& path,
                               const std::optional<std::string>& labels_path = {},
                               const ClassMap& class_map = DefaultClassMap());
// Label file next to a point cloud: same stem, ".label" extension.
std::string CompanionLabelPath(const std::string& cloud_path);

// Writes points (intensity 0) and, if `labels_path` is set, their labels
// using the first class id that maps to each label.
void SavePointCloud(const std::string& path, const LabeledPointSet& set,
                    const std::optional<std::string>& labels_path = {},
                    const ClassMap& class_map = DefaultClassMap());

// 16-bit grayscale PNG; value = raw / scale, raw 0 is unknown.
Image<double> LoadDisparityImage(const std::string& path, double scale = 256.0);
void SaveDisparityImage(const std::string& path, const Image<double>& disparity,
                        double scale = 256.0);

// 8- or 16-bit grayscale PNG of class ids.
Image<SemanticLabel> LoadLabelImage(const std::string& path,
                                    const ClassMap& class_map = DefaultClassMap());
void SaveLabelImage(const std::string& path, const Image<SemanticLabel>& labels,
                    const ClassMap& class_map = DefaultClassMap());

// Spherical projection of a vehicle-frame point set into a LiDAR range image;
// the nearest point wins a pixel.
SensorReading LidarToRangeImage(const LabeledPointSet& set,
                                const Calibration& calibration);

// EVGM binary grid map. Layers are stored as float32.
void SaveGridMap(const std::string& path, const LayeredGrid& map);
LayeredGrid LoadGridMap(const std::string& path);
std::vector<std::uint8_t> EncodeGridMap(const LayeredGrid& map);
LayeredGrid DecodeGridMap(const std::vector<std::uint8_t>& bytes);
// Bytes before the first layer name.
inline constexpr std::size_t kGridMapHeaderSize = 50;

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB

  std::array<std::uint8_t, 3> at(int row, int col) const;
};

enum class VisualizationMode { kOccupancy, kSemantic };

// Top view with +x up and +y to the left: cell (i, j) lands at row
// size[0] - 1 - i, column size[1] - 1 - j.
RgbImage RenderVisualization(const LayeredGrid& map, VisualizationMode mode);

// Hue of each class in the semantic view (degrees); nullopt for the union
// layers, drawn in gray.
std::optional<double> ClassHue(SemanticLabel label);

// Writes PPM for a ".ppm" path and PNG otherwise.
void SaveImage(const std::string& path, const RgbImage& image);

}  // namespace evgrid

#endif  // EVGRID_IO_H_
