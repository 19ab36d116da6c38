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

#include "evgrid/io.h"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "evgrid/measurement_mapping.h"

namespace evgrid {
namespace {

constexpr char kMagic[4] = {'E', 'V', 'G', 'M'};
constexpr std::uint16_t kVersion = 1;

std::vector<std::uint8_t> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFile(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

template <typename T>
void PutLe(std::vector<std::uint8_t>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t,
                                                  std::uint16_t>>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
}

class Reader {
 public:
  Reader(const std::vector<std::uint8_t>& bytes, std::string what)
      : bytes_(bytes), what_(std::move(what)) {}

  template <typename T>
  T Get() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                                 std::conditional_t<sizeof(T) == 4,
                                                    std::uint32_t, std::uint16_t>>;
    Need(sizeof(T));
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bits |= static_cast<U>(static_cast<U>(bytes_[pos_ + i]) << (8 * i));
    }
    pos_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }
  std::uint8_t Byte() {
    Need(1);
    return bytes_[pos_++];
  }
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError(what_ + ": truncated");
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::string what_;
  std::size_t pos_ = 0;
};

struct PngData {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<std::uint8_t> bytes;  // rows back to back, PNG byte order
  std::string error;
};

// Kept free of C++ objects with destructors across setjmp.
bool ReadPngRaw(std::FILE* fp, PngData* out) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  std::vector<png_bytep>* rows = new std::vector<png_bytep>();
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    delete rows;
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  out->width = static_cast<int>(png_get_image_width(png, info));
  out->height = static_cast<int>(png_get_image_height(png, info));
  out->bit_depth = png_get_bit_depth(png, info);
  out->color_type = png_get_color_type(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out->bytes.assign(stride * out->height, 0);
  rows->resize(out->height);
  for (int r = 0; r < out->height; ++r) (*rows)[r] = out->bytes.data() + r * stride;
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  delete rows;
  return true;
}

PngData LoadPng(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (fp == nullptr) throw std::runtime_error("cannot open '" + path + "'");
  unsigned char sig[8] = {};
  if (std::fread(sig, 1, 8, fp) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    std::fclose(fp);
    throw FormatError("'" + path + "' is not a PNG file");
  }
  std::rewind(fp);
  PngData data;
  const bool ok = ReadPngRaw(fp, &data);
  std::fclose(fp);
  if (!ok) throw FormatError("'" + path + "': corrupt PNG");
  return data;
}

bool WritePngRaw(std::FILE* fp, int width, int height, int bit_depth,
                 int color_type, const std::uint8_t* data, std::size_t stride) {
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, width, height, bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < height; ++r) {
    png_write_row(png, const_cast<png_bytep>(data + r * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

void SavePng(const std::string& path, int width, int height, int bit_depth,
             int color_type, const std::vector<std::uint8_t>& data) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (fp == nullptr) throw std::runtime_error("cannot write '" + path + "'");
  const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  const std::size_t stride =
      static_cast<std::size_t>(width) * channels * (bit_depth / 8);
  const bool ok =
      WritePngRaw(fp, width, height, bit_depth, color_type, data.data(), stride);
  std::fclose(fp);
  if (!ok) throw std::runtime_error("failed writing PNG '" + path + "'");
}

std::uint16_t ClassIdFor(SemanticLabel label, const ClassMap& class_map) {
  for (const auto& [id, l] : class_map) {
    if (l == label) return id;
  }
  return 0;
}

SemanticLabel LabelFor(std::uint32_t word, const ClassMap& class_map) {
  const auto it = class_map.find(static_cast<std::uint16_t>(word & 0xFFFF));
  return it == class_map.end() ? SemanticLabel::kUnknown : it->second;
}

std::array<std::uint8_t, 3> HsvToRgb(double h, double s, double v) {
  h = std::fmod(std::fmod(h, 360.0) + 360.0, 360.0) / 60.0;
  const int sector = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  double r = v, g = t, b = p;
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    case 5: r = v; g = p; b = q; break;
  }
  auto byte = [](double x) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0));
  };
  return {byte(r), byte(g), byte(b)};
}

}  // namespace

ClassMap DefaultClassMap() {
  using L = SemanticLabel;
  return {
      {0, L::kUnknown},       {1, L::kUnknown},       {10, L::kCar},
      {11, L::kTwoWheeler},   {13, L::kOtherMobile},  {15, L::kTwoWheeler},
      {16, L::kOtherMobile},  {18, L::kOtherMobile},  {20, L::kOtherMobile},
      {30, L::kPedestrian},   {31, L::kTwoWheeler},   {32, L::kTwoWheeler},
      {40, L::kStreet},       {44, L::kOtherGround},  {48, L::kSidewalk},
      {49, L::kOtherGround},  {50, L::kImmobile},     {51, L::kImmobile},
      {52, L::kImmobile},     {60, L::kStreet},       {70, L::kImmobile},
      {71, L::kImmobile},     {72, L::kOtherGround},  {80, L::kImmobile},
      {81, L::kImmobile},     {99, L::kImmobile},     {252, L::kCar},
      {253, L::kTwoWheeler},  {254, L::kPedestrian},  {255, L::kTwoWheeler},
      {256, L::kOtherMobile}, {257, L::kOtherMobile}, {258, L::kOtherMobile},
      {259, L::kOtherMobile},
  };
}

std::string CompanionLabelPath(const std::string& cloud_path) {
  return std::filesystem::path(cloud_path).replace_extension(".label").string();
}

LabeledPointSet LoadPointCloud(const std::string& path,
                               const std::optional<std::string>& labels_path,
                               const ClassMap& class_map) {
  const auto bytes = ReadFile(path);
  if (bytes.size() % 16 != 0) {
    throw FormatError("'" + path + "': size " + std::to_string(bytes.size()) +
                      " is not a multiple of 16 bytes");
  }
  const std::size_t n = bytes.size() / 16;
  LabeledPointSet set;
  set.points.resize(n);
  Reader reader(bytes, path);
  for (std::size_t i = 0; i < n; ++i) {
    const float x = reader.Get<float>();
    const float y = reader.Get<float>();
    const float z = reader.Get<float>();
    reader.Get<float>();  // intensity
    set.points[i].position = Vec3(x, y, z);
  }
  if (labels_path) {
    const auto label_bytes = ReadFile(*labels_path);
    if (label_bytes.size() != 4 * n) {
      throw FormatError("'" + *labels_path + "': expected " + std::to_string(n) +
                        " labels, found " + std::to_string(label_bytes.size()) +
                        " bytes");
    }
    Reader labels(label_bytes, *labels_path);
    for (std::size_t i = 0; i < n; ++i) {
      set.points[i].label = LabelFor(labels.Get<std::uint32_t>(), class_map);
    }
  }
  return set;
}

void SavePointCloud(const std::string& path, const LabeledPointSet& set,
                    const std::optional<std::string>& labels_path,
                    const ClassMap& class_map) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(set.points.size() * 16);
  for (const auto& p : set.points) {
    PutLe(bytes, static_cast<float>(p.position.x()));
    PutLe(bytes, static_cast<float>(p.position.y()));
    PutLe(bytes, static_cast<float>(p.position.z()));
    PutLe(bytes, 0.0f);
  }
  WriteFile(path, bytes);
  if (labels_path) {
    std::vector<std::uint8_t> labels;
    for (const auto& p : set.points) {
      PutLe(labels, static_cast<std::uint32_t>(ClassIdFor(p.label, class_map)));
    }
    WriteFile(*labels_path, labels);
  }
}

Image<double> LoadDisparityImage(const std::string& path, double scale) {
  if (!(scale > 0.0)) throw ConfigError("disparity scale must be > 0");
  const PngData png = LoadPng(path);
  if (png.bit_depth != 16 || png.color_type != PNG_COLOR_TYPE_GRAY) {
    throw FormatError("'" + path + "': expected a 16-bit grayscale PNG, got " +
                      std::to_string(png.bit_depth) + "-bit color type " +
                      std::to_string(png.color_type));
  }
  Image<double> out(png.height, png.width, kUnknown);
  for (int v = 0; v < png.height; ++v) {
    for (int u = 0; u < png.width; ++u) {
      const std::size_t k = (static_cast<std::size_t>(v) * png.width + u) * 2;
      const unsigned raw = (png.bytes[k] << 8) | png.bytes[k + 1];
      if (raw != 0) out(v, u) = raw / scale;
    }
  }
  return out;
}

void SaveDisparityImage(const std::string& path, const Image<double>& disparity,
                        double scale) {
  if (!(scale > 0.0)) throw ConfigError("disparity scale must be > 0");
  std::vector<std::uint8_t> data;
  data.reserve(disparity.data().size() * 2);
  for (double d : disparity.data()) {
    long raw = IsKnown(d) ? std::lround(d * scale) : 0;
    raw = std::clamp<long>(raw, 0, 65535);
    if (IsKnown(d) && raw == 0) raw = 1;
    data.push_back(static_cast<std::uint8_t>(raw >> 8));
    data.push_back(static_cast<std::uint8_t>(raw & 0xFF));
  }
  SavePng(path, disparity.cols(), disparity.rows(), 16, PNG_COLOR_TYPE_GRAY, data);
}

Image<SemanticLabel> LoadLabelImage(const std::string& path,
                                    const ClassMap& class_map) {
  const PngData png = LoadPng(path);
  if ((png.bit_depth != 8 && png.bit_depth != 16) ||
      png.color_type != PNG_COLOR_TYPE_GRAY) {
    throw FormatError("'" + path + "': expected an 8- or 16-bit grayscale PNG");
  }
  Image<SemanticLabel> out(png.height, png.width, SemanticLabel::kUnknown);
  for (int v = 0; v < png.height; ++v) {
    for (int u = 0; u < png.width; ++u) {
      const std::size_t k = static_cast<std::size_t>(v) * png.width + u;
      const unsigned id = png.bit_depth == 8
                              ? png.bytes[k]
                              : (png.bytes[2 * k] << 8) | png.bytes[2 * k + 1];
      out(v, u) = LabelFor(id, class_map);
    }
  }
  return out;
}

void SaveLabelImage(const std::string& path, const Image<SemanticLabel>& labels,
                    const ClassMap& class_map) {
  std::vector<std::uint8_t> data;
  for (SemanticLabel l : labels.data()) {
    const std::uint16_t id = ClassIdFor(l, class_map);
    data.push_back(static_cast<std::uint8_t>(id >> 8));
    data.push_back(static_cast<std::uint8_t>(id & 0xFF));
  }
  SavePng(path, labels.cols(), labels.rows(), 16, PNG_COLOR_TYPE_GRAY, data);
}

SensorReading LidarToRangeImage(const LabeledPointSet& set,
                                const Calibration& calibration) {
  calibration.Check();
  if (calibration.kind != SensorKind::kLidar) {
    throw ConfigError("range-image projection needs a LiDAR calibration");
  }
  const int rows = calibration.rows;
  const int cols = calibration.cols;
  const auto& lidar = calibration.lidar;
  const Extrinsics& ext = calibration.extrinsics;
  SensorReading reading;
  reading.calibration = calibration;
  reading.range = Image<double>(rows, cols, kUnknown);
  reading.semantic = Image<SemanticLabel>(rows, cols, SemanticLabel::kUnknown);
  reading.confidence = Image<double>(rows, cols, 1.0);
  const double fov = lidar.fov_up_deg - lidar.fov_down_deg;
  for (const auto& lp : set.points) {
    const Vec3& pv = lp.position;
    if (!pv.allFinite()) continue;
    const Eigen::Vector2d xy = ext.VehicleToSensor({pv.x(), pv.y()});
    const Vec3 p(xy.x(), xy.y(), pv.z() - ext.z);
    const double range = p.norm();
    if (!(range > 0.0)) continue;
    const double el = RadToDeg(std::asin(p.z() / range));
    const double row = std::floor((lidar.fov_up_deg - el) / fov * rows);
    if (row < 0 || row >= rows) continue;
    double az = RadToDeg(std::atan2(p.y(), p.x())) - lidar.azimuth_offset_deg;
    az = std::fmod(std::fmod(az, 360.0) + 360.0, 360.0);
    const int u = std::min(cols - 1, static_cast<int>(az / 360.0 * cols));
    const int v = static_cast<int>(row);
    double& current = reading.range(v, u);
    if (IsKnown(current) && current <= range) continue;
    current = range;
    reading.semantic(v, u) = lp.label;
    reading.confidence(v, u) = std::clamp(lp.confidence, 0.0, 1.0);
  }
  return reading;
}

std::vector<std::uint8_t> EncodeGridMap(const LayeredGrid& map) {
  const GridSpec& spec = map.spec();
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  PutLe(out, kVersion);
  for (double o : spec.origin) PutLe(out, o);
  for (double r : spec.resolution) PutLe(out, r);
  for (int s : spec.size) PutLe(out, static_cast<std::uint32_t>(s));
  PutLe(out, static_cast<std::uint32_t>(map.num_layers()));
  for (int l = 0; l < map.num_layers(); ++l) {
    const std::string& name = map.names()[l];
    out.insert(out.end(), name.begin(), name.end());
    out.push_back(0);
    for (double v : map.layer(l)) PutLe(out, static_cast<float>(v));
  }
  return out;
}

LayeredGrid DecodeGridMap(const std::vector<std::uint8_t>& bytes) {
  Reader reader(bytes, "grid map");
  char magic[4];
  for (char& c : magic) c = static_cast<char>(reader.Byte());
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("grid map: bad magic");
  const auto version = reader.Get<std::uint16_t>();
  if (version != kVersion) {
    throw FormatError("grid map: unsupported version " + std::to_string(version));
  }
  GridSpec spec;
  for (double& o : spec.origin) o = reader.Get<double>();
  for (double& r : spec.resolution) r = reader.Get<double>();
  for (int& s : spec.size) {
    const auto v = reader.Get<std::uint32_t>();
    if (v == 0 || v > 1u << 20) throw FormatError("grid map: bad size");
    s = static_cast<int>(v);
  }
  try {
    spec.Check();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("grid map: ") + e.what());
  }
  const auto layers = reader.Get<std::uint32_t>();
  const std::size_t cells = spec.NumCells();
  std::vector<std::string> names;
  std::vector<std::vector<float>> data;
  for (std::uint32_t l = 0; l < layers; ++l) {
    std::string name;
    for (;;) {
      const char c = static_cast<char>(reader.Byte());
      if (c == 0) break;
      name.push_back(c);
    }
    reader.Need(cells * 4);
    std::vector<float> values(cells);
    for (float& v : values) v = reader.Get<float>();
    names.push_back(std::move(name));
    data.push_back(std::move(values));
  }
  if (reader.remaining() != 0) throw FormatError("grid map: trailing bytes");
  LayeredGrid map(spec, names);
  for (std::size_t l = 0; l < data.size(); ++l) {
    std::copy(data[l].begin(), data[l].end(), map.layer(static_cast<int>(l)).begin());
  }
  return map;
}

void SaveGridMap(const std::string& path, const LayeredGrid& map) {
  WriteFile(path, EncodeGridMap(map));
}

LayeredGrid LoadGridMap(const std::string& path) {
  try {
    return DecodeGridMap(ReadFile(path));
  } catch (const FormatError& e) {
    throw FormatError("'" + path + "': " + e.what());
  }
}

std::array<std::uint8_t, 3> RgbImage::at(int row, int col) const {
  const std::size_t k = (static_cast<std::size_t>(row) * width + col) * 3;
  return {pixels[k], pixels[k + 1], pixels[k + 2]};
}

std::optional<double> ClassHue(SemanticLabel label) {
  switch (label) {
    case SemanticLabel::kCar: return 220.0;
    case SemanticLabel::kTwoWheeler: return 290.0;
    case SemanticLabel::kPedestrian: return 0.0;
    case SemanticLabel::kOtherMobile: return 30.0;
    case SemanticLabel::kImmobile: return 55.0;
    case SemanticLabel::kStreet: return 260.0;
    case SemanticLabel::kSidewalk: return 320.0;
    case SemanticLabel::kOtherGround: return 110.0;
    case SemanticLabel::kUnknown: return std::nullopt;
  }
  return std::nullopt;
}

RgbImage RenderVisualization(const LayeredGrid& map, VisualizationMode mode) {
  for (const auto& name : EvidentialLayerNames()) {
    if (!map.HasLayer(name)) {
      throw std::invalid_argument("map lacks layer '" + name + "'");
    }
  }
  const GridSpec& spec = map.spec();
  RgbImage image;
  image.height = spec.size[0];
  image.width = spec.size[1];
  image.pixels.assign(static_cast<std::size_t>(image.width) * image.height * 3, 0);
  auto occ = [&](OccupancyHypothesis h, std::size_t c) {
    return map.layer(OccupancyLayerName(h))[c];
  };
  auto gnd = [&](GroundHypothesis h, std::size_t c) {
    return map.layer(GroundLayerName(h))[c];
  };
  for (int i = 0; i < spec.size[0]; ++i) {
    for (int j = 0; j < spec.size[1]; ++j) {
      const std::size_t c = spec.Index(i, j);
      std::array<std::uint8_t, 3> rgb;
      if (mode == VisualizationMode::kOccupancy) {
        std::vector<double> m(kNumOccupancyLayers);
        for (int k = 0; k < kNumOccupancyLayers; ++k) {
          m[k] = occ(static_cast<OccupancyHypothesis>(k), c);
        }
        const double p = std::clamp(
            Pignistic(Bba(Fod::kOccupancy, m), SetOf(OccupancyHypothesis::kObject)),
            0.0, 1.0);
        const auto g = static_cast<std::uint8_t>(std::lround((1.0 - p) * 255.0));
        rgb = {g, g, g};
      } else {
        int best_obj = static_cast<int>(OccupancyHypothesis::kObject);
        double obj_mass = -1.0;
        for (int k = 0; k <= static_cast<int>(OccupancyHypothesis::kObject); ++k) {
          const double m = occ(static_cast<OccupancyHypothesis>(k), c);
          if (m > obj_mass) {
            obj_mass = m;
            best_obj = k;
          }
        }
        int best_gnd = static_cast<int>(GroundHypothesis::kAnyGround);
        double gnd_mass = -1.0;
        for (int k = 0; k < kNumGroundLayers; ++k) {
          const double m = gnd(static_cast<GroundHypothesis>(k), c);
          if (m > gnd_mass) {
            gnd_mass = m;
            best_gnd = k;
          }
        }
        std::optional<double> hue;
        double mass;
        if (obj_mass > gnd_mass) {
          mass = obj_mass;
          if (best_obj < kNumObjectClasses) {
            hue = ClassHue(static_cast<SemanticLabel>(
                best_obj + static_cast<int>(SemanticLabel::kCar)));
          }
        } else {
          mass = gnd_mass;
          if (best_gnd < static_cast<int>(GroundHypothesis::kAnyGround)) {
            hue = ClassHue(static_cast<SemanticLabel>(
                best_gnd + static_cast<int>(SemanticLabel::kStreet)));
          }
        }
        mass = std::clamp(mass, 0.0, 1.0);
        const double free = std::clamp(occ(OccupancyHypothesis::kFree, c), 0.0, 1.0);
        double value = 1.0 - 0.5 * (1.0 - free);
        // Union layers carry no hue: darken with their mass instead.
        if (!hue) value *= 1.0 - 0.5 * mass;
        rgb = HsvToRgb(hue.value_or(0.0), hue ? mass : 0.0, value);
      }
      const int row = spec.size[0] - 1 - i;
      const int col = spec.size[1] - 1 - j;
      const std::size_t k = (static_cast<std::size_t>(row) * image.width + col) * 3;
      std::copy(rgb.begin(), rgb.end(), image.pixels.begin() + k);
    }
  }
  return image;
}

void SaveImage(const std::string& path, const RgbImage& image) {
  if (std::filesystem::path(path).extension() == ".ppm") {
    std::vector<std::uint8_t> bytes;
    const std::string header = "P6\n" + std::to_string(image.width) + " " +
                               std::to_string(image.height) + "\n255\n";
    bytes.assign(header.begin(), header.end());
    bytes.insert(bytes.end(), image.pixels.begin(), image.pixels.end());
    WriteFile(path, bytes);
    return;
  }
  SavePng(path, image.width, image.height, 8, PNG_COLOR_TYPE_RGB, image.pixels);
}

}  // namespace evgrid
