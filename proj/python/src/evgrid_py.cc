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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "evgrid/pipeline.h"

namespace py = pybind11;

namespace evgrid {
namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Fod ParseFod(const std::string& name) {
  if (name == "occupancy") return Fod::kOccupancy;
  if (name == "ground") return Fod::kGround;
  throw py::value_error("frame must be 'occupancy' or 'ground'");
}

SensorKind ParseKind(const std::string& name) {
  if (name == "lidar") return SensorKind::kLidar;
  if (name == "stereo") return SensorKind::kStereo;
  if (name == "depth") return SensorKind::kDepthCamera;
  throw py::value_error("sensor kind must be lidar, stereo or depth");
}

std::string KindName(SensorKind kind) {
  switch (kind) {
    case SensorKind::kLidar: return "lidar";
    case SensorKind::kStereo: return "stereo";
    case SensorKind::kDepthCamera: return "depth";
  }
  return "unknown";
}

PipelineMode ParseMode(const std::string& name) {
  if (name == "lidar") return PipelineMode::kLidar;
  if (name == "stereo") return PipelineMode::kStereo;
  if (name == "points") return PipelineMode::kPoints;
  throw py::value_error("mode must be lidar, stereo or points");
}

py::array_t<double> LayerArray(const LayeredGrid& map, const std::string& name) {
  const GridSpec& spec = map.spec();
  py::array_t<double> out({spec.size[0], spec.size[1]});
  const auto src = map.layer(name);
  std::copy(src.begin(), src.end(), out.mutable_data());
  return out;
}

void SetLayer(LayeredGrid& map, const std::string& name, const DoubleArray& values) {
  const GridSpec& spec = map.spec();
  if (values.ndim() != 2 || values.shape(0) != spec.size[0] ||
      values.shape(1) != spec.size[1]) {
    throw py::value_error("layer shape does not match the grid");
  }
  auto dst = map.layer(name);
  std::copy(values.data(), values.data() + values.size(), dst.begin());
}

template <typename T, typename U = T>
py::array_t<U> ImageArray(const Image<T>& image) {
  py::array_t<U> out({image.rows(), image.cols()});
  U* p = out.mutable_data();
  for (const T& x : image.data()) *p++ = static_cast<U>(x);
  return out;
}

py::array_t<double> PointsArray(const Image<Vec3>& image) {
  py::array_t<double> out({image.rows(), image.cols(), 3});
  double* p = out.mutable_data();
  for (const Vec3& x : image.data()) {
    *p++ = x.x();
    *p++ = x.y();
    *p++ = x.z();
  }
  return out;
}

Image<double> ToImage(const DoubleArray& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
  Image<double> out(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), out.data().begin());
  return out;
}

py::object RatesObject(const std::optional<ConfusionRates>& r) {
  if (!r) return py::none();
  py::dict d;
  d["tp"] = r->tp;
  d["fp"] = r->fp;
  d["fn"] = r->fn;
  d["tn"] = r->tn;
  return d;
}

}  // namespace
}  // namespace evgrid

PYBIND11_MODULE(_core, m) {
  using namespace evgrid;
  m.doc() = "Evidential top-view grid mapping";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<PipelineError>(m, "PipelineError", PyExc_RuntimeError);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](std::array<double, 2> origin, std::array<double, 2> resolution,
                       std::array<int, 2> size) {
             GridSpec s{origin, resolution, size};
             s.Check();
             return s;
           }),
           py::arg("origin"), py::arg("resolution"), py::arg("size"))
      .def_readonly("origin", &GridSpec::origin)
      .def_readonly("resolution", &GridSpec::resolution)
      .def_readonly("size", &GridSpec::size)
      .def_property_readonly("num_cells", &GridSpec::NumCells)
      .def("cell_of", [](const GridSpec& s, double x, double y) -> py::object {
        const auto c = CellOf(s, x, y);
        if (!c) return py::none();
        return py::make_tuple(c->i, c->j);
      });

  py::class_<LayeredGrid>(m, "GridMap")
      .def(py::init([](const GridSpec& spec) {
             return LayeredGrid(spec, EvidentialLayerNames());
           }),
           py::arg("spec"))
      .def_property_readonly("spec", &LayeredGrid::spec)
      .def_property_readonly("names", &LayeredGrid::names)
      .def("layer", &LayerArray, py::arg("name"))
      .def("set_layer", &SetLayer, py::arg("name"), py::arg("values"))
      .def("layers", [](const LayeredGrid& map) {
        py::dict d;
        for (const auto& name : map.names()) d[py::str(name)] = LayerArray(map, name);
        return d;
      })
      .def("validate", [](const LayeredGrid& map) -> py::object {
        for (std::size_t c = 0; c < map.spec().NumCells(); ++c) {
          for (const Bba& b : {OccupancyBbaAt(map, c), GroundBbaAt(map, c)}) {
            const BbaReport r = Validate(b);
            if (!r.ok) return py::str("cell " + std::to_string(c) + ": " + r.violation);
          }
        }
        return py::none();
      }, "None if every cell holds a valid mass function, else a message.")
      .def("render", [](const LayeredGrid& map, const std::string& mode) {
        const RgbImage img = RenderVisualization(
            map, mode == "semantic" ? VisualizationMode::kSemantic
                                    : VisualizationMode::kOccupancy);
        py::array_t<std::uint8_t> out({img.height, img.width, 3});
        std::copy(img.pixels.begin(), img.pixels.end(), out.mutable_data());
        return out;
      }, py::arg("mode") = "occupancy");

  m.def("load_grid_map", &LoadGridMap, py::arg("path"));
  m.def("save_grid_map", &SaveGridMap, py::arg("path"), py::arg("map"));

  py::class_<PipelineConfig>(m, "Config")
      .def_property_readonly("sensor_kind", [](const PipelineConfig& c) {
        return KindName(c.calibration.kind);
      })
      .def_property_readonly("rows", [](const PipelineConfig& c) { return c.calibration.rows; })
      .def_property_readonly("cols", [](const PipelineConfig& c) { return c.calibration.cols; })
      .def_readonly("cartesian_grid", &PipelineConfig::cartesian_grid)
      .def_readonly("measurement_grid", &PipelineConfig::measurement_grid)
      .def_property("workers", [](const PipelineConfig& c) { return c.workers; },
                    [](PipelineConfig& c, int n) {
                      if (n < 1) throw ConfigError("workers must be >= 1");
                      c.SetWorkers(n);
                    })
      .def_property("frames", [](const PipelineConfig& c) { return c.synth.frames; },
                    [](PipelineConfig& c, int n) {
                      if (n < 1) throw ConfigError("frames must be >= 1");
                      c.synth.frames = n;
                    });

  m.def("default_config", [](const std::string& kind) {
    return DefaultConfig(ParseKind(kind));
  }, py::arg("kind") = "lidar");
  m.def("parse_config", [](const std::string& text) {
    std::istringstream in(text);
    return ParseConfig(in);
  }, py::arg("text"));
  m.def("load_config", &LoadConfig, py::arg("path"));
  m.def("config_keys", &ConfigKeys);

  m.def("run_pipeline", [](const PipelineConfig& config, const std::string& mode,
                           const std::string& input,
                           std::optional<std::string> labels) {
    py::gil_scoped_release release;
    return RunPipeline(config, {ParseMode(mode), input, labels});
  }, py::arg("config"), py::arg("mode"), py::arg("input"), py::arg("labels") = py::none());

  m.def("map_range_image", [](const PipelineConfig& config, const DoubleArray& range) {
    SensorReading reading;
    reading.calibration = config.calibration;
    reading.range = ToImage(range);
    py::gil_scoped_release release;
    reading.Check();
    return ImagePipeline(config).Map(reading);
  }, py::arg("config"), py::arg("range"),
     "Maps one organized range, disparity or depth image (NaN marks missing pixels).");

  py::class_<Scene>(m, "Scene");
  m.def("parse_scene", [](const std::string& text) {
    std::istringstream in(text);
    return ParseScene(in);
  }, py::arg("text"));
  m.def("load_scene", &LoadScene, py::arg("path"));

  m.def("render_frame", [](const Scene& scene, const PipelineConfig& config, int k) {
    const Rendering r = RenderFrame(scene, config, k);
    py::dict d;
    d["range"] = ImageArray(r.reading.range);
    d["labels"] = ImageArray<SemanticLabel, std::uint8_t>(r.reading.semantic);
    d["points"] = PointsArray(r.points);
    d["normals"] = PointsArray(r.normals);
    return d;
  }, py::arg("scene"), py::arg("config"), py::arg("frame") = 0);

  m.def("evaluate_sequence", [](const Scene& scene, const PipelineConfig& config,
                                bool pointset) {
    std::vector<FrameEvaluation> frames;
    {
      py::gil_scoped_release release;
      frames = EvaluateSequence(scene, config, pointset);
    }
    py::list out;
    for (const auto& f : frames) {
      py::dict d;
      for (const auto& method : f.methods) d[py::str(MethodName(method.method))] = RatesObject(method.rates);
      out.append(d);
    }
    return out;
  }, py::arg("scene"), py::arg("config"), py::arg("pointset") = false);

  m.def("confusion_rates", [](const DoubleArray& m_i, const DoubleArray& m_ref,
                              const DoubleArray& m_all) {
    auto span = [](const DoubleArray& a) {
      return std::span<const double>(a.data(), static_cast<std::size_t>(a.size()));
    };
    return RatesObject(ComputeConfusionRates(span(m_i), span(m_ref), span(m_all)));
  }, py::arg("m_i"), py::arg("m_ref"), py::arg("m_all"));

  m.def("label_names", [] {
    std::vector<std::string> out;
    for (int l = 0; l < kNumSemanticLabels; ++l) {
      out.emplace_back(LabelName(static_cast<SemanticLabel>(l)));
    }
    return out;
  }, "Label names indexed by the values of rendered label images.");

  m.def("pignistic", [](const std::string& frame, std::vector<double> masses, int layer) {
    const Fod fod = ParseFod(frame);
    if (layer < 0 || layer >= NumLayers(fod)) throw py::index_error("layer out of range");
    return Pignistic(Bba(fod, std::move(masses)), LayerSet(fod, layer));
  }, py::arg("frame"), py::arg("masses"), py::arg("layer"));
  m.def("validate_bba", [](const std::string& frame, std::vector<double> masses) -> py::object {
    const BbaReport r = Validate(Bba(ParseFod(frame), std::move(masses)));
    if (r.ok) return py::none();
    return py::str(r.violation);
  }, py::arg("frame"), py::arg("masses"));
  m.def("not_relevant", [](double p_fp, double p_occ, double p_omega, double p_ism) {
    return NotRelevant({p_fp, p_occ, p_omega, p_ism});
  }, py::arg("p_fp"), py::arg("p_occ"), py::arg("p_omega"), py::arg("p_ism"));
  m.def("mass_from_log", &BbaFromLogAccumulator, py::arg("log_sum"));
}
