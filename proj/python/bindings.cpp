#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "elbptop/codes.hpp"
#include "elbptop/config.hpp"
#include "elbptop/descriptor.hpp"
#include "elbptop/error.hpp"
#include "elbptop/manifest.hpp"
#include "elbptop/metrics.hpp"
#include "elbptop/pipeline.hpp"
#include "elbptop/preprocess.hpp"
#include "elbptop/protocol.hpp"
#include "elbptop/report.hpp"
#include "elbptop/synth.hpp"
#include "elbptop/wpca.hpp"

namespace py = pybind11;
using namespace elbptop;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// numpy (T, H, W) <-> x-fastest volume
VideoVolume to_volume(const Array& a) {
  if (a.ndim() != 3) throw ShapeError("expected a (frames, height, width) array");
  VideoVolume v(static_cast<int>(a.shape(2)), static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), v.data().begin());
  return v;
}

Array from_volume(const VideoVolume& v) {
  Array out({v.length(), v.height(), v.width()});
  std::copy(v.data().begin(), v.data().end(), out.mutable_data());
  return out;
}

DescriptorConfig descriptor(const std::string& kind, double radius, int points, std::optional<double> delta,
                            const std::string& encoding, const std::string& planes, std::array<int, 3> blocks) {
  DescriptorConfig c;
  c.kind = parse_code_kind(kind);
  c.neighbors = {radius, points, delta.value_or(c.kind == CodeKind::kRdlbp ? 1.0 : 0.0)};
  c.encoding = parse_encoding(encoding);
  c.planes = PlaneSet::parse(planes);
  c.grid = {blocks[0], blocks[1], blocks[2]};
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_elbptop, m) {
  m.doc() = "Extended local binary pattern descriptors, preprocessing and evaluation";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<BorderError>(m, "BorderError", base.ptr());
  py::register_exception<PreprocessError>(m, "PreprocessError", base.ptr());
  py::register_exception<IngestError>(m, "IngestError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<DegenerateDataError>(m, "DegenerateDataError", base.ptr());
  py::register_exception<ProtocolError>(m, "ProtocolError", base.ptr());

  m.def("lbp_code", [](double center, const std::vector<double>& ring) { return lbp_code(center, ring); },
        py::arg("center"), py::arg("ring"));
  m.def("adlbp_code", [](const std::vector<double>& ring) { return adlbp_code(ring); }, py::arg("ring"));
  m.def(
      "rdlbp_code", [](const std::vector<double>& outer, const std::vector<double>& inner) { return rdlbp_code(outer, inner); },
      py::arg("outer"), py::arg("inner"));

  m.def(
      "extract_descriptor",
      [](const Array& volume, const std::string& kind, double radius, int points, std::optional<double> delta,
         const std::string& encoding, const std::string& planes, std::array<int, 3> blocks) {
        const VideoVolume v = to_volume(volume);
        const DescriptorConfig c = descriptor(kind, radius, points, delta, encoding, planes, blocks);
        std::vector<double> values;
        {
          py::gil_scoped_release release;
          values = extract_descriptor(v, c).values;
        }
        return Array(static_cast<py::ssize_t>(values.size()), values.data());
      },
      py::arg("volume"), py::arg("kind") = "lbp", py::arg("radius") = 1.0, py::arg("points") = 8,
      py::arg("delta") = py::none(), py::arg("encoding") = "full", py::arg("planes") = "TOP",
      py::arg("blocks") = std::array<int, 3>{8, 8, 2});
  m.def(
      "descriptor_dimension",
      [](const std::string& kind, double radius, int points, std::optional<double> delta, const std::string& encoding,
         const std::string& planes, std::array<int, 3> blocks) {
        return descriptor(kind, radius, points, delta, encoding, planes, blocks).dimension();
      },
      py::arg("kind") = "lbp", py::arg("radius") = 1.0, py::arg("points") = 8, py::arg("delta") = py::none(),
      py::arg("encoding") = "full", py::arg("planes") = "TOP", py::arg("blocks") = std::array<int, 3>{8, 8, 2});

  m.def(
      "magnify",
      [](const Array& volume, double alpha, double freq_low, double freq_high, const std::string& unit,
         double frame_rate, double lambda_c, int levels) {
        EvmParams p;
        p.alpha = alpha;
        p.freq_low = freq_low;
        p.freq_high = freq_high;
        p.unit = parse_frequency_unit(unit);
        p.frame_rate = frame_rate;
        p.lambda_c = lambda_c;
        p.levels = levels;
        const VideoVolume v = to_volume(volume);
        VideoVolume out;
        {
          py::gil_scoped_release release;
          out = magnify(v, p);
        }
        return from_volume(out);
      },
      py::arg("volume"), py::arg("alpha") = 20.0, py::arg("freq_low") = 0.05, py::arg("freq_high") = 0.4,
      py::arg("unit") = "cycles_per_frame", py::arg("frame_rate") = 0.0, py::arg("lambda_c") = 16.0,
      py::arg("levels") = 4);
  m.def(
      "tim_interpolate",
      [](const Array& volume, int target_length) { return from_volume(tim_interpolate(to_volume(volume), {target_length})); },
      py::arg("volume"), py::arg("target_length") = 10);

  py::class_<WpcaModel>(m, "WpcaModel")
      .def_readonly("mean", &WpcaModel::mean)
      .def_readonly("basis", &WpcaModel::basis)
      .def_readonly("eigenvalues", &WpcaModel::eigenvalues)
      .def_readonly("scales", &WpcaModel::scales)
      .def_property_readonly("components", &WpcaModel::components)
      .def("transform", [](const WpcaModel& self, const Eigen::MatrixXd& x) { return wpca_transform(self, x); });
  m.def("wpca_fit", &wpca_fit, py::arg("train"), py::arg("components") = 0);

  m.def(
      "compute_metrics",
      [](const std::vector<int>& predictions, const std::vector<int>& truths, const std::vector<std::string>& subjects,
         int num_classes) { return metrics_to_json(compute_metrics(predictions, truths, subjects, num_classes)).dump(); },
      py::arg("predictions"), py::arg("truths"), py::arg("subjects"), py::arg("num_classes"));
  m.def(
      "loso_evaluate",
      [](const Eigen::MatrixXd& features, const std::vector<int>& labels, const std::vector<std::string>& subjects,
         const std::vector<std::string>& class_names, std::optional<std::vector<double>> c_grid, bool standardize,
         int threads) {
        LosoOptions opt;
        if (c_grid) opt.c_grid = *c_grid;
        opt.standardize = standardize;
        opt.threads = threads;
        py::gil_scoped_release release;
        return report_to_json(loso_evaluate(features, labels, subjects, class_names, opt)).dump();
      },
      py::arg("features"), py::arg("labels"), py::arg("subjects"), py::arg("class_names"),
      py::arg("c_grid") = py::none(), py::arg("standardize") = false, py::arg("threads") = 1);

  m.def("default_config", [] { return config_to_json(default_config()).dump(); });
  m.def("preset", [](const std::string& name) { return config_to_json(preset(name)).dump(); }, py::arg("name"));
  m.def(
      "resolve_config", [](const std::string& text) { return config_to_json(config_from_json(nlohmann::json::parse(text))).dump(); },
      py::arg("config_json"));

  m.def(
      "synth_clip",
      [](int subject, int clip, int label, int classes, int width, int height, int length, std::uint64_t seed) {
        SynthSpec s;
        s.classes = classes;
        s.width = width;
        s.height = height;
        s.length = length;
        s.seed = seed;
        s.validate();
        return from_volume(synth_clip(s, subject, clip, label));
      },
      py::arg("subject"), py::arg("clip"), py::arg("label"), py::arg("classes") = 3, py::arg("width") = 64,
      py::arg("height") = 64, py::arg("length") = 12, py::arg("seed") = 0);
  m.def(
      "synth_generate",
      [](const std::string& out_dir, int classes, int subjects, int clips, int width, int height, int length,
         std::uint64_t seed) {
        SynthSpec s;
        s.classes = classes;
        s.subjects = subjects;
        s.clips_per_subject = clips;
        s.width = width;
        s.height = height;
        s.length = length;
        s.seed = seed;
        py::gil_scoped_release release;
        return synth_generate(s, out_dir).entries.size();
      },
      py::arg("out_dir"), py::arg("classes") = 3, py::arg("subjects") = 8, py::arg("clips") = 4, py::arg("width") = 64,
      py::arg("height") = 64, py::arg("length") = 12, py::arg("seed") = 0);

  m.def(
      "run_pipeline",
      [](const std::string& config_json, const std::string& manifest_path) {
        const RunConfig config = config_from_json(nlohmann::json::parse(config_json));
        py::gil_scoped_release release;
        return run_pipeline(config, load_manifest(manifest_path)).report_json.dump();
      },
      py::arg("config_json"), py::arg("manifest_path"));
  m.def(
      "fusion_search",
      [](const std::string& config_json, const std::string& manifest_path) {
        const RunConfig config = config_from_json(nlohmann::json::parse(config_json));
        py::gil_scoped_release release;
        return fusion_to_json(fusion_search(config, load_manifest(manifest_path))).dump();
      },
      py::arg("config_json"), py::arg("manifest_path"));
}
