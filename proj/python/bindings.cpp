#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "itwf/errors.hpp"
#include "itwf/harness.hpp"
#include "itwf/init.hpp"
#include "itwf/metrics.hpp"
#include "itwf/solver.hpp"

namespace py = pybind11;
using namespace itwf;

namespace {

template <FieldScalar T>
void bind_field(py::module_ &m, char const *suffix) {
  using Model = GaussianSensing<T>;
  std::string const name = std::string("GaussianSensing") + suffix;
  py::class_<Model>(m, name.c_str())
      .def(py::init<typename Model::Matrix>(), py::arg("rows"))
      .def_static("generate", &Model::generate, py::arg("rng"), py::arg("m"), py::arg("n"))
      .def_property_readonly("m", &Model::m)
      .def_property_readonly("n", &Model::n)
      .def_property_readonly("rows", &Model::rows)
      .def("vector", &Model::vector, py::arg("i"))
      .def("forward", &Model::forward, py::arg("z"))
      .def("adjoint", &Model::adjoint, py::arg("c"));

  std::string const trace = std::string("RunTrace") + suffix;
  py::class_<RunTrace<T>>(m, trace.c_str())
      .def_property_readonly("rel_error",
                             [](RunTrace<T> const &t) {
                               std::vector<double> out;
                               for (auto const &r : t.rel_error_per_pass) { out.push_back(r.rel_error); }
                               return out;
                             })
      .def_property_readonly("passes",
                             [](RunTrace<T> const &t) {
                               std::vector<int> out;
                               for (auto const &r : t.rel_error_per_pass) { out.push_back(r.pass); }
                               return out;
                             })
      .def_readonly("rel_change", &RunTrace<T>::rel_change_per_pass)
      .def_readonly("final_iterate", &RunTrace<T>::final_iterate)
      .def_readonly("passes_used", &RunTrace<T>::passes_used)
      .def_readonly("succeeded", &RunTrace<T>::succeeded)
      .def_readonly("diverged", &RunTrace<T>::diverged)
      .def_readonly("wall_seconds", &RunTrace<T>::wall_seconds)
      .def("passes_to", &RunTrace<T>::passes_to, py::arg("tol"))
      .def("final_rel_error", &RunTrace<T>::final_rel_error);

  m.def("dist", &dist<T>, py::arg("z"), py::arg("x"));
  m.def("align_phase", &align_phase<T>, py::arg("z"), py::arg("x"));
  m.def("relative_rmse", &relative_rmse<T>, py::arg("z"), py::arg("x"));
  m.def("empirical_snr", &empirical_snr<T>, py::arg("model"), py::arg("x"), py::arg("eta"));
}

template <SensingOperator M>
void bind_model_ops(py::module_ &m) {
  using T = typename M::Scalar;
  m.def("measure_noiseless", &measure_noiseless<M>, py::arg("model"), py::arg("x"));
  m.def(
      "truncated_spectral_init",
      [](M const &model, MeasurementSet const &y, RngStream &rng, double alpha_y, int power_iterations) {
        return truncated_spectral_init(model, y, InitConfig{alpha_y, power_iterations}, rng);
      },
      py::arg("model"), py::arg("y"), py::arg("rng"), py::arg("alpha_y") = 3.0, py::arg("power_iterations") = 50);
  m.def(
      "solve",
      [](Signal<T> const &z0, MeasurementSet const &y, M const &model, SolverConfig const &cfg,
         std::optional<Signal<T>> const &truth) {
        py::gil_scoped_release release;
        return solve(z0, y, model, cfg, truth);
      },
      py::arg("z0"), py::arg("y"), py::arg("model"), py::arg("config"), py::arg("truth") = py::none());
  m.def(
      "twf_pass",
      [](Signal<T> const &z, MeasurementSet const &y, M const &model, double mu, TruncationConfig const &trunc) {
        return twf_pass(z, y, model, mu, trunc);
      },
      py::arg("z"), py::arg("y"), py::arg("model"), py::arg("mu"), py::arg("trunc") = TruncationConfig{});
  m.def(
      "itwf_iteration",
      [](Signal<T> const &z, Index i, MeasurementSet const &y, M const &model, double mu,
         TruncationConfig const &trunc) { return itwf_iteration(z, i, y, model, e3_mask(y, trunc), mu, trunc); },
      py::arg("z"), py::arg("i"), py::arg("y"), py::arg("model"), py::arg("mu"),
      py::arg("trunc") = TruncationConfig{});
}

py::dict tables_of(PresetOutput const &out) {
  py::dict tables;
  for (auto const &[name, table] : out.tables) { tables[py::str(name)] = table.text(); }
  return tables;
}

} // namespace

PYBIND11_MODULE(_itwf, m) {
  m.doc() = "Truncated Wirtinger flow phase retrieval, full-gradient and incremental.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id") = 0)
      .def_property_readonly("seed", &RngStream::seed)
      .def_property_readonly("stream_id", &RngStream::stream_id)
      .def("next_u64", [](RngStream &r) { return r(); })
      .def("uniform", &RngStream::uniform)
      .def("normal", &RngStream::normal)
      .def("below", &RngStream::below, py::arg("bound"))
      .def("poisson", &RngStream::poisson, py::arg("rate"));

  py::enum_<NoiseModel>(m, "NoiseModel")
      .value("Noiseless", NoiseModel::Noiseless)
      .value("Additive", NoiseModel::Additive)
      .value("Poisson", NoiseModel::Poisson);

  py::class_<MeasurementSet>(m, "MeasurementSet")
      .def(py::init<RealVector, NoiseModel>(), py::arg("y"), py::arg("model") = NoiseModel::Noiseless)
      .def_property_readonly("y", &MeasurementSet::y)
      .def_property_readonly("mean_y", &MeasurementSet::mean_y)
      .def_property_readonly("model", &MeasurementSet::model)
      .def("__len__", &MeasurementSet::size);

  m.def("gaussian_vector_real", &gaussian_vector<Real>, py::arg("rng"), py::arg("n"));
  m.def("gaussian_vector_complex", &gaussian_vector<Complex>, py::arg("rng"), py::arg("n"));
  m.def("add_bounded_noise", &add_bounded_noise, py::arg("y"), py::arg("eta"));
  m.def("poissonize", &poissonize, py::arg("y"), py::arg("rng"));
  m.def("spectral_weights", &spectral_weights, py::arg("y"), py::arg("alpha_y") = 3.0);

  bind_field<Real>(m, "Real");
  bind_field<Complex>(m, "Complex");

  py::class_<CdpSensing>(m, "CdpSensing")
      .def(py::init<Eigen::MatrixXcd>(), py::arg("masks"))
      .def_static("generate", &CdpSensing::generate, py::arg("rng"), py::arg("n"), py::arg("mask_count"))
      .def_property_readonly("m", &CdpSensing::m)
      .def_property_readonly("n", &CdpSensing::n)
      .def_property_readonly("mask_count", &CdpSensing::mask_count)
      .def_property_readonly("masks", &CdpSensing::masks)
      .def("vector", &CdpSensing::vector, py::arg("i"))
      .def("forward", &CdpSensing::forward, py::arg("z"))
      .def("adjoint", &CdpSensing::adjoint, py::arg("c"));

  py::class_<TruncationConfig>(m, "TruncationConfig")
      .def(py::init<>())
      .def_readwrite("alpha_z_lb", &TruncationConfig::alpha_z_lb)
      .def_readwrite("alpha_z_ub", &TruncationConfig::alpha_z_ub)
      .def_readwrite("alpha_x", &TruncationConfig::alpha_x)
      .def_readwrite("alpha_h", &TruncationConfig::alpha_h)
      .def_readwrite("enable_e1", &TruncationConfig::enable_e1)
      .def_readwrite("enable_e2_or_e3", &TruncationConfig::enable_e2_or_e3);

  py::enum_<StepKind>(m, "StepKind")
      .value("Constant", StepKind::Constant)
      .value("DiminishingPerPass", StepKind::DiminishingPerPass);
  py::enum_<Sampling>(m, "Sampling")
      .value("WithReplacement", Sampling::WithReplacement)
      .value("WithoutReplacement", Sampling::WithoutReplacement)
      .value("FullGradient", Sampling::FullGradient);
  py::enum_<Increment>(m, "Increment")
      .value("SingleSample", Increment::SingleSample)
      .value("PerMaskBlock", Increment::PerMaskBlock);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("trunc", &SolverConfig::trunc)
      .def_property(
          "step", [](SolverConfig const &c) { return c.schedule.mu0; },
          [](SolverConfig &c, double mu) { c.schedule.mu0 = mu; })
      .def_property(
          "step_kind", [](SolverConfig const &c) { return c.schedule.kind; },
          [](SolverConfig &c, StepKind k) { c.schedule.kind = k; })
      .def_readwrite("sampling", &SolverConfig::sampling)
      .def_readwrite("increment", &SolverConfig::increment)
      .def_readwrite("max_passes", &SolverConfig::max_passes)
      .def_readwrite("success_tol", &SolverConfig::success_tol)
      .def_readwrite("trace_every", &SolverConfig::trace_every)
      .def_readwrite("stop_early", &SolverConfig::stop_early)
      .def_readwrite("rng", &SolverConfig::rng);

  bind_model_ops<GaussianSensing<Real>>(m);
  bind_model_ops<GaussianSensing<Complex>>(m);
  bind_model_ops<CdpSensing>(m);

  m.def("preset_names", [] {
    std::vector<std::string> names;
    for (Preset p : {Preset::SuccessRateSweep, Preset::ConvergenceCurve, Preset::CdpImage, Preset::NoisySnrSweep}) {
      names.push_back(preset_name(p));
    }
    return names;
  });
  m.def("config_help", &config_help);
  m.def(
      "run_preset",
      [](std::string const &preset, std::string const &scale, std::map<std::string, std::string> const &overrides,
         std::optional<std::filesystem::path> const &out_dir) {
        ExperimentSpec spec = default_spec(parse_preset(preset), parse_scale(scale));
        std::istringstream none;
        KeyValueConfig cfg = KeyValueConfig::parse(none, "overrides");
        for (auto const &[key, value] : overrides) { cfg.set(key, value); }
        apply_config(spec, std::move(cfg));
        PresetOutput out;
        {
          py::gil_scoped_release release;
          out = run_preset(spec);
          if (out_dir) { write_output(out, *out_dir); }
        }
        py::dict result;
        result["summary"] = out.summary;
        result["tables"] = tables_of(out);
        return result;
      },
      py::arg("preset"), py::arg("scale") = "desk", py::arg("overrides") = std::map<std::string, std::string>{},
      py::arg("out_dir") = py::none(),
      "Runs a preset with `key = value` overrides; returns the summary and CSV text per table.");
}
