#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

#include "itwf/errors.hpp"
#include "itwf/harness.hpp"
#include "itwf/init.hpp"
#include "itwf/parallel.hpp"

namespace itwf {

RngStream trial_stream(std::uint64_t seed, StreamRole role, size_t grid, bool tuning, size_t trial) {
  std::uint64_t const id = (static_cast<std::uint64_t>(role) << 56) | (static_cast<std::uint64_t>(grid & 0xFFFF) << 40) |
                           (static_cast<std::uint64_t>(tuning) << 39) | (static_cast<std::uint64_t>(trial) & 0x7FFFFFFFFF);
  return RngStream(seed, id);
}

double AlgorithmTrials::success_rate() const {
  if (trials.empty()) { return 0.0; }
  auto const ok = std::count_if(trials.begin(), trials.end(), [](TrialRecord const &t) { return t.succeeded; });
  return static_cast<double>(ok) / static_cast<double>(trials.size());
}

namespace {

enum class TuningGoal { FewestPasses, LowestFinalError };

template <SensingOperator M>
struct Problem {
  M model;
  MeasurementSet y;
  Signal<typename M::Scalar> truth;
  Signal<typename M::Scalar> z0;
  double empirical_snr = 0.0;
};

SolverConfig solver_config(ExperimentSpec const &spec, Algorithm algorithm, double step, Index n, bool cdp,
                           RngStream rng) {
  SolverConfig cfg;
  cfg.trunc = spec.trunc;
  cfg.max_passes = spec.max_passes;
  cfg.success_tol = spec.success_tol;
  cfg.stop_early = spec.stop_early;
  cfg.trace_every = 1;
  cfg.rng = rng;
  double const per_n = step / static_cast<double>(n);
  switch (algorithm) {
  case Algorithm::Twf:
    cfg.sampling = Sampling::FullGradient;
    cfg.schedule = StepSchedule::constant(step);
    break;
  case Algorithm::ItwfWithReplacement:
    cfg.sampling = Sampling::WithReplacement;
    cfg.schedule = StepSchedule::constant(per_n);
    break;
  case Algorithm::ItwfWithoutReplacement:
    cfg.sampling = Sampling::WithoutReplacement;
    cfg.schedule = StepSchedule::constant(per_n);
    break;
  case Algorithm::ItwfDiminishing:
    cfg.sampling = Sampling::WithoutReplacement;
    cfg.schedule = StepSchedule::diminishing(per_n);
    break;
  }
  cfg.increment = (cdp && algorithm != Algorithm::Twf) ? Increment::PerMaskBlock : Increment::SingleSample;
  return cfg;
}

std::vector<double> const &step_grid(ExperimentSpec const &spec, Algorithm a) {
  return a == Algorithm::Twf ? spec.twf_steps : spec.itwf_steps;
}

template <SensingOperator M>
RunTrace<typename M::Scalar> run_algorithm(ExperimentSpec const &spec, Problem<M> const &problem, Algorithm algorithm,
                                           double step, RngStream rng,
                                           PassObserver<typename M::Scalar> const &observer = {}) {
  SolverConfig const cfg = solver_config(spec, algorithm, step, problem.model.n(), is_cdp_v<M>, rng);
  return solve(problem.z0, problem.y, problem.model, cfg, std::optional(problem.truth), observer);
}

template <FieldScalar T>
TrialRecord record_of(RunTrace<T> const &trace, double tol, double empirical_snr) {
  TrialRecord r;
  r.rel_error.reserve(trace.rel_error_per_pass.size());
  for (auto const &p : trace.rel_error_per_pass) { r.rel_error.push_back(p.rel_error); }
  r.succeeded = trace.succeeded;
  r.diverged = trace.diverged;
  r.passes_used = trace.passes_used;
  r.passes_to_tol = trace.passes_to(tol);
  r.empirical_snr = empirical_snr;
  return r;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t const k = v.size() / 2;
  return v.size() % 2 == 1 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

/// Lower is better.
std::tuple<double, double, double> tuning_score(std::vector<TrialRecord> const &runs, TuningGoal goal) {
  std::vector<double> finals;
  for (auto const &r : runs) {
    double const e = r.final_rel_error();
    finals.push_back(r.diverged || !std::isfinite(e) ? std::numeric_limits<double>::infinity() : e);
  }
  double const med = median(finals);
  if (goal == TuningGoal::LowestFinalError) { return {med, 0.0, 0.0}; }
  double failures = 0.0;
  double passes = 0.0;
  for (auto const &r : runs) {
    if (r.passes_to_tol) {
      passes += *r.passes_to_tol;
    } else {
      failures += 1.0;
    }
  }
  double const successes = static_cast<double>(runs.size()) - failures;
  return {failures, successes > 0 ? passes / successes : std::numeric_limits<double>::infinity(), med};
}

/// Picks each algorithm's step on the tuning trials, then runs the reported
/// trials. make_problem(trial, tuning) must be deterministic in its arguments.
template <typename MakeProblem>
std::vector<AlgorithmTrials> run_cell(ExperimentSpec const &spec, size_t grid, MakeProblem const &make_problem,
                                      TuningGoal goal) {
  size_t const algs = spec.algorithms.size();
  std::vector<AlgorithmTrials> result(algs);
  for (size_t a = 0; a < algs; ++a) {
    result[a].algorithm = spec.algorithms[a];
    result[a].step = step_grid(spec, spec.algorithms[a]).front();
  }

  bool const tune = spec.tuning_trials > 0 &&
                    std::any_of(spec.algorithms.begin(), spec.algorithms.end(),
                                [&](Algorithm a) { return step_grid(spec, a).size() > 1; });
  if (tune) {
    auto const tuning = static_cast<size_t>(spec.tuning_trials);
    // runs[t][a][s]
    std::vector<std::vector<std::vector<TrialRecord>>> runs(tuning);
    parallel_for(tuning, spec.threads, [&](size_t t) {
      auto const problem = make_problem(t, true);
      RngStream const rng = trial_stream(spec.seed, StreamRole::Solver, grid, true, t);
      runs[t].resize(algs);
      for (size_t a = 0; a < algs; ++a) {
        auto const &steps = step_grid(spec, spec.algorithms[a]);
        if (steps.size() < 2) { continue; }
        for (double step : steps) {
          auto const trace = run_algorithm(spec, problem, spec.algorithms[a], step, rng);
          runs[t][a].push_back(record_of(trace, spec.success_tol, problem.empirical_snr));
        }
      }
    });
    for (size_t a = 0; a < algs; ++a) {
      auto const &steps = step_grid(spec, spec.algorithms[a]);
      if (steps.size() < 2) { continue; }
      size_t best = 0;
      std::tuple<double, double, double> best_score{};
      for (size_t s = 0; s < steps.size(); ++s) {
        std::vector<TrialRecord> column;
        for (size_t t = 0; t < tuning; ++t) { column.push_back(runs[t][a][s]); }
        auto const score = tuning_score(column, goal);
        if (s == 0 || score < best_score) {
          best = s;
          best_score = score;
        }
      }
      result[a].step = steps[best];
    }
  }

  auto const trials = static_cast<size_t>(spec.trials);
  for (auto &r : result) { r.trials.resize(trials); }
  parallel_for(trials, spec.threads, [&](size_t t) {
    auto const problem = make_problem(t, false);
    RngStream const rng = trial_stream(spec.seed, StreamRole::Solver, grid, false, t);
    for (size_t a = 0; a < algs; ++a) {
      auto const trace = run_algorithm(spec, problem, result[a].algorithm, result[a].step, rng);
      result[a].trials[t] = record_of(trace, spec.success_tol, problem.empirical_snr);
    }
  });
  return result;
}

RealSignal random_signal(RngStream &rng, Index n, double norm) {
  RealSignal x = gaussian_vector<Real>(rng, n);
  return x * (norm / x.norm());
}

InitConfig init_config(ExperimentSpec const &spec) { return {spec.alpha_y, spec.init_power_iterations}; }

/// Noiseless (or Poisson when `energy` noise is requested) real Gaussian
/// instance, fully determined by (seed, grid, tuning, trial).
Problem<GaussianSensing<Real>> gaussian_problem(ExperimentSpec const &spec, Index m, double norm, bool poisson,
                                                size_t grid, bool tuning, size_t trial) {
  RngStream data = trial_stream(spec.seed, StreamRole::Data, grid, tuning, trial);
  RealSignal x = random_signal(data, spec.n, norm);
  auto model = GaussianSensing<Real>::generate(data, m, spec.n);
  MeasurementSet clean = measure_noiseless(model, x);
  double snr = 0.0;
  MeasurementSet y = clean;
  if (poisson) {
    RngStream noise = trial_stream(spec.seed, StreamRole::Noise, grid, tuning, trial);
    y = poissonize(clean, noise);
    RealVector const eta = y.y() - clean.y();
    snr = eta.squaredNorm() > 0.0 ? empirical_snr(model, x, eta) : std::numeric_limits<double>::infinity();
  }
  RngStream init = trial_stream(spec.seed, StreamRole::Init, grid, tuning, trial);
  RealSignal z0 = truncated_spectral_init(model, y, init_config(spec), init);
  return {std::move(model), std::move(y), std::move(x), std::move(z0), snr};
}

GrayImage load_scene(ExperimentSpec const &spec) {
  if (spec.image_path.empty()) { return synthetic_scene(spec.image_rows, spec.image_cols); }
  return read_pgm(spec.image_path);
}

std::string format_steps(std::vector<AlgorithmTrials> const &cell) {
  std::string s;
  for (auto const &a : cell) {
    if (!s.empty()) { s += ", "; }
    s += algorithm_name(a.algorithm) + " step " + format_double(a.step);
  }
  return s;
}

} // namespace

// ---------------------------------------------------------------------------

SuccessSweepResult run_success_rate_sweep(ExperimentSpec const &spec) {
  spec.validate();
  SuccessSweepResult result;
  result.m_over_n = spec.m_over_n;
  for (size_t g = 0; g < spec.m_over_n.size(); ++g) {
    Index const m = std::max<Index>(1, std::llround(spec.m_over_n[g] * static_cast<double>(spec.n)));
    result.m.push_back(m);
    auto make = [&](size_t trial, bool tuning) {
      return gaussian_problem(spec, m, spec.signal_norm, false, g, tuning, trial);
    };
    result.cells.push_back(run_cell(spec, g, make, TuningGoal::FewestPasses));
  }
  return result;
}

CsvTable SuccessSweepResult::csv() const {
  CsvTable table({"m_over_n", "algorithm", "success_rate"});
  for (size_t g = 0; g < cells.size(); ++g) {
    for (auto const &a : cells[g]) { table.add_row({m_over_n[g], algorithm_name(a.algorithm), a.success_rate()}); }
  }
  return table;
}

ConvergenceResult run_convergence_curve(ExperimentSpec const &spec) {
  spec.validate();
  auto make = [&](size_t trial, bool tuning) {
    return gaussian_problem(spec, spec.m, spec.signal_norm, false, 0, tuning, trial);
  };
  return {run_cell(spec, 0, make, TuningGoal::FewestPasses)};
}

namespace {

CsvTable curve_table(std::vector<AlgorithmTrials> const &algorithms) {
  CsvTable table({"trial", "pass", "algorithm", "rel_error"});
  size_t const trials = algorithms.empty() ? 0 : algorithms.front().trials.size();
  for (size_t t = 0; t < trials; ++t) {
    for (auto const &a : algorithms) {
      auto const &errors = a.trials[t].rel_error;
      for (size_t p = 0; p < errors.size(); ++p) {
        table.add_row({static_cast<long long>(t), static_cast<long long>(p), algorithm_name(a.algorithm), errors[p]});
      }
    }
  }
  return table;
}

} // namespace

CsvTable ConvergenceResult::csv() const { return curve_table(algorithms); }

CdpResult run_cdp_image(ExperimentSpec const &spec) {
  spec.validate();
  GrayImage const scene = load_scene(spec);
  ComplexSignal const x = scene.to_signal<Complex>();
  if (!(x.norm() > 0.0)) { throw IoError("cdp: image is entirely black"); }

  auto make = [&](size_t trial, bool tuning) {
    RngStream data = trial_stream(spec.seed, StreamRole::Data, 0, tuning, trial);
    auto model = CdpSensing::generate(data, x.size(), spec.mask_count);
    MeasurementSet y = measure_noiseless(model, x);
    RngStream init = trial_stream(spec.seed, StreamRole::Init, 0, tuning, trial);
    ComplexSignal z0 = truncated_spectral_init(model, y, init_config(spec), init);
    return Problem<CdpSensing>{std::move(model), std::move(y), x, std::move(z0)};
  };

  CdpResult result;
  result.rows = scene.rows;
  result.cols = scene.cols;
  result.truth = scene;
  result.algorithms = run_cell(spec, 0, make, TuningGoal::LowestFinalError);

  // Replay trial 0 to capture the recovered images at the checkpoints.
  auto const problem = make(0, false);
  RngStream const rng = trial_stream(spec.seed, StreamRole::Solver, 0, false, 0);
  auto const &marks = spec.checkpoints;
  auto snapshot = [&](std::string const &alg, int pass, ComplexSignal const &z) {
    if (std::find(marks.begin(), marks.end(), pass) == marks.end()) { return; }
    result.snapshots.emplace_back("cdp-" + alg + "-pass" + std::to_string(pass),
                                  image_from_signal(align_phase(z, x), scene.rows, scene.cols));
  };
  for (auto const &a : result.algorithms) {
    std::string const name = algorithm_name(a.algorithm);
    snapshot(name, 0, problem.z0);
    run_algorithm(spec, problem, a.algorithm, a.step, rng,
                  PassObserver<Complex>([&](int pass, ComplexSignal const &z) { snapshot(name, pass, z); }));
  }
  return result;
}

CsvTable CdpResult::csv() const { return curve_table(algorithms); }

SnrResult run_noisy_snr_sweep(ExperimentSpec const &spec) {
  spec.validate();
  SnrResult result;
  result.signal_energies = spec.signal_energies;
  for (size_t g = 0; g < spec.signal_energies.size(); ++g) {
    double const energy = spec.signal_energies[g];
    result.snr.push_back(3.0 * energy);
    auto make = [&](size_t trial, bool tuning) {
      return gaussian_problem(spec, spec.m, std::sqrt(energy), true, g, tuning, trial);
    };
    result.cells.push_back(run_cell(spec, g, make, TuningGoal::LowestFinalError));
  }
  if (spec.zero_noise_control) {
    // Grid index one past the sweep keeps the control's streams disjoint.
    size_t const grid = spec.signal_energies.size();
    auto const problem =
        gaussian_problem(spec, spec.m, std::sqrt(spec.signal_energies.front()), false, grid, false, 0);
    RngStream const rng = trial_stream(spec.seed, StreamRole::Solver, grid, false, 0);
    ExperimentSpec control = spec;
    control.stop_early = true;
    for (auto const &a : result.cells.front()) {
      auto const trace = run_algorithm(control, problem, a.algorithm, a.step, rng);
      result.control.push_back({a.algorithm, a.step, {record_of(trace, spec.success_tol, 0.0)}});
    }
  }
  return result;
}

double SnrResult::mean_final_mse(size_t g, size_t a) const {
  auto const &trials = cells.at(g).at(a).trials;
  double sum = 0.0;
  for (auto const &t : trials) { sum += t.final_rel_error() * t.final_rel_error(); }
  return sum / static_cast<double>(trials.size());
}

double SnrResult::loglog_slope(size_t a) const {
  size_t const k = cells.size();
  if (k < 2) { return NAN; }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t g = 0; g < k; ++g) {
    double const lx = std::log10(snr[g]);
    double const ly = std::log10(mean_final_mse(g, a));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double const kk = static_cast<double>(k);
  return (kk * sxy - sx * sy) / (kk * sxx - sx * sx);
}

CsvTable SnrResult::csv() const {
  CsvTable table({"trial", "signal_energy", "snr", "snr_empirical", "algorithm", "final_rel_mse"});
  for (size_t g = 0; g < cells.size(); ++g) {
    size_t const trials = cells[g].front().trials.size();
    for (size_t t = 0; t < trials; ++t) {
      for (auto const &a : cells[g]) {
        auto const &r = a.trials[t];
        table.add_row({static_cast<long long>(t), signal_energies[g], snr[g], r.empirical_snr,
                       algorithm_name(a.algorithm), r.final_rel_error() * r.final_rel_error()});
      }
    }
  }
  double const inf = std::numeric_limits<double>::infinity();
  for (auto const &a : control) {
    auto const &r = a.trials.front();
    table.add_row({0LL, signal_energies.front(), inf, inf, algorithm_name(a.algorithm) + "-noiseless",
                   r.final_rel_error() * r.final_rel_error()});
  }
  return table;
}

// ---------------------------------------------------------------------------

PresetOutput run_preset(ExperimentSpec const &spec) {
  PresetOutput out;
  std::ostringstream summary;
  std::string const name = preset_name(spec.preset);
  summary << name << " (" << scale_name(spec.scale) << ", seed " << spec.seed << ")\n";
  switch (spec.preset) {
  case Preset::SuccessRateSweep: {
    auto const r = run_success_rate_sweep(spec);
    for (size_t g = 0; g < r.cells.size(); ++g) {
      summary << "  m/n = " << format_double(r.m_over_n[g]) << ":";
      for (auto const &a : r.cells[g]) {
        summary << "  " << algorithm_name(a.algorithm) << " " << format_double(a.success_rate()) << " (step "
                << format_double(a.step) << ")";
      }
      summary << "\n";
    }
    out.tables.emplace_back(name + ".csv", r.csv());
    break;
  }
  case Preset::ConvergenceCurve: {
    auto const r = run_convergence_curve(spec);
    summary << "  " << format_steps(r.algorithms) << "\n";
    for (auto const &a : r.algorithms) {
      std::vector<double> passes;
      for (auto const &t : a.trials) {
        if (t.passes_to_tol) { passes.push_back(*t.passes_to_tol); }
      }
      summary << "  " << algorithm_name(a.algorithm) << ": success " << format_double(a.success_rate());
      if (!passes.empty()) { summary << ", median passes to tol " << format_double(median(passes)); }
      summary << "\n";
    }
    out.tables.emplace_back(name + ".csv", r.csv());
    break;
  }
  case Preset::CdpImage: {
    auto r = run_cdp_image(spec);
    summary << "  " << r.rows << "x" << r.cols << " image, " << format_steps(r.algorithms) << "\n";
    for (auto const &a : r.algorithms) {
      summary << "  " << algorithm_name(a.algorithm) << " trial 0:";
      auto const &e = a.trials.front().rel_error;
      for (int c : spec.checkpoints) {
        if (static_cast<size_t>(c) < e.size()) { summary << " pass " << c << " " << format_double(e[c]); }
      }
      summary << "\n";
    }
    out.tables.emplace_back(name + ".csv", r.csv());
    out.images.emplace_back("cdp-truth.pgm", r.truth);
    for (auto &[stem, image] : r.snapshots) { out.images.emplace_back(stem + ".pgm", std::move(image)); }
    break;
  }
  case Preset::NoisySnrSweep: {
    auto const r = run_noisy_snr_sweep(spec);
    for (size_t a = 0; a < spec.algorithms.size(); ++a) {
      summary << "  " << algorithm_name(spec.algorithms[a]) << ": log-log slope "
              << format_double(r.loglog_slope(a)) << "\n";
    }
    out.tables.emplace_back(name + ".csv", r.csv());
    break;
  }
  }
  out.summary = summary.str();
  return out;
}

void write_output(PresetOutput const &output, std::filesystem::path const &out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) { throw IoError("cannot create " + out_dir.string() + ": " + ec.message()); }
  for (auto const &[file, table] : output.tables) { table.write(out_dir / file); }
  for (auto const &[file, image] : output.images) { write_pgm(out_dir / file, image); }
}

} // namespace itwf
