#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "itwf/config.hpp"
#include "itwf/csv.hpp"
#include "itwf/image.hpp"
#include "itwf/solver.hpp"

namespace itwf {

enum class Preset { SuccessRateSweep, ConvergenceCurve, CdpImage, NoisySnrSweep };
enum class Scale { Desk, Paper };

/// Solver variants the presets compare. The step of Twf is mu itself; the
/// incremental variants take their step in units of 1/n.
enum class Algorithm { Twf, ItwfWithReplacement, ItwfWithoutReplacement, ItwfDiminishing };

std::string preset_name(Preset p);
std::string algorithm_name(Algorithm a);
std::string scale_name(Scale s);
/// Throw ConfigError on unknown names.
Preset parse_preset(std::string const &name);
Algorithm parse_algorithm(std::string const &name);
Scale parse_scale(std::string const &name);

struct ExperimentSpec {
  Preset preset = Preset::ConvergenceCurve;
  Scale scale = Scale::Desk;
  std::uint64_t seed = 1;
  /// 0 means one worker per hardware thread. Results do not depend on it.
  unsigned threads = 0;

  Index n = 100;
  /// Measurement count for the converge and snr-sweep presets.
  Index m = 800;
  /// Oversampling grid for success-sweep.
  std::vector<double> m_over_n;
  int trials = 20;
  /// Extra trials, disjoint from the reported ones, used to pick each
  /// algorithm's step from its grid.
  int tuning_trials = 5;
  int init_power_iterations = 50;
  double alpha_y = 3.0;
  TruncationConfig trunc;
  std::vector<Algorithm> algorithms;
  std::vector<double> twf_steps = {0.05, 0.1, 0.2, 0.4};
  std::vector<double> itwf_steps = {0.05, 0.1, 0.2, 0.4};
  int max_passes = 1000;
  double success_tol = 1e-5;
  bool stop_early = true;
  /// ||x|| for the noiseless Gaussian presets.
  double signal_norm = 1.0;

  /// cdp: PGM input; empty selects the built-in synthetic scene.
  std::filesystem::path image_path;
  Index image_rows = 32;
  Index image_cols = 32;
  Index mask_count = 12;
  std::vector<int> checkpoints = {0, 1, 2, 5, 10};

  /// snr-sweep: grid of ||x||^2; the nominal SNR is 3 ||x||^2.
  std::vector<double> signal_energies;
  bool zero_noise_control = true;

  /// Throws ConfigError, or IoError for a missing image file.
  void validate() const;
};

ExperimentSpec default_spec(Preset preset, Scale scale);

/// Overrides spec fields from config keys (see config_help()); throws
/// ConfigError on unknown keys or bad values and validates the result.
void apply_config(ExperimentSpec &spec, KeyValueConfig config);

std::string config_help();

/// Outcome of one solver run in one trial.
struct TrialRecord {
  /// Relative error after pass k at index k; index 0 is the initial point.
  std::vector<double> rel_error;
  bool succeeded = false;
  bool diverged = false;
  int passes_used = 0;
  std::optional<int> passes_to_tol;
  /// snr-sweep only.
  double empirical_snr = 0.0;

  double final_rel_error() const { return rel_error.back(); }
};

struct AlgorithmTrials {
  Algorithm algorithm;
  /// Selected entry of the algorithm's step grid.
  double step = 0.0;
  std::vector<TrialRecord> trials;

  double success_rate() const;
};

struct SuccessSweepResult {
  std::vector<double> m_over_n;
  std::vector<Index> m;
  /// cells[g][a]: grid point g, algorithm a.
  std::vector<std::vector<AlgorithmTrials>> cells;

  CsvTable csv() const;
};

struct ConvergenceResult {
  std::vector<AlgorithmTrials> algorithms;

  CsvTable csv() const;
};

struct CdpResult {
  Index rows = 0;
  Index cols = 0;
  std::vector<AlgorithmTrials> algorithms;
  GrayImage truth;
  /// Recovered images of trial 0: (file stem, image).
  std::vector<std::pair<std::string, GrayImage>> snapshots;

  CsvTable csv() const;
};

struct SnrResult {
  std::vector<double> signal_energies;
  /// Nominal SNR 3 ||x||^2 per grid point.
  std::vector<double> snr;
  std::vector<std::vector<AlgorithmTrials>> cells;
  /// Noiseless runs at the first grid point with the steps tuned there.
  std::vector<AlgorithmTrials> control;

  CsvTable csv() const;
  /// Least-squares slope of log10(mean final relative MSE) against
  /// log10(SNR) for algorithm column a.
  double loglog_slope(size_t a) const;
  double mean_final_mse(size_t g, size_t a) const;
};

SuccessSweepResult run_success_rate_sweep(ExperimentSpec const &spec);
ConvergenceResult run_convergence_curve(ExperimentSpec const &spec);
/// Throws IoError on an unreadable image.
CdpResult run_cdp_image(ExperimentSpec const &spec);
SnrResult run_noisy_snr_sweep(ExperimentSpec const &spec);

/// Everything a preset writes: CSV tables and images keyed by file name.
struct PresetOutput {
  std::vector<std::pair<std::string, CsvTable>> tables;
  std::vector<std::pair<std::string, GrayImage>> images;
  std::string summary;
};

PresetOutput run_preset(ExperimentSpec const &spec);
/// Creates out_dir if needed; throws IoError.
void write_output(PresetOutput const &output, std::filesystem::path const &out_dir);

/// Stream (seed, id) for one randomness role of one trial. Ids never collide
/// across roles, grid points, tuning and reported trials.
enum class StreamRole : std::uint64_t { Data = 1, Noise = 2, Init = 3, Solver = 4 };
RngStream trial_stream(std::uint64_t seed, StreamRole role, size_t grid, bool tuning, size_t trial);

} // namespace itwf
