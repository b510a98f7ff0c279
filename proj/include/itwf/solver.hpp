#pragma once

#include <chrono>
#include <functional>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "itwf/metrics.hpp"
#include "itwf/sensing.hpp"

namespace itwf {

struct TruncationConfig {
  double alpha_z_lb = 0.3;
  double alpha_z_ub = 5.0;
  double alpha_x = 5.0;
  /// E2 constant, full-gradient only.
  double alpha_h = 5.0;
  bool enable_e1 = true;
  /// Controls E2 for the full-gradient solver and E3 for the incremental one.
  bool enable_e2_or_e3 = true;

  void validate() const;
};

enum class StepKind { Constant, DiminishingPerPass };

struct StepSchedule {
  StepKind kind = StepKind::Constant;
  double mu0 = 0.1;

  static StepSchedule constant(double mu) { return {StepKind::Constant, mu}; }
  static StepSchedule diminishing(double mu) { return {StepKind::DiminishingPerPass, mu}; }
};

/// Step used during pass `pass_index` (1-based): mu0, or mu0 / pass_index.
double effective_step(StepSchedule const &schedule, int pass_index);

/// The conservative step that comes out of the convergence analysis for the
/// real Gaussian model, 0.00016 / n. Works, but slowly.
inline constexpr double kProvableStepScale = 0.00016;
inline double provable_step(Index n) { return kProvableStepScale / static_cast<double>(n); }

enum class Sampling { WithReplacement, WithoutReplacement, FullGradient };
enum class Increment { SingleSample, PerMaskBlock };

std::string to_string(Sampling s);
std::string to_string(StepKind k);

struct SolverConfig {
  TruncationConfig trunc;
  StepSchedule schedule;
  Sampling sampling = Sampling::WithoutReplacement;
  Increment increment = Increment::SingleSample;
  int max_passes = 1000;
  /// Relative error (with truth) or relative per-pass change (without).
  double success_tol = 1e-5;
  int trace_every = 1;
  /// When false, runs all max_passes even after reaching success_tol.
  bool stop_early = true;
  RngStream rng;

  void validate() const;
};

struct PassRecord {
  int pass;
  double rel_error;
};

template <FieldScalar T>
struct RunTrace {
  /// Entry 0 is the initial point; only filled when truth is supplied.
  std::vector<PassRecord> rel_error_per_pass;
  /// ||z_after - z_before|| / ||z_before|| for each pass executed.
  std::vector<double> rel_change_per_pass;
  Signal<T> final_iterate;
  int passes_used = 0;
  bool succeeded = false;
  /// Iterate became non-finite or zero; final_iterate is the last good pass.
  bool diverged = false;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  double wall_seconds = 0.0;

  /// First recorded pass whose relative error is below tol.
  std::optional<int> passes_to(double tol) const {
    for (auto const &r : rel_error_per_pass) {
      if (r.rel_error < tol) { return r.pass; }
    }
    return std::nullopt;
  }
  double final_rel_error() const { return rel_error_per_pass.empty() ? NAN : rel_error_per_pass.back().rel_error; }
};

using Mask = std::vector<bool>;

/// Called after every completed pass with the pass index and iterate.
template <FieldScalar T>
using PassObserver = std::function<void(int, Signal<T> const &)>;

// -------------------------------------------------------------------------
// Per-sample pieces

/// (2|u|^2 - 2y) / conj(u), the scalar multiplying a_i in the Wirtinger
/// gradient of  |a_i^* z|^2 - y log |a_i^* z|^2  with u = a_i^* z.
template <FieldScalar T>
T gradient_coefficient(double y_i, T a_dot_z) {
  double const mag2 = std::norm(a_dot_z);
  if (mag2 == 0.0) { throw std::domain_error("gradient_coefficient: a_i^* z = 0 (must be truncated)"); }
  return (2.0 * mag2 - 2.0 * y_i) / conj_if_complex(a_dot_z);
}

template <FieldScalar T>
Signal<T> wirtinger_gradient(double y_i, T a_dot_z, Signal<T> const &a_i) {
  return gradient_coefficient(y_i, a_dot_z) * a_i;
}

/// alpha_z_lb <= |a_i^* z| / ||z|| <= alpha_z_ub.
template <FieldScalar T>
bool check_E1(T a_dot_z, double z_norm, TruncationConfig const &trunc) {
  if (!(z_norm > 0.0)) { throw std::invalid_argument("check_E1: ||z|| must be positive"); }
  double const ratio = std::abs(a_dot_z) / z_norm;
  return trunc.alpha_z_lb <= ratio && ratio <= trunc.alpha_z_ub;
}

/// y_i <= alpha_x^2 mean_y. Independent of the iterate.
bool check_E3(double y_i, double mean_y, TruncationConfig const &trunc);

/// E3 for every sample, computed once before the refinement stage.
Mask e3_mask(MeasurementSet const &y, TruncationConfig const &trunc);

namespace detail {

template <FieldScalar T>
Mask e2_from_residuals(Signal<T> const &inner, MeasurementSet const &y, TruncationConfig const &trunc) {
  RealVector const residual = (y.y() - inner.cwiseAbs2()).cwiseAbs();
  double const threshold = trunc.alpha_h * residual.mean();
  Mask mask(static_cast<size_t>(y.size()));
  for (Index i = 0; i < y.size(); ++i) { mask[static_cast<size_t>(i)] = residual[i] <= threshold; }
  return mask;
}

template <FieldScalar T>
double nonzero_norm(Signal<T> const &z, char const *what) {
  double const norm = z.norm();
  if (!(norm > 0.0)) { throw std::invalid_argument(std::string(what) + ": iterate must be nonzero"); }
  return norm;
}

/// Either the gradient coefficient or zero when the sample is truncated. A
/// sample with a_i^* z = 0 contributes nothing even with E1 disabled.
template <FieldScalar T>
T truncated_coefficient(double y_i, T a_dot_z, double z_norm, bool data_event, TruncationConfig const &trunc) {
  if (!data_event) { return T(0); }
  if (trunc.enable_e1) {
    if (!check_E1(a_dot_z, z_norm, trunc)) { return T(0); }
  } else if (a_dot_z == T(0)) {
    return T(0);
  }
  return gradient_coefficient(y_i, a_dot_z);
}

} // namespace detail

/// |y_i - |a_i^* z|^2| <= (alpha_h / m) sum_k |y_k - |a_k^* z|^2| for all i.
/// Needs every residual, hence a full pass over the data.
template <SensingOperator M>
Mask check_E2(MeasurementSet const &y, M const &model, Signal<typename M::Scalar> const &z,
              TruncationConfig const &trunc) {
  require_same_length(y.size(), model.m(), "check_E2");
  detail::nonzero_norm(z, "check_E2");
  return detail::e2_from_residuals(model.forward(z), y, trunc);
}

// -------------------------------------------------------------------------
// Full gradient

/// The truncated gradient sum  sum_i grad_i 1{E1 and E2}  at z (E2 omitted when
/// disabled).
template <SensingOperator M>
Signal<typename M::Scalar> truncated_full_gradient(Signal<typename M::Scalar> const &z, MeasurementSet const &y,
                                                   M const &model, TruncationConfig const &trunc) {
  using T = typename M::Scalar;
  require_same_length(y.size(), model.m(), "twf_pass");
  double const z_norm = detail::nonzero_norm(z, "twf_pass");
  Signal<T> const inner = model.forward(z);
  Mask const e2 = trunc.enable_e2_or_e3 ? detail::e2_from_residuals(inner, y, trunc) : Mask(inner.size(), true);
  Signal<T> coeffs(inner.size());
  for (Index i = 0; i < inner.size(); ++i) {
    coeffs[i] = detail::truncated_coefficient(y[i], inner[i], z_norm, e2[static_cast<size_t>(i)], trunc);
  }
  return model.adjoint(coeffs);
}

/// One full-gradient step  z - (mu/m) sum_i grad_i 1{E1 and E2}.
template <SensingOperator M>
Signal<typename M::Scalar> twf_pass(Signal<typename M::Scalar> const &z, MeasurementSet const &y, M const &model,
                                    double mu, TruncationConfig const &trunc) {
  return z - (mu / static_cast<double>(model.m())) * truncated_full_gradient(z, y, model, trunc);
}

// -------------------------------------------------------------------------
// Incremental

namespace detail {

template <SensingOperator M>
bool itwf_update(Signal<typename M::Scalar> &z, double z_norm, Index i, MeasurementSet const &y, M const &model,
                 Mask const &e3, double mu, TruncationConfig const &trunc) {
  using T = typename M::Scalar;
  if (!e3[static_cast<size_t>(i)]) { return false; }
  T const u = model.inner(i, z);
  T const c = truncated_coefficient(y[i], u, z_norm, true, trunc);
  if (c == T(0)) { return false; }
  model.axpy(i, -mu * c, z);
  return true;
}

} // namespace detail

/// In-place single-sample update; returns whether the sample contributed.
/// E1 is evaluated before the gradient so a_i^* z = 0 never reaches the
/// division.
template <SensingOperator M>
bool itwf_step(Signal<typename M::Scalar> &z, Index i, MeasurementSet const &y, M const &model, Mask const &e3,
               double mu, TruncationConfig const &trunc) {
  if (i < 0 || i >= model.m()) { throw std::out_of_range("itwf_iteration: sample index out of range"); }
  require_same_length(static_cast<Index>(e3.size()), model.m(), "itwf_iteration mask");
  return detail::itwf_update(z, detail::nonzero_norm(z, "itwf_iteration"), i, y, model, e3, mu, trunc);
}

template <SensingOperator M>
Signal<typename M::Scalar> itwf_iteration(Signal<typename M::Scalar> const &z, Index i, MeasurementSet const &y,
                                          M const &model, Mask const &e3, double mu, TruncationConfig const &trunc) {
  Signal<typename M::Scalar> out = z;
  itwf_step(out, i, y, model, e3, mu, trunc);
  return out;
}

/// Summed truncated gradient over the n samples of mask l, via one FFT pair.
ComplexSignal cdp_block_gradient(ComplexSignal const &z, Index l, MeasurementSet const &y, CdpSensing const &model,
                                 Mask const &e3, TruncationConfig const &trunc);

inline ComplexSignal itwf_block_iteration(ComplexSignal const &z, Index l, MeasurementSet const &y,
                                          CdpSensing const &model, Mask const &e3, double mu,
                                          TruncationConfig const &trunc) {
  return z - mu * cdp_block_gradient(z, l, y, model, e3, trunc);
}

// -------------------------------------------------------------------------
// Runs

namespace detail {

/// Pass-boundary bookkeeping shared by both runners. Returns true when the
/// run should stop.
template <FieldScalar T>
bool finish_pass(RunTrace<T> &trace, Signal<T> &z, Signal<T> const &before, int pass, SolverConfig const &cfg,
                 Signal<T> const *truth) {
  if (!z.allFinite() || z.norm() == 0.0) {
    trace.diverged = true;
    z = before;
    return true;
  }
  trace.passes_used = pass;
  double const change = (z - before).norm() / before.norm();
  trace.rel_change_per_pass.push_back(change);
  if (truth) {
    double const err = relative_rmse(z, *truth);
    bool const done = err < cfg.success_tol;
    bool const last = pass == cfg.max_passes || (done && cfg.stop_early);
    if (pass % cfg.trace_every == 0 || last) { trace.rel_error_per_pass.push_back({pass, err}); }
    if (done) {
      trace.succeeded = true;
      return cfg.stop_early;
    }
    return false;
  }
  if (change < cfg.success_tol) {
    trace.succeeded = true;
    return cfg.stop_early;
  }
  return false;
}

template <FieldScalar T>
RunTrace<T> start_trace(Signal<T> const &z0, SolverConfig const &cfg, Signal<T> const *truth) {
  cfg.validate();
  detail::nonzero_norm(z0, "solver");
  require_finite(z0, "solver");
  RunTrace<T> trace;
  trace.seed = cfg.rng.seed();
  trace.stream_id = cfg.rng.stream_id();
  if (truth) {
    require_same_length(truth->size(), z0.size(), "solver truth");
    double const err = relative_rmse(z0, *truth);
    trace.rel_error_per_pass.push_back({0, err});
    trace.succeeded = err < cfg.success_tol;
  }
  trace.final_iterate = z0;
  return trace;
}

inline void fill_order(std::vector<Index> &order, Index count, Sampling sampling, RngStream &rng) {
  order.resize(static_cast<size_t>(count));
  if (sampling == Sampling::WithReplacement) {
    for (auto &i : order) { i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(count))); }
    return;
  }
  std::iota(order.begin(), order.end(), Index{0});
  for (Index k = count - 1; k > 0; --k) {
    auto const j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(k + 1)));
    std::swap(order[static_cast<size_t>(k)], order[static_cast<size_t>(j)]);
  }
}

} // namespace detail

/// Full-gradient refinement: one twf_pass per pass.
template <SensingOperator M>
RunTrace<typename M::Scalar> twf_run(Signal<typename M::Scalar> const &z0, MeasurementSet const &y, M const &model,
                                     SolverConfig const &cfg,
                                     std::optional<Signal<typename M::Scalar>> const &truth = std::nullopt,
                                     PassObserver<typename M::Scalar> const &observer = {}) {
  using T = typename M::Scalar;
  auto const t0 = std::chrono::steady_clock::now();
  Signal<T> const *truth_ptr = truth ? &*truth : nullptr;
  RunTrace<T> trace = detail::start_trace(z0, cfg, truth_ptr);
  Signal<T> z = z0;
  for (int pass = 1; pass <= cfg.max_passes && !(trace.succeeded && cfg.stop_early); ++pass) {
    Signal<T> const before = z;
    z = twf_pass(z, y, model, effective_step(cfg.schedule, pass), cfg.trunc);
    bool const stop = detail::finish_pass(trace, z, before, pass, cfg, truth_ptr);
    if (observer && !trace.diverged) { observer(pass, z); }
    if (stop) { break; }
  }
  trace.final_iterate = std::move(z);
  trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return trace;
}

/// Incremental refinement. A pass is m single-sample iterations, or L mask
/// blocks with Increment::PerMaskBlock (CDP only).
template <SensingOperator M>
RunTrace<typename M::Scalar> itwf_run(Signal<typename M::Scalar> const &z0, MeasurementSet const &y, M const &model,
                                      SolverConfig const &cfg,
                                      std::optional<Signal<typename M::Scalar>> const &truth = std::nullopt,
                                      PassObserver<typename M::Scalar> const &observer = {}) {
  using T = typename M::Scalar;
  if (cfg.sampling == Sampling::FullGradient) {
    throw std::invalid_argument("itwf_run: FullGradient sampling is the full-gradient solver; use twf_run or solve");
  }
  if (cfg.increment == Increment::PerMaskBlock && !is_cdp_v<M>) {
    throw std::invalid_argument("itwf_run: PerMaskBlock increments require CDP sensing");
  }
  require_same_length(y.size(), model.m(), "itwf_run");
  auto const t0 = std::chrono::steady_clock::now();
  Signal<T> const *truth_ptr = truth ? &*truth : nullptr;
  RunTrace<T> trace = detail::start_trace(z0, cfg, truth_ptr);

  Mask const e3 = cfg.trunc.enable_e2_or_e3 ? e3_mask(y, cfg.trunc) : Mask(static_cast<size_t>(y.size()), true);
  RngStream rng = cfg.rng;
  std::vector<Index> order;
  Signal<T> z = z0;
  for (int pass = 1; pass <= cfg.max_passes && !(trace.succeeded && cfg.stop_early); ++pass) {
    double const mu = effective_step(cfg.schedule, pass);
    Signal<T> const before = z;
    bool collapsed = false;
    if constexpr (is_cdp_v<M>) {
      if (cfg.increment == Increment::PerMaskBlock) {
        detail::fill_order(order, model.mask_count(), cfg.sampling, rng);
        for (Index l : order) {
          if (!(z.norm() > 0.0) || !z.allFinite()) {
            collapsed = true;
            break;
          }
          z -= mu * cdp_block_gradient(z, l, y, model, e3, cfg.trunc);
        }
      }
    }
    if (cfg.increment == Increment::SingleSample) {
      detail::fill_order(order, model.m(), cfg.sampling, rng);
      for (Index i : order) {
        double const norm = z.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
          collapsed = true;
          break;
        }
        detail::itwf_update(z, norm, i, y, model, e3, mu, cfg.trunc);
      }
    }
    if (collapsed) { z.setConstant(T(NAN)); }
    bool const stop = detail::finish_pass(trace, z, before, pass, cfg, truth_ptr);
    if (observer && !trace.diverged) { observer(pass, z); }
    if (stop) { break; }
  }
  trace.final_iterate = std::move(z);
  trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return trace;
}

/// Dispatches on cfg.sampling: FullGradient runs the full-gradient solver,
/// anything else the incremental one.
template <SensingOperator M>
RunTrace<typename M::Scalar> solve(Signal<typename M::Scalar> const &z0, MeasurementSet const &y, M const &model,
                                   SolverConfig const &cfg,
                                   std::optional<Signal<typename M::Scalar>> const &truth = std::nullopt,
                                   PassObserver<typename M::Scalar> const &observer = {}) {
  if (cfg.sampling == Sampling::FullGradient) { return twf_run(z0, y, model, cfg, truth, observer); }
  return itwf_run(z0, y, model, cfg, truth, observer);
}

} // namespace itwf
