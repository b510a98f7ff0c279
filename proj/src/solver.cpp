#include "itwf/solver.hpp"

namespace itwf {

void TruncationConfig::validate() const {
  if (!(alpha_z_lb > 0.0) || !(alpha_z_lb < alpha_z_ub)) {
    throw std::invalid_argument("TruncationConfig: need 0 < alpha_z_lb < alpha_z_ub");
  }
  if (!(alpha_x > 0.0) || !(alpha_h > 0.0)) {
    throw std::invalid_argument("TruncationConfig: alpha_x and alpha_h must be positive");
  }
}

void SolverConfig::validate() const {
  trunc.validate();
  if (!(schedule.mu0 > 0.0)) { throw std::invalid_argument("SolverConfig: mu0 must be positive"); }
  if (max_passes < 0) { throw std::invalid_argument("SolverConfig: max_passes must be >= 0"); }
  if (!(success_tol > 0.0)) { throw std::invalid_argument("SolverConfig: success_tol must be positive"); }
  if (trace_every < 1) { throw std::invalid_argument("SolverConfig: trace_every must be >= 1"); }
}

double effective_step(StepSchedule const &schedule, int pass_index) {
  if (pass_index < 1) { throw std::invalid_argument("effective_step: pass index is 1-based"); }
  if (schedule.kind == StepKind::Constant) { return schedule.mu0; }
  return schedule.mu0 / static_cast<double>(pass_index);
}

std::string to_string(Sampling s) {
  switch (s) {
  case Sampling::WithReplacement:
    return "with-replacement";
  case Sampling::WithoutReplacement:
    return "without-replacement";
  case Sampling::FullGradient:
    return "full-gradient";
  }
  return "unknown";
}

std::string to_string(StepKind k) { return k == StepKind::Constant ? "constant" : "diminishing"; }

bool check_E3(double y_i, double mean_y, TruncationConfig const &trunc) {
  if (!(mean_y > 0.0)) { throw std::invalid_argument("check_E3: mean_y must be positive"); }
  return y_i <= trunc.alpha_x * trunc.alpha_x * mean_y;
}

Mask e3_mask(MeasurementSet const &y, TruncationConfig const &trunc) {
  Mask mask(static_cast<size_t>(y.size()));
  for (Index i = 0; i < y.size(); ++i) { mask[static_cast<size_t>(i)] = check_E3(y[i], y.mean_y(), trunc); }
  return mask;
}

ComplexSignal cdp_block_gradient(ComplexSignal const &z, Index l, MeasurementSet const &y, CdpSensing const &model,
                                 Mask const &e3, TruncationConfig const &trunc) {
  require_same_length(y.size(), model.m(), "cdp_block_gradient");
  require_same_length(static_cast<Index>(e3.size()), model.m(), "cdp_block_gradient mask");
  double const z_norm = detail::nonzero_norm(z, "cdp_block_gradient");
  ComplexSignal coeffs = model.forward_block(l, z);
  Index const offset = l * model.n();
  for (Index k = 0; k < coeffs.size(); ++k) {
    Index const i = offset + k;
    coeffs[k] = detail::truncated_coefficient(y[i], coeffs[k], z_norm, e3[static_cast<size_t>(i)], trunc);
  }
  return model.adjoint_block(l, coeffs);
}

} // namespace itwf
