#pragma once

#include <cmath>

#include "itwf/sensing.hpp"

namespace itwf {

struct InitConfig {
  double alpha_y = 3.0;
  int power_iterations = 50;

  void validate() const {
    if (!(alpha_y > 0.0)) { throw std::invalid_argument("InitConfig: alpha_y must be positive"); }
    if (power_iterations < 1) { throw std::invalid_argument("InitConfig: power_iterations must be >= 1"); }
  }
};

/// Weights w_i = y_i 1{y_i <= alpha_y^2 mean_y} defining the truncated data
/// matrix Y = (1/m) sum_i w_i a_i a_i^*. The boundary is inclusive.
inline RealVector spectral_weights(MeasurementSet const &y, double alpha_y) {
  double const threshold = alpha_y * alpha_y * y.mean_y();
  return (y.y().array() <= threshold).select(y.y(), 0.0);
}

/// Y v computed through the sensing operator without forming Y.
template <SensingOperator M>
Signal<typename M::Scalar> apply_truncated_matrix(M const &model, RealVector const &weights,
                                                  Signal<typename M::Scalar> const &v) {
  using T = typename M::Scalar;
  Signal<T> coeffs = model.forward(v);
  coeffs.array() *= weights.array().template cast<T>();
  return model.adjoint(coeffs) / static_cast<double>(model.m());
}

/// Truncated spectral initialization: `power_iterations` normalized power
/// steps on Y from a random unit Gaussian start, scaled to sqrt(mean_y).
template <SensingOperator M>
Signal<typename M::Scalar> truncated_spectral_init(M const &model, MeasurementSet const &y, InitConfig const &cfg,
                                                   RngStream &rng) {
  using T = typename M::Scalar;
  cfg.validate();
  require_same_length(y.size(), model.m(), "truncated_spectral_init");
  if (!(y.mean_y() > 0.0)) {
    throw std::invalid_argument("truncated_spectral_init: all-zero measurements, signal unrecoverable");
  }
  RealVector const weights = spectral_weights(y, cfg.alpha_y);
  if (!(weights.array() != 0.0).any()) {
    throw std::invalid_argument("truncated_spectral_init: every sample truncated, empty data matrix");
  }

  Signal<T> v = gaussian_vector<T>(rng, model.n());
  v.normalize();
  for (int it = 0; it < cfg.power_iterations; ++it) {
    Signal<T> next = apply_truncated_matrix(model, weights, v);
    double const norm = next.norm();
    if (norm == 0.0) { throw std::invalid_argument("truncated_spectral_init: start vector in null space of Y"); }
    v = next / norm;
  }
  return std::sqrt(y.mean_y()) * v;
}

} // namespace itwf
