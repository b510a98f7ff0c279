#pragma once

#include "itwf/sensing.hpp"

namespace itwf {

/// dist(z, x) / ||x||. Every error the library reports goes through here.
template <FieldScalar T>
double relative_rmse(Signal<T> const &z, Signal<T> const &x) {
  double const scale = x.norm();
  if (scale == 0.0) { throw std::invalid_argument("relative_rmse: reference signal is zero"); }
  return dist(z, x) / scale;
}

/// sum_i |a_i^* x|^4 / sum_i eta_i^2.
template <FieldScalar T>
double empirical_snr(GaussianSensing<T> const &model, Signal<T> const &x, RealVector const &eta) {
  require_same_length(eta.size(), model.m(), "empirical_snr");
  double const noise = eta.squaredNorm();
  if (noise == 0.0) { throw std::invalid_argument("empirical_snr: zero noise"); }
  return model.forward(x).cwiseAbs2().squaredNorm() / noise;
}

} // namespace itwf
