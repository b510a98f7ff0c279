#pragma once

#include <memory>

#include "itwf/core.hpp"

namespace itwf {

enum class NoiseModel { Noiseless, Additive, Poisson };

std::string to_string(NoiseModel model);

/// Measurements y with their cached mean (the denominator of every
/// truncation threshold) and a tag recording how they were produced.
class MeasurementSet {
public:
  MeasurementSet(RealVector y, NoiseModel model);

  RealVector const &y() const { return y_; }
  double operator[](Index i) const { return y_[i]; }
  Index size() const { return y_.size(); }
  double mean_y() const { return mean_y_; }
  NoiseModel model() const { return model_; }

private:
  RealVector y_;
  double mean_y_;
  NoiseModel model_;
};

/// Dense model with i.i.d. Gaussian sensing vectors a_i, stored as rows so
/// that the incremental solver touches one contiguous row per iteration.
template <FieldScalar T>
class GaussianSensing {
public:
  using Scalar = T;
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  /// Row i of `rows` is a_i (not its conjugate).
  explicit GaussianSensing(Matrix rows);

  static GaussianSensing generate(RngStream &rng, Index m, Index n);

  Index m() const { return rows_.rows(); }
  Index n() const { return rows_.cols(); }
  Matrix const &rows() const { return rows_; }

  /// a_i as a column vector.
  Signal<T> vector(Index i) const { return rows_.row(i).transpose(); }

  /// a_i^* z.
  T inner(Index i, Signal<T> const &z) const { return rows_.row(i).dot(z.transpose()); }

  /// z += scale * a_i.
  void axpy(Index i, T scale, Signal<T> &z) const { z.noalias() += scale * rows_.row(i).transpose(); }

  /// All m inner products a_i^* z.
  Signal<T> forward(Signal<T> const &z) const;
  /// sum_i c_i a_i.
  Signal<T> adjoint(Signal<T> const &c) const;

private:
  Matrix rows_;
};

class DftPlan;

/// Coded diffraction patterns: L random masks D_l with entries in
/// {+1, -1, +j, -j}; block l of the measurements is |F D_l x|^2 with F the
/// unnormalized n-point DFT. Only the masks are stored and F is applied by FFT.
///
/// Sample index i = l * n + k refers to frequency k of mask l, whose implied
/// sensing vector satisfies a_i^* z = (F D_l z)_k.
class CdpSensing {
public:
  using Scalar = Complex;

  /// masks is L x n; every entry must be one of {+1, -1, +j, -j}.
  explicit CdpSensing(Eigen::MatrixXcd masks);

  static CdpSensing generate(RngStream &rng, Index n, Index mask_count);

  Index m() const { return masks_.rows() * masks_.cols(); }
  Index n() const { return masks_.cols(); }
  Index mask_count() const { return masks_.rows(); }
  Eigen::MatrixXcd const &masks() const { return masks_; }

  /// F (D_l ⊙ z): entry k is a_i^* z for i = l n + k.
  ComplexSignal forward_block(Index l, ComplexSignal const &z) const;
  /// conj(D_l) ⊙ (F^H c) = sum_k c_k a_{l n + k}.
  ComplexSignal adjoint_block(Index l, ComplexSignal const &c) const;

  ComplexSignal forward(ComplexSignal const &z) const;
  ComplexSignal adjoint(ComplexSignal const &c) const;

  /// Explicit a_i, O(n). Intended for single-sample access; block
  /// operations should go through the FFT.
  ComplexSignal vector(Index i) const;
  Complex inner(Index i, ComplexSignal const &z) const { return vector(i).dot(z); }
  void axpy(Index i, Complex scale, ComplexSignal &z) const { z.noalias() += scale * vector(i); }

private:
  void check_block(Index l) const;

  Eigen::MatrixXcd masks_;
  std::shared_ptr<DftPlan const> plan_;
};

template <typename M>
concept SensingOperator = requires(M const &model, Signal<typename M::Scalar> const &v) {
  { model.m() } -> std::convertible_to<Index>;
  { model.n() } -> std::convertible_to<Index>;
  { model.forward(v) } -> std::convertible_to<Signal<typename M::Scalar>>;
  { model.adjoint(v) } -> std::convertible_to<Signal<typename M::Scalar>>;
};

template <typename M>
inline constexpr bool is_cdp_v = std::same_as<M, CdpSensing>;

/// y_i = |a_i^* x|^2. For CDP the L blocks are concatenated in mask order.
template <SensingOperator M>
MeasurementSet measure_noiseless(M const &model, Signal<typename M::Scalar> const &x) {
  require_same_length(x.size(), model.n(), "measure_noiseless");
  return MeasurementSet(model.forward(x).cwiseAbs2(), NoiseModel::Noiseless);
}

/// y_i + eta_i. Negative results are kept as-is.
MeasurementSet add_bounded_noise(MeasurementSet const &y, RealVector const &eta);

/// Each entry replaced by an independent Poisson draw with rate y_i.
MeasurementSet poissonize(MeasurementSet const &y, RngStream &rng);

extern template class GaussianSensing<Real>;
extern template class GaussianSensing<Complex>;

} // namespace itwf
