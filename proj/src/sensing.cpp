#include "itwf/sensing.hpp"

#include <fftw3.h>

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>

namespace itwf {

std::string to_string(NoiseModel model) {
  switch (model) {
  case NoiseModel::Noiseless:
    return "noiseless";
  case NoiseModel::Additive:
    return "additive";
  case NoiseModel::Poisson:
    return "poisson";
  }
  return "unknown";
}

MeasurementSet::MeasurementSet(RealVector y, NoiseModel model)
    : y_(std::move(y)), mean_y_(0.0), model_(model) {
  if (y_.size() < 1) { throw std::invalid_argument("MeasurementSet: need at least one measurement"); }
  if (!y_.allFinite()) { throw std::invalid_argument("MeasurementSet: non-finite measurement"); }
  if (model_ != NoiseModel::Additive && (y_.array() < 0.0).any()) {
    throw std::invalid_argument("MeasurementSet: negative measurement under " + to_string(model_) + " model");
  }
  mean_y_ = y_.mean();
}

MeasurementSet add_bounded_noise(MeasurementSet const &y, RealVector const &eta) {
  require_same_length(y.size(), eta.size(), "add_bounded_noise");
  return MeasurementSet(y.y() + eta, NoiseModel::Additive);
}

MeasurementSet poissonize(MeasurementSet const &y, RngStream &rng) {
  RealVector out(y.size());
  for (Index i = 0; i < y.size(); ++i) {
    if (y[i] < 0.0) { throw std::invalid_argument("poissonize: negative rate"); }
    out[i] = rng.poisson(y[i]);
  }
  return MeasurementSet(std::move(out), NoiseModel::Poisson);
}

// -------------------------------------------------------------------------
// Gaussian

template <FieldScalar T>
GaussianSensing<T>::GaussianSensing(Matrix rows) : rows_(std::move(rows)) {
  if (rows_.rows() < 1 || rows_.cols() < 1) { throw std::invalid_argument("GaussianSensing: need m, n >= 1"); }
  if (!rows_.allFinite()) { throw std::invalid_argument("GaussianSensing: non-finite sensing vector"); }
}

template <FieldScalar T>
GaussianSensing<T> GaussianSensing<T>::generate(RngStream &rng, Index m, Index n) {
  if (m < 1 || n < 1) { throw std::invalid_argument("GaussianSensing::generate: need m, n >= 1"); }
  Matrix rows(m, n);
  for (Index i = 0; i < m; ++i) { rows.row(i) = gaussian_vector<T>(rng, n).transpose(); }
  return GaussianSensing(std::move(rows));
}

template <FieldScalar T>
Signal<T> GaussianSensing<T>::forward(Signal<T> const &z) const {
  require_same_length(z.size(), n(), "GaussianSensing::forward");
  if constexpr (std::same_as<T, Real>) {
    return rows_ * z;
  } else {
    return rows_.conjugate() * z;
  }
}

template <FieldScalar T>
Signal<T> GaussianSensing<T>::adjoint(Signal<T> const &c) const {
  require_same_length(c.size(), m(), "GaussianSensing::adjoint");
  return rows_.transpose() * c;
}

template class GaussianSensing<Real>;
template class GaussianSensing<Complex>;

// -------------------------------------------------------------------------
// CDP

namespace {
std::mutex &fftw_planner_mutex() {
  static std::mutex mutex;
  return mutex;
}

constexpr std::array<Complex, 4> kMaskAlphabet = {Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)};
} // namespace

/// Forward and backward unnormalized 1-D DFT plans of one size. FFTW planning
/// is serialized; execution through the new-array interface is reentrant.
class DftPlan {
public:
  explicit DftPlan(Index n) : n_(n) {
    std::lock_guard const lock(fftw_planner_mutex());
    auto *in = fftw_alloc_complex(static_cast<size_t>(n));
    auto *out = fftw_alloc_complex(static_cast<size_t>(n));
    int const size = static_cast<int>(n);
    unsigned const flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_1d(size, in, out, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_1d(size, in, out, FFTW_BACKWARD, flags);
    fftw_free(in);
    fftw_free(out);
    if (!forward_ || !backward_) { throw std::runtime_error("DftPlan: FFTW planning failed"); }
  }
  DftPlan(DftPlan const &) = delete;
  DftPlan &operator=(DftPlan const &) = delete;
  ~DftPlan() {
    std::lock_guard const lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  Index size() const { return n_; }

  void forward(ComplexSignal &in, ComplexSignal &out) const { run(forward_, in, out); }
  void backward(ComplexSignal &in, ComplexSignal &out) const { run(backward_, in, out); }

private:
  static void run(fftw_plan plan, ComplexSignal &in, ComplexSignal &out) {
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex *>(in.data()), reinterpret_cast<fftw_complex *>(out.data()));
  }

  Index n_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

CdpSensing::CdpSensing(Eigen::MatrixXcd masks) : masks_(std::move(masks)) {
  if (masks_.rows() < 1 || masks_.cols() < 1) { throw std::invalid_argument("CdpSensing: need L, n >= 1"); }
  for (Index l = 0; l < masks_.rows(); ++l) {
    for (Index k = 0; k < masks_.cols(); ++k) {
      Complex const v = masks_(l, k);
      bool const valid = (v.real() == 0.0 && std::abs(v.imag()) == 1.0) || (v.imag() == 0.0 && std::abs(v.real()) == 1.0);
      if (!valid) { throw std::invalid_argument("CdpSensing: mask entries must lie in {+1, -1, +j, -j}"); }
    }
  }
  plan_ = std::make_shared<DftPlan const>(masks_.cols());
}

CdpSensing CdpSensing::generate(RngStream &rng, Index n, Index mask_count) {
  if (n < 1 || mask_count < 1) { throw std::invalid_argument("CdpSensing::generate: need n, L >= 1"); }
  Eigen::MatrixXcd masks(mask_count, n);
  for (Index l = 0; l < mask_count; ++l) {
    for (Index k = 0; k < n; ++k) { masks(l, k) = kMaskAlphabet[rng.below(4)]; }
  }
  return CdpSensing(std::move(masks));
}

void CdpSensing::check_block(Index l) const {
  if (l < 0 || l >= mask_count()) { throw std::out_of_range("CdpSensing: mask index out of range"); }
}

ComplexSignal CdpSensing::forward_block(Index l, ComplexSignal const &z) const {
  check_block(l);
  require_same_length(z.size(), n(), "CdpSensing::forward_block");
  ComplexSignal masked = masks_.row(l).transpose().cwiseProduct(z);
  ComplexSignal out(n());
  plan_->forward(masked, out);
  return out;
}

ComplexSignal CdpSensing::adjoint_block(Index l, ComplexSignal const &c) const {
  check_block(l);
  require_same_length(c.size(), n(), "CdpSensing::adjoint_block");
  ComplexSignal in = c;
  ComplexSignal out(n());
  plan_->backward(in, out);
  return masks_.row(l).transpose().conjugate().cwiseProduct(out);
}

ComplexSignal CdpSensing::forward(ComplexSignal const &z) const {
  ComplexSignal out(m());
  for (Index l = 0; l < mask_count(); ++l) { out.segment(l * n(), n()) = forward_block(l, z); }
  return out;
}

ComplexSignal CdpSensing::adjoint(ComplexSignal const &c) const {
  require_same_length(c.size(), m(), "CdpSensing::adjoint");
  ComplexSignal out = ComplexSignal::Zero(n());
  for (Index l = 0; l < mask_count(); ++l) { out += adjoint_block(l, c.segment(l * n(), n())); }
  return out;
}

ComplexSignal CdpSensing::vector(Index i) const {
  if (i < 0 || i >= m()) { throw std::out_of_range("CdpSensing: sample index out of range"); }
  Index const l = i / n();
  Index const k = i % n();
  ComplexSignal a(n());
  for (Index j = 0; j < n(); ++j) {
    // conj(d_j) * exp(+2 pi i j k / n), exponent reduced mod n for accuracy.
    double const angle = 2.0 * std::numbers::pi * static_cast<double>((j * k) % n()) / static_cast<double>(n());
    a[j] = std::conj(masks_(l, j)) * std::polar(1.0, angle);
  }
  return a;
}

} // namespace itwf
