#include "itwf/core.hpp"

#include <cmath>

namespace itwf {

std::string to_string(Field f) { return f == Field::Real ? "real" : "complex"; }

namespace {

// Unit-modulus factor u minimizing ||u z - x||; u = 1 on ties.
Real best_phase(RealSignal const &z, RealSignal const &x) { return x.dot(z) < 0.0 ? -1.0 : 1.0; }

Complex best_phase(ComplexSignal const &z, ComplexSignal const &x) {
  Complex const inner = x.dot(z); // x^* z
  double const magnitude = std::abs(inner);
  if (magnitude == 0.0) { return Complex(1.0, 0.0); }
  return std::conj(inner) / magnitude;
}

} // namespace

template <FieldScalar T>
double dist(Signal<T> const &z, Signal<T> const &x) {
  require_same_length(z.size(), x.size(), "dist");
  require_finite(z, "dist");
  require_finite(x, "dist");
  return (best_phase(z, x) * z - x).norm();
}

template <FieldScalar T>
Signal<T> align_phase(Signal<T> const &z, Signal<T> const &x) {
  require_same_length(z.size(), x.size(), "align_phase");
  require_finite(z, "align_phase");
  require_finite(x, "align_phase");
  return best_phase(z, x) * z;
}

template <FieldScalar T>
Signal<T> gaussian_vector(RngStream &rng, Index n) {
  if (n < 1) { throw std::invalid_argument("gaussian_vector: n must be >= 1"); }
  Signal<T> v(n);
  if constexpr (std::same_as<T, Real>) {
    for (Index i = 0; i < n; ++i) { v[i] = rng.normal(); }
  } else {
    double const s = std::sqrt(0.5);
    for (Index i = 0; i < n; ++i) {
      double const re = rng.normal();
      double const im = rng.normal();
      v[i] = Complex(s * re, s * im);
    }
  }
  return v;
}

template double dist<Real>(RealSignal const &, RealSignal const &);
template double dist<Complex>(ComplexSignal const &, ComplexSignal const &);
template RealSignal align_phase<Real>(RealSignal const &, RealSignal const &);
template ComplexSignal align_phase<Complex>(ComplexSignal const &, ComplexSignal const &);
template RealSignal gaussian_vector<Real>(RngStream &, Index);
template ComplexSignal gaussian_vector<Complex>(RngStream &, Index);

} // namespace itwf
