#pragma once

#include <Eigen/Core>

#include <complex>
#include <concepts>
#include <stdexcept>
#include <string>

#include "itwf/rng.hpp"

namespace itwf {

using Index = Eigen::Index;
using Real = double;
using Complex = std::complex<double>;

enum class Field { Real, Complex };

/// The two scalar fields a problem instance can live in. A problem is
/// instantiated for exactly one of them, so mixing fields does not compile.
template <typename T>
concept FieldScalar = std::same_as<T, Real> || std::same_as<T, Complex>;

template <FieldScalar T>
constexpr Field field_of() {
  return std::same_as<T, Real> ? Field::Real : Field::Complex;
}

std::string to_string(Field f);

/// Signal, iterate or sensing vector of length n.
template <FieldScalar T>
using Signal = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using RealSignal = Signal<Real>;
using ComplexSignal = Signal<Complex>;

/// Real vector of measurements, residuals or weights.
using RealVector = Eigen::VectorXd;

inline double conj_if_complex(double v) { return v; }
inline Complex conj_if_complex(Complex v) { return std::conj(v); }

/// Throws std::invalid_argument unless every entry is finite.
template <FieldScalar T>
void require_finite(Signal<T> const &z, char const *what) {
  if (!z.allFinite()) { throw std::invalid_argument(std::string(what) + ": non-finite entries"); }
}

inline void require_same_length(Index a, Index b, char const *what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                                std::to_string(b) + ")");
  }
}

/// Distance between z and x modulo a global phase:
/// min over phi of ||exp(-j phi) z - x||.
template <FieldScalar T>
double dist(Signal<T> const &z, Signal<T> const &x);

/// exp(-j phi*) z for the phase phi* attaining dist(z, x). When x^* z = 0 all
/// phases tie and z is returned unchanged.
template <FieldScalar T>
Signal<T> align_phase(Signal<T> const &z, Signal<T> const &x);

/// i.i.d. N(0,1) entries (real) or CN(0,1) entries with independent real and
/// imaginary parts of variance 1/2 (complex).
template <FieldScalar T>
Signal<T> gaussian_vector(RngStream &rng, Index n);

extern template double dist<Real>(RealSignal const &, RealSignal const &);
extern template double dist<Complex>(ComplexSignal const &, ComplexSignal const &);
extern template RealSignal align_phase<Real>(RealSignal const &, RealSignal const &);
extern template ComplexSignal align_phase<Complex>(ComplexSignal const &, ComplexSignal const &);
extern template RealSignal gaussian_vector<Real>(RngStream &, Index);
extern template ComplexSignal gaussian_vector<Complex>(RngStream &, Index);

} // namespace itwf
