#include <doctest.h>

#include <numbers>

#include "itwf/metrics.hpp"
#include "itwf/sensing.hpp"
#include "oracles.hpp"

using namespace itwf;
using namespace std::complex_literals;

TEST_CASE("measure_noiseless hand examples") {
  GaussianSensing<Real>::Matrix rows(1, 2);
  rows << 1.0, 1.0;
  GaussianSensing<Real> const model(rows);
  RealSignal x(2);
  x << 1.0, -1.0;
  CHECK(measure_noiseless(model, x)[0] == 0.0);
  x << 1.0, 1.0;
  CHECK(measure_noiseless(model, x)[0] == 4.0);

  RngStream rng(1, 1);
  auto const g = GaussianSensing<Complex>::generate(rng, 20, 5);
  MeasurementSet const y0 = measure_noiseless(g, ComplexSignal::Zero(5).eval());
  CHECK(y0.y().isZero(0.0));
  CHECK(y0.mean_y() == 0.0);
  CHECK_THROWS_AS(measure_noiseless(g, ComplexSignal::Zero(4).eval()), std::invalid_argument);
}

TEST_CASE("Gaussian inner, forward and adjoint agree with the explicit vectors") {
  RngStream rng(3, 3);
  auto const model = GaussianSensing<Complex>::generate(rng, 12, 4);
  ComplexSignal const z = gaussian_vector<Complex>(rng, 4);
  ComplexSignal const c = gaussian_vector<Complex>(rng, 12);
  ComplexSignal const fz = model.forward(z);
  ComplexSignal adj = ComplexSignal::Zero(4);
  for (Index i = 0; i < 12; ++i) {
    ComplexSignal const a = model.vector(i);
    CHECK(std::abs(model.inner(i, z) - oracle::inner(a, z)) < 1e-12);
    CHECK(std::abs(fz[i] - oracle::inner(a, z)) < 1e-12);
    adj += c[i] * a;
  }
  CHECK((model.adjoint(c) - adj).norm() < 1e-12);
  ComplexSignal w = z;
  model.axpy(2, 0.5i, w);
  CHECK((w - (z + 0.5i * model.vector(2))).norm() < 1e-15);
}

TEST_CASE("Gaussian model statistics") {
  RngStream rng(8, 0);
  auto const model = GaussianSensing<Complex>::generate(rng, 2000, 50);
  CHECK(std::abs(model.rows().cwiseAbs2().mean() - 1.0) < 0.02);
}

TEST_CASE("measurements are invariant under a global phase") {
  RngStream rng(4, 0);
  auto const model = GaussianSensing<Complex>::generate(rng, 30, 6);
  auto const cdp = CdpSensing::generate(rng, 6, 3);
  ComplexSignal const x = gaussian_vector<Complex>(rng, 6);
  RealVector const y = measure_noiseless(model, x).y();
  RealVector const yc = measure_noiseless(cdp, x).y();
  for (int k = 0; k < 50; ++k) {
    ComplexSignal const rx = std::polar(1.0, 2.0 * std::numbers::pi * k / 50.0) * x;
    CHECK((measure_noiseless(model, rx).y() - y).cwiseAbs().maxCoeff() <= 1e-12 * y.maxCoeff());
    CHECK((measure_noiseless(cdp, rx).y() - yc).cwiseAbs().maxCoeff() <= 1e-12 * yc.maxCoeff());
  }
}

TEST_CASE("mean_y concentrates around ||x||^2 for m >= 50 n") {
  int within = 0;
  int const seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    RngStream rng(static_cast<std::uint64_t>(s), 77);
    RealSignal x = gaussian_vector<Real>(rng, 100);
    auto const model = GaussianSensing<Real>::generate(rng, 5000, 100);
    double const energy = x.squaredNorm();
    within += std::abs(measure_noiseless(model, x).mean_y() - energy) <= 0.1 * energy;
  }
  CHECK(within >= 99);
}

TEST_CASE("MeasurementSet validates its input") {
  RealVector y(3);
  y << 1.0, 2.0, 3.0;
  MeasurementSet const set(y, NoiseModel::Noiseless);
  CHECK(set.mean_y() == 2.0);
  CHECK(set.model() == NoiseModel::Noiseless);
  RealVector neg(2);
  neg << 1.0, -0.5;
  CHECK_THROWS_AS(MeasurementSet(neg, NoiseModel::Noiseless), std::invalid_argument);
  CHECK_THROWS_AS(MeasurementSet(neg, NoiseModel::Poisson), std::invalid_argument);
  CHECK_NOTHROW(MeasurementSet(neg, NoiseModel::Additive));
  RealVector bad(1);
  bad << NAN;
  CHECK_THROWS_AS(MeasurementSet(bad, NoiseModel::Additive), std::invalid_argument);
}

TEST_CASE("add_bounded_noise") {
  RealVector y(4);
  y << 1.0, 4.0, 0.0, 2.5;
  MeasurementSet const set(y, NoiseModel::Noiseless);
  MeasurementSet const same = add_bounded_noise(set, RealVector::Zero(4));
  CHECK(same.y() == set.y());
  CHECK(same.model() == NoiseModel::Additive);
  MeasurementSet const shifted = add_bounded_noise(set, RealVector::Constant(4, 0.25));
  CHECK(shifted.mean_y() == set.mean_y() + 0.25);
  RealVector eta(4);
  eta << 0.1, -2.0, 0.3, 0.0;
  MeasurementSet const noisy = add_bounded_noise(set, eta);
  CHECK(noisy[1] == 2.0);
  CHECK((noisy.y() - set.y()).cwiseAbs().maxCoeff() == 2.0);
  RealVector negative(4);
  negative << -2.0, 0.0, 0.0, 0.0;
  CHECK(add_bounded_noise(set, negative)[0] == -1.0);  // recorded, not clamped
  CHECK_THROWS_AS(add_bounded_noise(set, RealVector::Zero(3)), std::invalid_argument);
}

TEST_CASE("poissonize moments and edge cases") {
  RealVector rates = RealVector::Constant(100000, 100.0);
  RngStream rng(9, 9);
  MeasurementSet const draws = poissonize(MeasurementSet(rates, NoiseModel::Noiseless), rng);
  double const mean = draws.mean_y();
  double const var = (draws.y().array() - mean).square().sum() / (draws.size() - 1);
  CHECK(mean > 99.0);
  CHECK(mean < 101.0);
  CHECK(var > 95.0);
  CHECK(var < 105.0);
  CHECK(draws.model() == NoiseModel::Poisson);
  CHECK((draws.y().array() == draws.y().array().round()).all());

  // Small rates go through exact inversion.
  RealVector small = RealVector::Constant(100000, 3.5);
  MeasurementSet const s = poissonize(MeasurementSet(small, NoiseModel::Noiseless), rng);
  double const sm = s.mean_y();
  CHECK(std::abs(sm - 3.5) < 0.03);
  CHECK(std::abs((s.y().array() - sm).square().sum() / (s.size() - 1) - 3.5) < 0.1);

  MeasurementSet const zeros = poissonize(MeasurementSet(RealVector::Zero(1000), NoiseModel::Noiseless), rng);
  CHECK(zeros.y().isZero(0.0));

  RngStream a(5, 1), b(5, 1);
  RealVector r(50);
  r.setLinSpaced(0.0, 60.0);
  MeasurementSet const in(r, NoiseModel::Noiseless);
  CHECK(poissonize(in, a).y() == poissonize(in, b).y());

  RealVector neg(1);
  neg << -1.0;
  CHECK_THROWS_AS(poissonize(MeasurementSet(neg, NoiseModel::Additive), a), std::invalid_argument);
}

TEST_CASE("CDP impulse through an all-ones mask") {
  Eigen::MatrixXcd masks = Eigen::MatrixXcd::Ones(1, 4);
  CdpSensing const model(masks);
  ComplexSignal x = ComplexSignal::Zero(4);
  x[0] = 1.0;
  RealVector const y = measure_noiseless(model, x).y();
  CHECK((y - RealVector::Ones(4)).cwiseAbs().maxCoeff() < 1e-15);

  // The same via a direct O(n^2) DFT-matrix multiply.
  Eigen::MatrixXcd const a = oracle::cdp_dense_vectors(masks);
  for (Index i = 0; i < 4; ++i) { CHECK(std::abs(std::norm(oracle::inner<ComplexSignal>(a.col(i), x)) - y[i]) < 1e-15); }
}

TEST_CASE("CDP masks are validated") {
  Eigen::MatrixXcd masks(2, 3);
  masks << 1.0, -1.0, 1i, -1i, 1.0, 1.0;
  CHECK_NOTHROW(CdpSensing{masks});
  masks(1, 2) = std::polar(1.0, 0.5);
  CHECK_THROWS_AS(CdpSensing{masks}, std::invalid_argument);
  masks(1, 2) = 2.0;
  CHECK_THROWS_AS(CdpSensing{masks}, std::invalid_argument);

  RngStream rng(6, 0);
  auto const model = CdpSensing::generate(rng, 64, 12);
  CHECK(model.m() == 64 * 12);
  CHECK(model.mask_count() == 12);
  std::array<int, 4> counts{};
  for (Index l = 0; l < 12; ++l) {
    for (Index k = 0; k < 64; ++k) {
      Complex const v = model.masks()(l, k);
      counts[v == 1.0 ? 0 : v == -1.0 ? 1 : v == 1i ? 2 : 3]++;
    }
  }
  for (int c : counts) { CHECK(c > 120); }
}

TEST_CASE("CDP operator matches the dense DFT-row oracle") {
  for (Index n : {4, 8, 16}) {
    RngStream rng(10, static_cast<std::uint64_t>(n));
    auto const model = CdpSensing::generate(rng, n, 3);
    Eigen::MatrixXcd const a = oracle::cdp_dense_vectors(model.masks());
    ComplexSignal const z = gaussian_vector<Complex>(rng, n);
    ComplexSignal const c = gaussian_vector<Complex>(rng, model.m());

    ComplexSignal const fz = model.forward(z);
    RealVector const y = measure_noiseless(model, z).y();
    ComplexSignal dense_adj = ComplexSignal::Zero(n);
    for (Index i = 0; i < model.m(); ++i) {
      Complex const u = oracle::inner<ComplexSignal>(a.col(i), z);
      CHECK(std::abs(fz[i] - u) < 1e-10);
      CHECK(std::abs(y[i] - std::norm(u)) < 1e-10);
      CHECK(std::abs(model.inner(i, z) - u) < 1e-10);
      CHECK((model.vector(i) - a.col(i)).norm() < 1e-12);
      dense_adj += c[i] * a.col(i);
    }
    CHECK((model.adjoint(c) - dense_adj).cwiseAbs().maxCoeff() < 1e-10);

    for (Index l = 0; l < 3; ++l) {
      ComplexSignal const block = model.forward_block(l, z);
      CHECK((block - fz.segment(l * n, n)).cwiseAbs().maxCoeff() < 1e-10);
      ComplexSignal const cb = c.segment(l * n, n);
      ComplexSignal const dense_block = a.middleCols(l * n, n) * cb;
      CHECK((model.adjoint_block(l, cb) - dense_block).cwiseAbs().maxCoeff() < 1e-10);
    }
    ComplexSignal w = z;
    model.axpy(5, 2.0 - 1i, w);
    CHECK((w - (z + (2.0 - 1i) * a.col(5))).norm() < 1e-12);
  }
}

TEST_CASE("CDP adjoint dot-product identity") {
  RngStream rng(12, 0);
  for (Index n : {4, 8, 16, 100}) {
    auto const model = CdpSensing::generate(rng, n, 5);
    for (int t = 0; t < 5; ++t) {
      ComplexSignal const z = gaussian_vector<Complex>(rng, n);
      ComplexSignal const c = gaussian_vector<Complex>(rng, model.m());
      Complex const lhs = c.dot(model.forward(z));   // <forward(z), c> as c^* F z
      Complex const rhs = model.adjoint(c).dot(z);   // <z, adjoint(c)>
      CHECK(std::abs(lhs - rhs) <= 1e-10 * z.norm() * c.norm());
      for (Index l = 0; l < 5; ++l) {
        ComplexSignal const cb = c.segment(l * n, n);
        Complex const bl = cb.dot(model.forward_block(l, z));
        Complex const br = model.adjoint_block(l, cb).dot(z);
        CHECK(std::abs(bl - br) <= 1e-10 * z.norm() * cb.norm());
      }
    }
  }
}

TEST_CASE("CDP block helpers reject bad input") {
  RngStream rng(13, 0);
  auto const model = CdpSensing::generate(rng, 8, 2);
  CHECK(model.forward_block(1, ComplexSignal::Zero(8).eval()).isZero(0.0));
  CHECK_THROWS_AS(model.forward_block(2, ComplexSignal::Zero(8).eval()), std::out_of_range);
  CHECK_THROWS_AS(model.forward_block(-1, ComplexSignal::Zero(8).eval()), std::out_of_range);
  CHECK_THROWS_AS(model.forward(ComplexSignal::Zero(7).eval()), std::invalid_argument);
}

TEST_CASE("relative_rmse examples") {
  RealSignal x(3);
  x << 1.0, 2.0, -2.0;
  CHECK(relative_rmse(x, x) == 0.0);
  CHECK(relative_rmse(RealSignal::Zero(3).eval(), x) == 1.0);
  RealSignal const minus_x = -x;
  CHECK(relative_rmse(minus_x, x) == 0.0);
  CHECK_THROWS_AS(relative_rmse(x, RealSignal::Zero(3).eval()), std::invalid_argument);
}

TEST_CASE("empirical_snr") {
  GaussianSensing<Real>::Matrix rows(1, 2);
  rows << 1.0, 2.0;
  GaussianSensing<Real> const single(rows);
  RealSignal x(2);
  x << 1.0, 1.0;
  RealVector eta(1);
  eta << 3.0;
  CHECK(empirical_snr(single, x, eta) == doctest::Approx(81.0 / 9.0));
  CHECK(empirical_snr(single, x, (2.0 * eta).eval()) == doctest::Approx(81.0 / 36.0));
  CHECK_THROWS_AS(empirical_snr(single, x, RealVector::Zero(1).eval()), std::invalid_argument);

  RngStream rng(14, 0);
  Index const m = 100000;
  auto const model = GaussianSensing<Real>::generate(rng, m, 10);
  RealSignal u = gaussian_vector<Real>(rng, 10);
  u.normalize();
  RealVector noise(m);
  for (Index i = 0; i < m; ++i) { noise[i] = rng.normal(); }
  double const snr = empirical_snr(model, u, noise);
  double const ratio = snr / (static_cast<double>(m) / noise.squaredNorm());
  CHECK(ratio > 2.8);
  CHECK(ratio < 3.2);
}
