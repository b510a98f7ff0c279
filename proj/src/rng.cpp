#include "itwf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace itwf {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t &hi, std::uint64_t &lo) {
  unsigned __int128 const p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

constexpr double kPoissonNormalCutover = 30.0;

} // namespace

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> c, std::array<std::uint64_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

void RngStream::refill() {
  for (auto &word : counter_) {
    if (++word != 0) { break; }
  }
  block_ = philox4x64(counter_, {seed_, stream_id_});
  used_ = 0;
}

RngStream::result_type RngStream::operator()() {
  if (used_ == 4) { refill(); }
  return block_[used_++];
}

double RngStream::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double RngStream::uniform_pos() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double const radius = std::sqrt(-2.0 * std::log(uniform_pos()));
  double const angle = 2.0 * std::numbers::pi * uniform();
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t RngStream::below(std::uint64_t bound) {
  if (bound == 0) { throw std::invalid_argument("RngStream::below: bound must be positive"); }
  // Lemire's multiply-shift with rejection; unbiased.
  unsigned __int128 product = static_cast<unsigned __int128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    std::uint64_t const threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

double RngStream::poisson(double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("RngStream::poisson: rate must be finite and nonnegative");
  }
  if (rate == 0.0) { return 0.0; }
  if (rate < kPoissonNormalCutover) {
    double const u = uniform();
    double p = std::exp(-rate);
    double cdf = p;
    double k = 0.0;
    while (u >= cdf) {
      k += 1.0;
      p *= rate / k;
      double const next = cdf + p;
      if (next == cdf) { break; }
      cdf = next;
    }
    return k;
  }
  return std::max(0.0, std::round(rate + std::sqrt(rate) * normal()));
}

} // namespace itwf
