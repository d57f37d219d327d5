#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>

namespace bergman {

using cplx = std::complex<double>;

/// SplitMix64 generator. Fully portable: identical streams on every
/// platform, unlike the distributions in <random>.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Area-uniform point in the disc of radius r_max.
  cplx disc_point(double r_max) {
    const double r = r_max * std::sqrt(uniform());
    const double t = 2.0 * std::numbers::pi * uniform();
    return {r * std::cos(t), r * std::sin(t)};
  }

  /// Random sign +-1.
  double sign() { return (next_u64() & 1u) ? 1.0 : -1.0; }

  /// Derive an independent stream for a named sub-task.
  Rng fork(std::uint64_t salt) const {
    Rng r(state_ ^ (0xD6E8FEB86659FD93ull * (salt + 1)));
    r.next_u64();
    return r;
  }

 private:
  std::uint64_t state_;
};

/// Radical-inverse (van der Corput) value of index i in the given base.
inline double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double v = 0.0;
  while (i > 0) {
    v += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return v;
}

/// Halton point in [0,1)^2 (bases 2 and 3).
inline std::pair<double, double> halton2(std::uint64_t i) {
  return {radical_inverse(i, 2), radical_inverse(i, 3)};
}

/// Low-discrepancy area-uniform point in the disc of radius r_max.
inline cplx halton_disc_point(std::uint64_t i, double r_max) {
  const auto [u, v] = halton2(i + 1);
  const double r = r_max * std::sqrt(u);
  const double t = 2.0 * std::numbers::pi * v;
  return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace bergman
