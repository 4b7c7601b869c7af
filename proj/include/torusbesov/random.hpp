#pragma once

// Seeded draws that are identical on every platform: the standard engines
// are specified bit for bit, the standard distributions are not, so the
// mapping to doubles is done here.

#include "torusbesov/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace torusbesov {

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal by Box-Muller.
  double normal() {
    if (spare_) {
      spare_ = false;
      return cached_;
    }
    double u = 0.0;
    while (u == 0.0)
      u = uniform();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    cached_ = r * std::sin(kTwoPi * v);
    spare_ = true;
    return r * std::cos(kTwoPi * v);
  }

  std::uint64_t bits() { return engine_(); }

private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool spare_ = false;
};

/// Real random trigonometric polynomial with modes 0..kmax: Gaussian
/// coefficients scaled by (1 + |xi|)^{-decay}.
inline Spectrum random_band_limited(const TorusGrid& grid, std::int64_t kmax, Rng& rng,
                                    double decay = 0.0) {
  if (kmax >= grid.nyquist())
    throw ResolutionError("random_band_limited: kmax must stay below the Nyquist wavenumber");
  Spectrum s(grid);
  auto h = s.half();
  h[0] = rng.normal() * kTwoPi;
  for (std::int64_t k = 1; k <= kmax; ++k) {
    const double w = std::pow(1.0 + static_cast<double>(k), -decay) * kPi;
    const double re = rng.normal(), im = rng.normal();
    h[static_cast<std::size_t>(k)] = w * cplx(re, im);
  }
  return s;
}

} // namespace torusbesov
