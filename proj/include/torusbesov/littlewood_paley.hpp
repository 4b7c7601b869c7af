#pragma once

// Dyadic (Littlewood-Paley) machinery on the torus: the bump profile chi and
// phi = chi(./2) - chi, the blocks Delta_j, the low cut-off S_j, nonhomogeneous
// Besov norms and the commutator [Delta_j, v] d_x f.

#include "torusbesov/offgrid.hpp"
#include "torusbesov/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace torusbesov {

/// Smooth radial cut-off: chi = 1 on |xi| <= 3/4, chi = 0 on |xi| >= 4/3,
/// with the classical exp(-1/t) mollifier ramp in between.
class BumpProfile {
public:
  static constexpr double inner = 3.0 / 4.0;
  static constexpr double outer = 4.0 / 3.0;

  static double chi(double xi) noexcept {
    const double t = (outer - std::abs(xi)) / (outer - inner);
    if (t <= 0.0)
      return 0.0;
    if (t >= 1.0)
      return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
  }

  static double phi(double xi) noexcept { return chi(0.5 * xi) - chi(xi); }

  /// Symbol of Delta_j: chi for j = -1, phi(2^{-j} .) for j >= 0, zero below.
  static double multiplier(int j, double xi) noexcept {
    if (j < -1)
      return 0.0;
    if (j == -1)
      return chi(xi);
    return chi(std::ldexp(xi, -(j + 1))) - chi(std::ldexp(xi, -j));
  }

  /// Symbol of S_j = sum_{k <= j-1} Delta_k, i.e. chi(2^{-j} .) for j >= 0.
  static double low_multiplier(int j, double xi) noexcept {
    if (j < 0)
      return 0.0;
    return chi(std::ldexp(xi, -j));
  }

  /// Integer range [lo, hi] of |xi| outside of which Delta_j vanishes.
  static std::pair<std::int64_t, std::int64_t> support(int j) noexcept {
    if (j < -1)
      return {1, 0};
    if (j == -1)
      return {0, 1};
    return {static_cast<std::int64_t>(std::floor(std::ldexp(inner, j))),
            static_cast<std::int64_t>(std::ceil(std::ldexp(2.0 * outer, j)))};
  }

  /// Upper edge 8/3 * 2^j of the annulus (4/3 for j = -1).
  static double upper_edge(int j) noexcept {
    return j == -1 ? outer : std::ldexp(2.0 * outer, j);
  }
};

/// Highest j whose annulus still meets the grid's wavenumbers.
inline int top_block(const TorusGrid& grid) {
  int j = 0;
  while (std::ldexp(BumpProfile::inner, j + 1) < static_cast<double>(grid.nyquist()))
    ++j;
  return j;
}

namespace detail {

// Relative size of the guard-band content |xi| > N/3 above which a function
// is considered to carry frequencies the grid cannot resolve.
inline constexpr double kGuardTolerance = 1e-13;

inline bool has_guard_content(const Spectrum& s) {
  const auto h = s.half();
  const auto kq = static_cast<std::size_t>(retained_max(s.grid(), DealiasRule::quadratic));
  double total = 0.0, guard = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double a = std::abs(h[k]);
    total = std::max(total, a);
    if (k > kq)
      guard = std::max(guard, a);
  }
  return guard > kGuardTolerance * total && guard > 0.0;
}

inline void check_block_resolved(const Spectrum& s, int j) {
  if (j < -1)
    return;
  if (BumpProfile::upper_edge(j) >= static_cast<double>(s.grid().nyquist()) &&
      has_guard_content(s))
    throw ResolutionError("block j=" + std::to_string(j) + " reaches the Nyquist wavenumber " +
                          std::to_string(s.grid().nyquist()) +
                          " of a function with near-Nyquist content (under-resolved grid)");
}

template <class Multiplier>
Spectrum masked(const Spectrum& s, std::int64_t lo, std::int64_t hi, Multiplier&& m) {
  Spectrum out(s.grid());
  const auto nyq = s.grid().nyquist();
  lo = std::max<std::int64_t>(lo, 0);
  hi = std::min<std::int64_t>(hi, nyq - 1);
  auto src = s.half();
  auto dst = out.half();
  for (std::int64_t k = lo; k <= hi; ++k) {
    const auto i = static_cast<std::size_t>(k);
    dst[i] = m(static_cast<double>(k)) * src[i];
  }
  return out;
}

inline bool block_is_zero(const Spectrum& s, int j) {
  if (j < -1)
    return true;
  auto [lo, hi] = BumpProfile::support(j);
  lo = std::max<std::int64_t>(lo, 0);
  hi = std::min<std::int64_t>(hi, s.grid().nyquist() - 1);
  const auto h = s.half();
  for (std::int64_t k = lo; k <= hi; ++k)
    if (h[static_cast<std::size_t>(k)] != cplx{} &&
        BumpProfile::multiplier(j, static_cast<double>(k)) != 0.0)
      return false;
  return true;
}

} // namespace detail

/// Spectrum of Delta_j f.
inline Spectrum block_spectrum(const Spectrum& s, int j) {
  detail::check_block_resolved(s, j);
  if (j < -1)
    return Spectrum(s.grid());
  auto [lo, hi] = BumpProfile::support(j);
  return detail::masked(s, lo, hi, [j](double xi) { return BumpProfile::multiplier(j, xi); });
}

inline GridFunction block(const Spectrum& s, int j) { return inverse(block_spectrum(s, j)); }

inline GridFunction block(const GridFunction& f, int j) { return block(transform(f), j); }

/// L^p norm of Delta_j f; zero blocks are detected from the spectrum without
/// a transform.
inline double block_norm(const Spectrum& s, int j, double p) {
  detail::check_block_resolved(s, j);
  if (detail::block_is_zero(s, j))
    return 0.0;
  return lp_norm(block(s, j), p);
}

/// Spectrum of Delta_j f moved to the smallest grid that still samples it at
/// least eight times per period of its top wavenumber.
inline Spectrum compact_block_spectrum(const Spectrum& s, int j) {
  detail::check_block_resolved(s, j);
  auto [lo, hi] = BumpProfile::support(j);
  hi = std::min<std::int64_t>(hi, s.grid().nyquist() - 1);
  const auto want = std::bit_ceil(static_cast<std::size_t>(std::max<std::int64_t>(8 * (hi + 1), 16)));
  const TorusGrid small(std::min(want, s.grid().size()));
  Spectrum out(small);
  if (j < -1)
    return out;
  const auto src = s.half();
  auto dst = out.half();
  for (std::int64_t k = std::max<std::int64_t>(lo, 0); k <= hi && k < small.nyquist(); ++k) {
    const auto i = static_cast<std::size_t>(k);
    dst[i] = BumpProfile::multiplier(j, static_cast<double>(k)) * src[i];
  }
  return out;
}

/// Continuous supremum of |Delta_j f| over the torus (not a grid maximum);
/// independent of the grid the spectrum lives on.
inline double block_peak(const Spectrum& s, int j) {
  if (detail::block_is_zero(s, j)) {
    detail::check_block_resolved(s, j);
    return 0.0;
  }
  return peak_norm(compact_block_spectrum(s, j));
}

/// S_j f through the symbol chi(2^{-j} xi); S_{-1} is the empty sum.
inline Spectrum low_cutoff_spectrum(const Spectrum& s, int j) {
  if (j < 0)
    return Spectrum(s.grid());
  detail::check_block_resolved(s, j - 1);
  const auto hi = static_cast<std::int64_t>(std::ceil(std::ldexp(BumpProfile::outer, j)));
  return detail::masked(s, 0, hi, [j](double xi) { return BumpProfile::low_multiplier(j, xi); });
}

inline GridFunction low_cutoff(const GridFunction& f, int j) {
  return inverse(low_cutoff_spectrum(transform(f), j));
}

struct BesovSpec {
  double s;
  double p;
  double r;

  BesovSpec(double s_, double p_, double r_) : s(s_), p(p_), r(r_) {
    if (!(p >= 1.0) || !(r >= 1.0))
      throw std::invalid_argument("BesovSpec: p and r must lie in [1, inf]");
  }
};

/// (sum_j 2^{s j r} ||Delta_j f||_{L^p}^r)^{1/r}, supremum for r = inf.
inline double besov_norm(const Spectrum& f, const BesovSpec& spec) {
  const int jtop = top_block(f.grid());
  double acc = 0.0;
  for (int j = -1; j <= jtop; ++j) {
    const double b = block_norm(f, j, spec.p);
    if (b == 0.0)
      continue;
    const double w = std::exp2(spec.s * j) * b;
    if (std::isinf(spec.r))
      acc = std::max(acc, w);
    else
      acc += std::pow(w, spec.r);
  }
  return std::isinf(spec.r) ? acc : std::pow(acc, 1.0 / spec.r);
}

inline double besov_norm(const GridFunction& f, const BesovSpec& spec) {
  return besov_norm(transform(f), spec);
}

/// The dyadic index window {j : n/8 <= j <= n/4} attached to the
/// construction parameter n.
class FrequencyBand {
public:
  explicit FrequencyBand(int n) : n_(n) {
    if (n < 8 || n % 8 != 0)
      throw std::invalid_argument("FrequencyBand: n must be a positive multiple of 8, got " +
                                  std::to_string(n));
  }

  int n() const noexcept { return n_; }
  int j_lo() const noexcept { return n_ / 8; }
  int j_hi() const noexcept { return n_ / 4; }
  int count() const noexcept { return j_hi() - j_lo() + 1; }
  bool contains(int j) const noexcept { return j >= j_lo() && j <= j_hi(); }

  void require_resolved(const TorusGrid& grid) const {
    if (BumpProfile::upper_edge(j_hi()) >= static_cast<double>(grid.nyquist()))
      throw ResolutionError("band up to j=" + std::to_string(j_hi()) +
                            " is not resolved on a grid of size " + std::to_string(grid.size()));
  }

private:
  int n_;
};

/// sum_{j in band} 2^{k j} ||Delta_j f||_{L^inf}, each block sup taken over
/// the continuum.
inline double restricted_norm(const Spectrum& f, int k, const FrequencyBand& band) {
  band.require_resolved(f.grid());
  double acc = 0.0;
  for (int j = band.j_lo(); j <= band.j_hi(); ++j)
    acc += std::exp2(k * j) * block_peak(f, j);
  return acc;
}

inline double restricted_norm(const GridFunction& f, int k, const FrequencyBand& band) {
  return restricted_norm(transform(f), k, band);
}

/// [Delta_j, v] d_x f = Delta_j(v d_x f) - v Delta_j d_x f, products under the
/// quadratic truncation rule.
inline GridFunction commutator(const GridFunction& v, const GridFunction& f, int j) {
  require_same_grid(v.grid(), f.grid(), "commutator");
  const Spectrum df = derivative(transform(f));
  const GridFunction dfx = inverse(df);
  const Spectrum prod = dealiased_product_spectrum({&v, &dfx}, DealiasRule::quadratic);
  GridFunction out = block(prod, j);
  out -= dealiased_product(v, block(df, j), DealiasRule::quadratic);
  return out;
}

/// The family {Delta_j f}, j = -1..top, with per-block L^p norms.
struct BlockDecomposition {
  int j_min = -1;
  std::vector<GridFunction> blocks;
  std::vector<double> norms;

  int j_max() const noexcept { return j_min + static_cast<int>(blocks.size()) - 1; }
  const GridFunction& operator[](int j) const { return blocks.at(static_cast<std::size_t>(j - j_min)); }
  double norm(int j) const { return norms.at(static_cast<std::size_t>(j - j_min)); }

  GridFunction reconstruct() const {
    GridFunction sum(blocks.front().grid());
    for (const auto& b : blocks)
      sum += b;
    return sum;
  }
};

inline BlockDecomposition decompose(const GridFunction& f, double p) {
  const Spectrum s = transform(f);
  BlockDecomposition d;
  for (int j = -1; j <= top_block(f.grid()); ++j) {
    d.blocks.push_back(block(s, j));
    d.norms.push_back(lp_norm(d.blocks.back(), p));
  }
  return d;
}

} // namespace torusbesov
