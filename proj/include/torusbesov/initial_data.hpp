#pragma once

// The square wave h, its low-frequency part f_n = S_{n/2} h and the two
// families of norm-inflation data
//   u0 = 2^{-n} n^{-2/5} log n cos(2^n x) (1 + n^{-1/5} f_n)           (CH)
//   v0 = 2^{-n} n^{-1/4} log n cos(2^n x) (1 + n^{-1/4} f_n) + n^{-1/4} (Novikov)
// All data are assembled on the Fourier side; h itself is never sampled.

#include "torusbesov/littlewood_paley.hpp"
#include "torusbesov/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace torusbesov {

enum class Equation { ch, novikov };

inline const char* equation_name(Equation e) { return e == Equation::ch ? "ch" : "novikov"; }

/// h = (2/pi) sum_k sin((2k-1) x) / (2k-1): +1/2 on (0, pi), -1/2 on (pi, 2pi).
class SquareWave {
public:
  explicit SquareWave(std::int64_t cutoff) : cutoff_(cutoff) {
    if (cutoff < 1)
      throw std::invalid_argument("SquareWave: cutoff must be >= 1");
  }

  /// h_hat(xi) = -2i/xi for odd xi, 0 for even xi.
  static cplx exact(std::int64_t xi) noexcept {
    if (xi % 2 == 0)
      return {};
    return {0.0, -2.0 / static_cast<double>(xi)};
  }

  std::int64_t cutoff() const noexcept { return cutoff_; }

  cplx operator()(std::int64_t xi) const noexcept {
    return (xi > cutoff_ || xi < -cutoff_) ? cplx{} : exact(xi);
  }

  /// Coefficients for xi = -cutoff..cutoff.
  std::vector<cplx> coefficients() const {
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(2 * cutoff_ + 1));
    for (std::int64_t xi = -cutoff_; xi <= cutoff_; ++xi)
      out.push_back(exact(xi));
    return out;
  }

  /// Spectrum of h truncated to |xi| < N/2 on `grid`.
  Spectrum on(const TorusGrid& grid) const {
    Spectrum s(grid);
    auto h = s.half();
    const auto top = std::min<std::int64_t>(cutoff_, grid.nyquist() - 1);
    for (std::int64_t xi = 1; xi <= top; xi += 2)
      h[static_cast<std::size_t>(xi)] = exact(xi);
    return s;
  }

private:
  std::int64_t cutoff_;
};

inline SquareWave square_wave_spectrum(std::int64_t cutoff) { return SquareWave(cutoff); }

/// Smallest grid on which Delta_j h is sampled at least eight times per
/// period of its top wavenumber.
inline TorusGrid square_wave_block_grid(int j) {
  const auto hi = BumpProfile::support(j).second;
  return TorusGrid(std::bit_ceil(static_cast<std::size_t>(std::max<std::int64_t>(8 * (hi + 1), 16))));
}

/// Delta_j h through the multiplier applied to the exact coefficients.
inline GridFunction square_wave_block(int j, const TorusGrid& grid) {
  const auto hi = BumpProfile::support(j).second;
  return block(SquareWave(std::max<std::int64_t>(hi, 1)).on(grid), j);
}

/// Delta_j h by direct summation of
///   (2/pi) sum_k phi_j(2k-1) sin((2k-1) x) / (2k-1).
inline GridFunction square_wave_block_direct(int j, const TorusGrid& grid) {
  auto [lo, hi] = BumpProfile::support(j);
  std::vector<std::pair<double, double>> terms;
  for (std::int64_t xi = std::max<std::int64_t>(lo, 1) | 1; xi <= hi; xi += 2) {
    const double w = BumpProfile::multiplier(j, static_cast<double>(xi));
    if (w != 0.0)
      terms.emplace_back(static_cast<double>(xi), w / static_cast<double>(xi));
  }
  return GridFunction::sample(grid, [&](double x) {
    double acc = 0.0;
    for (auto [xi, c] : terms)
      acc += c * std::sin(xi * x);
    return 2.0 / kPi * acc;
  });
}

/// sup |Delta_j h| over the torus.
inline double square_wave_block_norm(int j) {
  const TorusGrid grid = square_wave_block_grid(j);
  const auto hi = BumpProfile::support(j).second;
  return block_peak(SquareWave(std::max<std::int64_t>(hi, 1)).on(grid), j);
}

namespace detail {

inline void require_construction_n(int n) {
  if (n < 8 || n % 8 != 0)
    throw std::invalid_argument("n must be a positive multiple of 8, got " + std::to_string(n));
}

inline void require_datum_grid(int n, const TorusGrid& grid) {
  require_construction_n(n);
  if (grid.exponent() < n + 3)
    throw ResolutionError("n=" + std::to_string(n) + " needs a grid of at least 2^" +
                          std::to_string(n + 3) + " points, got " + std::to_string(grid.size()));
}

} // namespace detail

/// Largest |xi| where chi(2^{-n/2} xi) h_hat(xi) can be nonzero.
inline std::int64_t fn_cutoff(int n) {
  detail::require_construction_n(n);
  return static_cast<std::int64_t>(std::ceil(std::ldexp(BumpProfile::outer, n / 2)));
}

/// Coefficients of f_n for xi = 0..fn_cutoff(n); negative xi by conjugation.
inline std::vector<cplx> fn_coefficients(int n) {
  const auto k = fn_cutoff(n);
  std::vector<cplx> c(static_cast<std::size_t>(k + 1));
  for (std::int64_t xi = 1; xi <= k; xi += 2)
    c[static_cast<std::size_t>(xi)] =
        BumpProfile::low_multiplier(n / 2, static_cast<double>(xi)) * SquareWave::exact(xi);
  return c;
}

inline Spectrum fn_spectrum(int n, const TorusGrid& grid) {
  const auto c = fn_coefficients(n);
  if (static_cast<std::int64_t>(c.size()) > grid.nyquist())
    throw ResolutionError("f_n with n=" + std::to_string(n) + " is not resolved on a grid of size " +
                          std::to_string(grid.size()));
  Spectrum s(grid);
  std::copy(c.begin(), c.end(), s.half().begin());
  return s;
}

/// f_n = S_{n/2} h sampled on `grid`.
inline GridFunction f_n(int n, const TorusGrid& grid) { return inverse(fn_spectrum(n, grid)); }

/// Parameters of A cos(2^n x) (1 + eps g) + c with g = f_n.
struct DatumShape {
  int n;
  double amplitude;
  double modulation;
  double shift;
};

inline DatumShape datum_shape(int n, Equation eq) {
  detail::require_construction_n(n);
  const double dn = n, logn = std::log(dn);
  if (eq == Equation::ch)
    return {n, std::ldexp(std::pow(dn, -0.4) * logn, -n), std::pow(dn, -0.2), 0.0};
  const double q = std::pow(dn, -0.25);
  return {n, std::ldexp(q * logn, -n), q, q};
}

/// Spectrum of A cos(Mx)(1 + eps g) + c with M = 2^n, where g is given by its
/// coefficients for xi = 0..K (K < M). The modulation shifts g_hat by +-M.
inline Spectrum assemble_datum(const TorusGrid& grid, const DatumShape& shape,
                               const std::vector<cplx>& g) {
  detail::require_datum_grid(shape.n, grid);
  const auto m = std::int64_t{1} << shape.n;
  const auto k = static_cast<std::int64_t>(g.size()) - 1;
  if (k >= m || m + k >= grid.nyquist())
    throw ResolutionError("modulated datum exceeds the grid Nyquist wavenumber");
  Spectrum s(grid);
  auto h = s.half();
  const double a = shape.amplitude, half_eps = 0.5 * shape.modulation;
  for (std::int64_t d = -k; d <= k; ++d) {
    const cplx gd = d >= 0 ? g[static_cast<std::size_t>(d)] : std::conj(g[static_cast<std::size_t>(-d)]);
    h[static_cast<std::size_t>(m + d)] += a * half_eps * gd;
  }
  h[static_cast<std::size_t>(m)] += a * kPi;
  h[0] += kTwoPi * shape.shift;
  return s;
}

/// A constructed initial datum together with its bookkeeping.
struct InflationDatum {
  int n;
  Equation equation;
  FrequencyBand band;
  DatumShape shape;
  Spectrum spectrum;
  GridFunction samples;
};

inline InflationDatum make_datum(int n, Equation eq, const TorusGrid& grid) {
  const DatumShape shape = datum_shape(n, eq);
  Spectrum s = assemble_datum(grid, shape, fn_coefficients(n));
  GridFunction u = inverse(s);
  return {n, eq, FrequencyBand(n), shape, std::move(s), std::move(u)};
}

inline InflationDatum ch_datum(int n, const TorusGrid& grid) { return make_datum(n, Equation::ch, grid); }

inline InflationDatum novikov_datum(int n, const TorusGrid& grid) {
  return make_datum(n, Equation::novikov, grid);
}

/// Closed form of d/dx [A cos(Mx)(1 + eps f_n) + c]:
///   -A M [sin(Mx)(1 + eps f_n) - M^{-1} eps cos(Mx) d_x f_n].
/// The phase m M mod N is reduced exactly, so no large arguments reach sin/cos.
inline GridFunction datum_derivative(const TorusGrid& grid, const DatumShape& shape,
                                     bool with_fn = true) {
  detail::require_datum_grid(shape.n, grid);
  const auto big_n = grid.size();
  const auto m = std::size_t{1} << shape.n;
  const double am = std::ldexp(shape.amplitude, shape.n);
  const double eps = with_fn ? shape.modulation : 0.0;

  GridFunction out(grid);
  auto d = out.samples();
  if (with_fn) {
    // d_x f_n goes into the output buffer first, f_n into a scratch buffer.
    Spectrum fs = fn_spectrum(shape.n, grid);
    GridFunction fx = inverse(derivative(fs));
    GridFunction fv = inverse(std::move(fs));
    const double inv_m = std::ldexp(1.0, -shape.n);
    for (std::size_t i = 0; i < big_n; ++i) {
      const double theta = kTwoPi * static_cast<double>((i * m) % big_n) / static_cast<double>(big_n);
      d[i] = -am * (std::sin(theta) * (1.0 + eps * fv[i]) - inv_m * eps * std::cos(theta) * fx[i]);
    }
  } else {
    for (std::size_t i = 0; i < big_n; ++i) {
      const double theta = kTwoPi * static_cast<double>((i * m) % big_n) / static_cast<double>(big_n);
      d[i] = -am * std::sin(theta);
    }
  }
  return out;
}

inline GridFunction ch_datum_derivative(int n, const TorusGrid& grid) {
  return datum_derivative(grid, datum_shape(n, Equation::ch));
}

inline GridFunction novikov_datum_derivative(int n, const TorusGrid& grid) {
  return datum_derivative(grid, datum_shape(n, Equation::novikov));
}

/// Spectrum of the truncated (d_x u0)^2 (quadratic rule), consuming the derivative.
inline Spectrum squared_slope_spectrum(GridFunction&& ux) {
  for (auto& v : ux.samples())
    v *= v;
  Spectrum s = transform(std::move(ux));
  truncate(s, DealiasRule::quadratic);
  return s;
}

/// Spectrum of the truncated v0 (d_x v0)^2 (cubic rule), consuming the derivative.
inline Spectrum weighted_squared_slope_spectrum(const GridFunction& v, GridFunction&& vx) {
  require_same_grid(v.grid(), vx.grid(), "weighted_squared_slope_spectrum");
  auto a = vx.samples();
  auto b = v.samples();
  for (std::size_t i = 0; i < a.size(); ++i)
    a[i] = b[i] * a[i] * a[i];
  Spectrum s = transform(std::move(vx));
  truncate(s, DealiasRule::cubic);
  return s;
}

/// ||(d_x u0)^2|| over the band, the lower-bounded quantity for CH data.
inline double lemma_e2_quantity(const InflationDatum& datum) {
  if (datum.equation != Equation::ch)
    throw std::invalid_argument("lemma_e2_quantity: CH datum required");
  return restricted_norm(squared_slope_spectrum(inverse(derivative(datum.spectrum))), 0, datum.band);
}

/// ||v0 (d_x v0)^2|| over the band, the Novikov analogue.
inline double novikov_e2_quantity(const InflationDatum& datum) {
  if (datum.equation != Equation::novikov)
    throw std::invalid_argument("novikov_e2_quantity: Novikov datum required");
  return restricted_norm(
      weighted_squared_slope_spectrum(datum.samples, inverse(derivative(datum.spectrum))), 0,
      datum.band);
}

/// Spectrum of sin(Mx) g (or cos(Mx) g) on `grid`, given g's coefficients for
/// xi = 0..K with M > K.
inline Spectrum modulated_spectrum(const TorusGrid& grid, std::int64_t m,
                                   const std::vector<cplx>& g, bool sine) {
  const auto k = static_cast<std::int64_t>(g.size()) - 1;
  if (k >= m || m + k >= grid.nyquist())
    throw ResolutionError("modulated spectrum exceeds the grid Nyquist wavenumber");
  Spectrum s(grid);
  auto h = s.half();
  // cos: (g(xi - M) + g(xi + M)) / 2, sin: (g(xi - M) - g(xi + M)) / (2i); for
  // xi >= 0 only the first shift lands on the half spectrum.
  const cplx factor = sine ? cplx(0.0, -0.5) : cplx(0.5, 0.0);
  for (std::int64_t d = -k; d <= k; ++d) {
    const cplx gd = d >= 0 ? g[static_cast<std::size_t>(d)] : std::conj(g[static_cast<std::size_t>(-d)]);
    h[static_cast<std::size_t>(m + d)] += factor * gd;
  }
  return s;
}

/// The mixed term 2^{-n} n^{-1/5} sin(2^{n+1} x) d_x f_n (1 + n^{-1/5} f_n) of
/// the (d_x u0)^2 expansion, built exactly on the Fourier side.
inline Spectrum mixed_term_spectrum(int n, const TorusGrid& grid) {
  detail::require_datum_grid(n, grid);
  const double eps = std::pow(static_cast<double>(n), -0.2);
  // g = d_x f_n (1 + eps f_n) lives on |xi| <= 2K; form it on a compact grid.
  const auto k = fn_cutoff(n);
  const TorusGrid small(std::bit_ceil(static_cast<std::size_t>(8 * (k + 1))));
  const Spectrum fs = fn_spectrum(n, small);
  const GridFunction fv = inverse(fs);
  const GridFunction fx = inverse(derivative(fs));
  GridFunction g(small);
  for (std::size_t i = 0; i < small.size(); ++i)
    g[i] = std::ldexp(eps, -n) * fx[i] * (1.0 + eps * fv[i]);
  const Spectrum gs = transform(std::move(g));
  std::vector<cplx> coeffs(gs.half().begin(), gs.half().begin() + 2 * k + 1);
  return modulated_spectrum(grid, std::int64_t{1} << (n + 1), coeffs, true);
}

} // namespace torusbesov
