#pragma once

// Periodic Fourier analysis on a uniform grid of the torus R/2piZ.
//
// Convention: u_hat(xi) = int_T e^{-i x xi} u(x) dx, realized by the
// quadrature (2pi/N) sum_m u(x_m) e^{-i x_m xi}; the inverse carries 1/(2pi).
// With this normalization cos(lambda x) has coefficients pi at xi = +-lambda.
//
// Only real functions are represented, so a Spectrum stores the half
// spectrum xi = 0..N/2; index N/2 holds the coefficient of xi = -N/2
// (the Nyquist mode), which is real for a real function.

#include "torusbesov/fft.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace torusbesov {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Thrown when a grid cannot represent the frequencies an operation needs.
class ResolutionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class TorusGrid {
public:
  explicit TorusGrid(std::size_t n) : n_(n) {
    if (n < 16 || (n & (n - 1)) != 0)
      throw std::invalid_argument("TorusGrid: size must be a power of two >= 16, got " +
                                  std::to_string(n));
  }

  static TorusGrid with_exponent(int e) { return TorusGrid(std::size_t{1} << e); }

  std::size_t size() const noexcept { return n_; }
  /// Largest representable |xi| (the Nyquist wavenumber N/2).
  std::int64_t nyquist() const noexcept { return static_cast<std::int64_t>(n_ / 2); }
  double spacing() const noexcept { return kTwoPi / static_cast<double>(n_); }
  double point(std::size_t m) const noexcept {
    return kTwoPi * static_cast<double>(m) / static_cast<double>(n_);
  }
  int exponent() const noexcept { return std::countr_zero(n_); }

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

private:
  std::size_t n_;
};

inline void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* what) {
  if (!(a == b))
    throw std::invalid_argument(std::string(what) + ": operands live on different grids");
}

class Spectrum;

class GridFunction {
public:
  explicit GridFunction(TorusGrid grid) : grid_(grid), buf_(grid.size()) {}

  GridFunction(TorusGrid grid, std::span<const double> samples)
      : grid_(grid), buf_(grid.size()) {
    if (samples.size() != grid.size())
      throw std::invalid_argument("GridFunction: sample count does not match grid size");
    for (std::size_t m = 0; m < samples.size(); ++m) {
      if (!std::isfinite(samples[m]))
        throw std::invalid_argument("GridFunction: non-finite sample at index " +
                                    std::to_string(m));
      buf_.real()[m] = samples[m];
    }
  }

  template <class F>
  static GridFunction sample(TorusGrid grid, F&& f) {
    GridFunction out(grid);
    auto s = out.buf_.real();
    for (std::size_t m = 0; m < s.size(); ++m)
      s[m] = f(grid.point(m));
    return out;
  }

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.size(); }
  std::span<const double> samples() const noexcept { return buf_.real(); }
  std::span<double> samples() noexcept { return buf_.real(); }
  double operator[](std::size_t m) const noexcept { return buf_.real()[m]; }
  double& operator[](std::size_t m) noexcept { return buf_.real()[m]; }

  GridFunction& operator+=(const GridFunction& o) {
    require_same_grid(grid_, o.grid_, "GridFunction +=");
    auto a = samples();
    auto b = o.samples();
    for (std::size_t m = 0; m < a.size(); ++m)
      a[m] += b[m];
    return *this;
  }
  GridFunction& operator-=(const GridFunction& o) {
    require_same_grid(grid_, o.grid_, "GridFunction -=");
    auto a = samples();
    auto b = o.samples();
    for (std::size_t m = 0; m < a.size(); ++m)
      a[m] -= b[m];
    return *this;
  }
  GridFunction& operator*=(double c) noexcept {
    for (auto& v : samples())
      v *= c;
    return *this;
  }

  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(double c, GridFunction a) { return a *= c; }

private:
  friend class Spectrum;
  friend Spectrum transform(GridFunction&&);
  friend GridFunction inverse(Spectrum&&);

  GridFunction(TorusGrid grid, AlignedBuffer&& buf) : grid_(grid), buf_(std::move(buf)) {}

  TorusGrid grid_;
  AlignedBuffer buf_;
};

class Spectrum {
public:
  /// Zero spectrum on `grid`.
  explicit Spectrum(TorusGrid grid) : grid_(grid), buf_(grid.size()) {}

  /// Builds a spectrum from all N coefficients ordered xi = -N/2 .. N/2-1.
  /// Rejects input that is not the spectrum of a real function.
  static Spectrum from_full(TorusGrid grid, std::span<const cplx> coeffs,
                            double tolerance = 1e-12) {
    const auto n = grid.size();
    if (coeffs.size() != n)
      throw std::invalid_argument("Spectrum::from_full: expected N coefficients");
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    auto coeff = [&](std::ptrdiff_t xi) { return coeffs[static_cast<std::size_t>(xi + half)]; };
    double scale = 0.0;
    for (const auto& c : coeffs) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw std::invalid_argument("Spectrum::from_full: non-finite coefficient");
      scale = std::max(scale, std::abs(c));
    }
    const double tol = tolerance * std::max(scale, 1.0);
    if (std::abs(coeff(0).imag()) > tol || std::abs(coeff(-half).imag()) > tol)
      throw std::invalid_argument("Spectrum::from_full: non-Hermitian spectrum");
    for (std::ptrdiff_t xi = 1; xi < half; ++xi)
      if (std::abs(coeff(-xi) - std::conj(coeff(xi))) > tol)
        throw std::invalid_argument("Spectrum::from_full: non-Hermitian spectrum at xi=" +
                                    std::to_string(xi));
    Spectrum out(grid);
    auto h = out.half();
    for (std::ptrdiff_t xi = 0; xi < half; ++xi)
      h[static_cast<std::size_t>(xi)] = coeff(xi);
    h[n / 2] = coeff(-half);
    return out;
  }

  const TorusGrid& grid() const noexcept { return grid_; }

  /// Coefficients for xi = 0..N/2 (the last entry is the xi = -N/2 mode).
  std::span<cplx> half() noexcept { return buf_.complex(); }
  std::span<const cplx> half() const noexcept { return buf_.complex(); }

  /// Coefficient at any xi in [-N/2, N/2); zero outside.
  cplx at(std::int64_t xi) const noexcept {
    const auto nyq = grid_.nyquist();
    if (xi < -nyq || xi >= nyq)
      return {};
    if (xi == -nyq)
      return buf_.complex()[static_cast<std::size_t>(nyq)];
    if (xi >= 0)
      return buf_.complex()[static_cast<std::size_t>(xi)];
    return std::conj(buf_.complex()[static_cast<std::size_t>(-xi)]);
  }

  /// Sets the pair (xi, -xi) so the represented function stays real.
  void set(std::int64_t xi, cplx value) {
    const auto nyq = grid_.nyquist();
    if (xi < -nyq || xi >= nyq)
      throw std::out_of_range("Spectrum::set: wavenumber outside grid");
    if (xi == -nyq) {
      buf_.complex()[static_cast<std::size_t>(nyq)] = value;
    } else if (xi >= 0) {
      buf_.complex()[static_cast<std::size_t>(xi)] = value;
    } else {
      buf_.complex()[static_cast<std::size_t>(-xi)] = std::conj(value);
    }
  }

  /// Multiplies each coefficient by m(xi) for xi = 0..N/2-1 and zeroes Nyquist.
  template <class Multiplier>
  Spectrum& apply(Multiplier&& m) {
    auto h = half();
    const std::size_t nyq = grid_.size() / 2;
    for (std::size_t k = 0; k < nyq; ++k)
      h[k] *= m(static_cast<std::int64_t>(k));
    h[nyq] = 0.0;
    return *this;
  }

  Spectrum& operator+=(const Spectrum& o) {
    require_same_grid(grid_, o.grid_, "Spectrum +=");
    auto a = half();
    auto b = o.half();
    for (std::size_t k = 0; k < a.size(); ++k)
      a[k] += b[k];
    return *this;
  }
  Spectrum& operator-=(const Spectrum& o) {
    require_same_grid(grid_, o.grid_, "Spectrum -=");
    auto a = half();
    auto b = o.half();
    for (std::size_t k = 0; k < a.size(); ++k)
      a[k] -= b[k];
    return *this;
  }
  Spectrum& operator*=(double c) noexcept {
    for (auto& v : half())
      v *= c;
    return *this;
  }
  /// this += c * o
  Spectrum& add_scaled(double c, const Spectrum& o) {
    require_same_grid(grid_, o.grid_, "Spectrum add_scaled");
    auto a = half();
    auto b = o.half();
    for (std::size_t k = 0; k < a.size(); ++k)
      a[k] += c * b[k];
    return *this;
  }

  friend Spectrum operator+(Spectrum a, const Spectrum& b) { return a += b; }
  friend Spectrum operator-(Spectrum a, const Spectrum& b) { return a -= b; }
  friend Spectrum operator*(double c, Spectrum a) { return a *= c; }

private:
  friend Spectrum transform(GridFunction&&);
  friend GridFunction inverse(Spectrum&&);

  Spectrum(TorusGrid grid, AlignedBuffer&& buf) : grid_(grid), buf_(std::move(buf)) {}

  TorusGrid grid_;
  AlignedBuffer buf_;
};

/// u_hat(xi) = (2pi/N) sum_m u(x_m) e^{-i x_m xi}. Consumes its argument.
inline Spectrum transform(GridFunction&& f) {
  const double scale = kTwoPi / static_cast<double>(f.size());
  AlignedBuffer buf = std::move(f.buf_);
  fft::forward_in_place(buf);
  for (auto& c : buf.complex())
    c *= scale;
  return Spectrum(f.grid_, std::move(buf));
}

inline Spectrum transform(const GridFunction& f) { return transform(GridFunction(f)); }

/// Samples (1/2pi) sum_xi u_hat(xi) e^{i x xi} on the grid. Consumes its argument.
/// Throws std::invalid_argument when the xi = 0 or Nyquist coefficient has an
/// imaginary part, which no real function can produce.
inline GridFunction inverse(Spectrum&& s) {
  const auto h = s.half();
  double scale = 0.0;
  for (const auto& c : h)
    scale = std::max(scale, std::abs(c));
  const double tol = 1e-12 * std::max(scale, 1.0);
  if (std::abs(h.front().imag()) > tol || std::abs(h.back().imag()) > tol)
    throw std::invalid_argument("inverse: non-Hermitian spectrum (imaginary mean or Nyquist mode)");
  AlignedBuffer buf = std::move(s.buf_);
  fft::backward_in_place(buf);
  const double norm = 1.0 / kTwoPi;
  for (auto& v : buf.real())
    v *= norm;
  return GridFunction(s.grid_, std::move(buf));
}

inline GridFunction inverse(const Spectrum& s) { return inverse(Spectrum(s)); }

/// Multiplication by i*xi; the Nyquist mode is zeroed.
inline Spectrum derivative(Spectrum s) {
  s.apply([](std::int64_t xi) { return cplx(0.0, static_cast<double>(xi)); });
  return s;
}

/// Multiplication by (1 + xi^2)^{-1}, i.e. (1 - d_xx)^{-1}.
inline Spectrum helmholtz_inverse(Spectrum s) {
  auto h = s.half();
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double xi = static_cast<double>(k);
    h[k] /= 1.0 + xi * xi;
  }
  return s;
}

inline GridFunction derivative(const GridFunction& f) { return inverse(derivative(transform(f))); }

enum class DealiasRule { quadratic, cubic };

/// Largest |xi| kept by the truncation rule: |xi| < (2/3)(N/2) for quadratic
/// products, |xi| < (1/2)(N/2) for cubic ones.
inline std::int64_t retained_max(const TorusGrid& grid, DealiasRule rule) {
  const auto n = static_cast<std::int64_t>(grid.size());
  switch (rule) {
  case DealiasRule::quadratic:
    return (n - 1) / 3;
  case DealiasRule::cubic:
    return n / 4 - 1;
  }
  return 0;
}

inline Spectrum& truncate(Spectrum& s, DealiasRule rule) {
  const auto kmax = static_cast<std::size_t>(retained_max(s.grid(), rule));
  auto h = s.half();
  for (std::size_t k = kmax + 1; k < h.size(); ++k)
    h[k] = 0.0;
  return s;
}

/// Spectrum of the truncated pointwise product of the given factors.
inline Spectrum dealiased_product_spectrum(std::initializer_list<const GridFunction*> factors,
                                           DealiasRule rule) {
  if (factors.size() == 0)
    throw std::invalid_argument("dealiased_product: no factors");
  const GridFunction& first = **factors.begin();
  GridFunction prod(first);
  for (auto it = factors.begin() + 1; it != factors.end(); ++it) {
    require_same_grid(first.grid(), (*it)->grid(), "dealiased_product");
    auto a = prod.samples();
    auto b = (*it)->samples();
    for (std::size_t m = 0; m < a.size(); ++m)
      a[m] *= b[m];
  }
  Spectrum s = transform(std::move(prod));
  truncate(s, rule);
  return s;
}

/// Pointwise product with modes above the rule's retention cutoff removed.
/// Exact whenever the summed input bandwidths stay inside the retained band.
inline GridFunction dealiased_product(const GridFunction& f, const GridFunction& g,
                                      DealiasRule rule) {
  return inverse(dealiased_product_spectrum({&f, &g}, rule));
}

inline GridFunction dealiased_product(const GridFunction& f, const GridFunction& g,
                                      const GridFunction& h) {
  return inverse(dealiased_product_spectrum({&f, &g, &h}, DealiasRule::cubic));
}

// ---- norms -----------------------------------------------------------------

inline double sup_norm(std::span<const double> v) noexcept {
  double m = 0.0;
  for (double x : v)
    m = std::max(m, std::abs(x));
  return m;
}

inline double sup_norm(const GridFunction& f) noexcept { return sup_norm(f.samples()); }

/// L^p norm by the uniform Riemann sum with weight 2pi/N; p = infinity gives
/// the largest sample.
inline double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0))
    throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p))
    return sup_norm(f);
  const double w = f.grid().spacing();
  double acc = 0.0;
  if (p == 1.0) {
    for (double x : f.samples())
      acc += std::abs(x);
    return w * acc;
  }
  if (p == 2.0) {
    for (double x : f.samples())
      acc += x * x;
    return std::sqrt(w * acc);
  }
  for (double x : f.samples())
    acc += std::pow(std::abs(x), p);
  return std::pow(w * acc, 1.0 / p);
}

/// (1/2pi) sum_xi w(xi) |u_hat(xi)|^2 over the full spectrum.
template <class Weight>
double weighted_energy(const Spectrum& s, Weight&& w) {
  const auto h = s.half();
  const std::size_t nyq = h.size() - 1;
  double acc = std::norm(h[0]) * w(0.0);
  for (std::size_t k = 1; k < nyq; ++k)
    acc += 2.0 * std::norm(h[k]) * w(static_cast<double>(k));
  acc += std::norm(h[nyq]) * w(static_cast<double>(nyq));
  return acc / kTwoPi;
}

/// int (u^2 + u_x^2) dx evaluated through Parseval.
inline double h1_energy(const Spectrum& s) {
  return weighted_energy(s, [](double xi) { return 1.0 + xi * xi; });
}

inline double l2_energy(const Spectrum& s) {
  return weighted_energy(s, [](double) { return 1.0; });
}

inline double mean_value(const Spectrum& s) { return s.half()[0].real() / kTwoPi; }

} // namespace torusbesov
