#pragma once

// Exact evaluation of band-limited functions away from the grid.
//
// Two routes are provided. Direct summation over the nonzero modes costs
// O(points * modes). The local expansion writes f(x_m + s + d) as a Taylor
// series in d around every shifted grid point; its coefficient fields are
// inverse transforms of (i xi r)^p / p! e^{i xi s} f_hat, and the order is
// chosen from the spectrum so the remainder stays below a requested relative
// tolerance for |d| <= r. The second route costs (order + 1) transforms and
// is what makes flow maps on 2^19-point grids affordable. When particles have
// spread too far for one shifted expansion, each is expanded about its
// nearest grid node instead.

#include "torusbesov/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <stdexcept>
#include <vector>

namespace torusbesov {

namespace detail {

// Sum of |coefficient| over the full spectrum; (1/2pi) of it bounds sup |f|.
inline double l1_coefficients(const Spectrum& s) {
  const auto h = s.half();
  double acc = std::abs(h[0]);
  for (std::size_t k = 1; k + 1 < h.size(); ++k)
    acc += 2.0 * std::abs(h[k]);
  return acc;
}

// (1/2pi) sum_xi |xi| |c_xi|, a Lipschitz bound for f.
inline double slope_bound(const Spectrum& s) {
  const auto h = s.half();
  double acc = 0.0;
  for (std::size_t k = 1; k + 1 < h.size(); ++k)
    acc += 2.0 * static_cast<double>(k) * std::abs(h[k]);
  return acc / kTwoPi;
}

// Smallest order P whose Taylor remainder bound
//   sum_xi |c_xi| (|xi| r)^{P+1} / (P+1)!
// is below tol * sum_xi |c_xi|; nullopt when no P <= max_order suffices.
inline std::optional<int> taylor_order(const Spectrum& s, double radius, double tol,
                                       int max_order) {
  const auto h = s.half();
  const std::size_t nyq = h.size() - 1;
  const double total = l1_coefficients(s);
  if (total == 0.0 || radius == 0.0)
    return 0;
  std::vector<double> term(nyq, 0.0);
  std::vector<double> scaled(nyq, 0.0);
  for (std::size_t k = 1; k < nyq; ++k) {
    term[k] = 2.0 * std::abs(h[k]);
    scaled[k] = static_cast<double>(k) * radius;
  }
  for (int p = 0; p <= max_order; ++p) {
    double rem = 0.0;
    for (std::size_t k = 1; k < nyq; ++k) {
      term[k] *= scaled[k] / static_cast<double>(p + 1);
      rem += term[k];
    }
    if (rem <= tol * total)
      return p;
  }
  return std::nullopt;
}

// Maximizes |g| on [a, b] by coarse sampling followed by golden-section search
// around the best sample.
template <class G>
double maximize_abs(G&& g, double a, double b, int samples = 16) {
  double best_t = a, best = std::abs(g(a));
  const double h = (b - a) / samples;
  for (int i = 1; i <= samples; ++i) {
    const double t = a + i * h;
    const double v = std::abs(g(t));
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  double lo = std::max(a, best_t - h), hi = std::min(b, best_t + h);
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - ratio * (hi - lo), d = lo + ratio * (hi - lo);
  double fc = std::abs(g(c)), fd = std::abs(g(d));
  for (int it = 0; it < 60 && hi - lo > 1e-14 * (1.0 + std::abs(hi)); ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - ratio * (hi - lo);
      fc = std::abs(g(c));
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + ratio * (hi - lo);
      fd = std::abs(g(d));
    }
  }
  return std::max({best, fc, fd});
}

} // namespace detail

/// Taylor expansion of a band-limited function about every shifted grid point
/// x_m + shift, valid for displacements |d| <= radius.
class LocalExpansion {
public:
  static constexpr int kMaxOrder = 48;

  LocalExpansion(const Spectrum& f, double shift, double radius, double tol = 1e-15)
      : grid_(f.grid()), shift_(shift), radius_(radius) {
    const auto order = detail::taylor_order(f, radius, tol, kMaxOrder);
    if (!order)
      throw std::domain_error("LocalExpansion: displacement radius too large for the spectrum");
    fields_.reserve(static_cast<std::size_t>(*order) + 1);
    Spectrum g = f;
    g.apply([shift](std::int64_t xi) { return std::polar(1.0, static_cast<double>(xi) * shift); });
    for (int p = 0; p <= *order; ++p) {
      if (p > 0) {
        const double r = radius / p;
        g.apply([r](std::int64_t xi) { return cplx(0.0, static_cast<double>(xi) * r); });
      }
      fields_.push_back(inverse(g));
    }
  }

  /// Whether an expansion of this radius is available for the spectrum.
  static bool feasible(const Spectrum& f, double radius, double tol = 1e-15) {
    return detail::taylor_order(f, radius, tol, kMaxOrder).has_value();
  }

  static std::optional<int> order_for(const Spectrum& f, double radius, double tol = 1e-15) {
    return detail::taylor_order(f, radius, tol, kMaxOrder);
  }

  int order() const noexcept { return static_cast<int>(fields_.size()) - 1; }
  double shift() const noexcept { return shift_; }
  double radius() const noexcept { return radius_; }

  /// f(y) from the expansion centred at x_m + shift.
  double value(std::size_t m, double y) const noexcept {
    const double t = local(m, y);
    double acc = 0.0;
    for (std::size_t p = fields_.size(); p-- > 0;)
      acc = acc * t + fields_[p][m];
    return acc;
  }

  /// f'(y) from the expansion centred at x_m + shift.
  double slope(std::size_t m, double y) const noexcept {
    const double t = local(m, y);
    double acc = 0.0;
    for (std::size_t p = fields_.size(); p-- > 1;)
      acc = acc * t + static_cast<double>(p) * fields_[p][m];
    return radius_ > 0.0 ? acc / radius_ : 0.0;
  }

  /// Samples f(x_m + shift): the zeroth coefficient field.
  const GridFunction& shifted_samples() const noexcept { return fields_.front(); }

private:
  double local(std::size_t m, double y) const noexcept {
    if (radius_ == 0.0)
      return 0.0;
    return (y - grid_.point(m) - shift_) / radius_;
  }

  TorusGrid grid_;
  double shift_;
  double radius_;
  std::vector<GridFunction> fields_;
};

/// f at arbitrary points by direct summation over nonzero modes.
inline std::vector<double> evaluate_direct(const Spectrum& f, std::span<const double> points) {
  const auto h = f.half();
  const std::size_t nyq = h.size() - 1;
  double peak = 0.0;
  for (std::size_t k = 0; k < nyq; ++k)
    peak = std::max(peak, std::abs(h[k]));
  std::vector<std::size_t> active;
  for (std::size_t k = 1; k < nyq; ++k)
    if (std::abs(h[k]) > 1e-18 * peak)
      active.push_back(k);

  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double y = points[i];
    const cplx step = std::polar(1.0, y);
    double acc = 0.0;
    cplx e = 1.0;
    std::size_t prev = 0;
    int since_seed = 0;
    for (std::size_t k : active) {
      // Rotation recurrence along runs of consecutive modes, re-seeded
      // periodically to keep the phase error at rounding level.
      if (k == prev + 1 && since_seed < 32) {
        e *= step;
        ++since_seed;
      } else {
        e = std::polar(1.0, static_cast<double>(k) * y);
        since_seed = 0;
      }
      prev = k;
      acc += 2.0 * (h[k] * e).real();
    }
    out[i] = (h[0].real() + acc) / kTwoPi;
  }
  return out;
}

namespace detail {

// Index of the grid point nearest to y on the torus, and y translated by a
// multiple of 2pi to lie within half a cell of it.
inline std::pair<std::size_t, double> nearest_node(const TorusGrid& grid, double y) {
  const double dx = grid.spacing();
  const double turns = std::floor(y / kTwoPi);
  double local = y - turns * kTwoPi;
  auto m = static_cast<std::int64_t>(std::llround(local / dx));
  const auto n = static_cast<std::int64_t>(grid.size());
  if (m == n) {
    m = 0;
    local -= kTwoPi;
  }
  return {static_cast<std::size_t>(m), local};
}

} // namespace detail

/// f at arbitrary points from the Taylor expansion about the nearest grid
/// point. The radius is half a cell, so the order stays bounded for any
/// spectrum resolved on the grid.
class NodeExpansion {
public:
  explicit NodeExpansion(const Spectrum& f, double tol = 1e-15)
      : ex_(f, 0.0, 0.5 * f.grid().spacing(), tol), grid_(f.grid()) {}

  double operator()(double y) const {
    const auto [m, local] = detail::nearest_node(grid_, y);
    return ex_.value(m, local);
  }

  int order() const noexcept { return ex_.order(); }

private:
  LocalExpansion ex_;
  TorusGrid grid_;
};

/// f at arbitrary points, by direct summation or by the node expansion,
/// whichever is cheaper.
inline std::vector<double> evaluate_at(const Spectrum& f, std::span<const double> points) {
  std::size_t active = 0;
  for (const auto& c : f.half())
    active += c != cplx{} ? 1 : 0;
  const double n = static_cast<double>(f.grid().size());
  const auto order = LocalExpansion::order_for(f, 0.5 * f.grid().spacing());
  const double expansion_cost =
      order ? (*order + 1) * 5.0 * n * std::log2(n) + 2.0 * (*order + 1) * static_cast<double>(points.size())
            : INFINITY;
  if (8.0 * static_cast<double>(points.size() * active) <= expansion_cost)
    return evaluate_direct(f, points);
  const NodeExpansion ex(f);
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    out[i] = ex(points[i]);
  return out;
}

/// Samples f(positions[m]) where positions[m] is a displaced copy of grid
/// point m. Small, nearly uniform displacements use one expansion about the
/// shifted grid; otherwise the cheaper of the node expansion and direct
/// summation is used.
inline GridFunction sample_displaced(const Spectrum& f, std::span<const double> positions) {
  const auto& grid = f.grid();
  if (positions.size() != grid.size())
    throw std::invalid_argument("sample_displaced: one position per grid point required");
  double shift = 0.0;
  for (std::size_t m = 0; m < positions.size(); ++m)
    shift += positions[m] - grid.point(m);
  shift /= static_cast<double>(positions.size());
  double radius = 0.0;
  for (std::size_t m = 0; m < positions.size(); ++m)
    radius = std::max(radius, std::abs(positions[m] - grid.point(m) - shift));

  GridFunction out(grid);
  auto dst = out.samples();
  const auto order = LocalExpansion::order_for(f, radius);
  const auto node_order = LocalExpansion::order_for(f, 0.5 * grid.spacing());
  if (order && (!node_order || *order <= *node_order)) {
    const LocalExpansion ex(f, shift, radius);
    for (std::size_t m = 0; m < positions.size(); ++m)
      dst[m] = ex.value(m, positions[m]);
    return out;
  }
  const auto vals = evaluate_at(f, positions);
  std::copy(vals.begin(), vals.end(), dst.begin());
  return out;
}

/// Continuous supremum of |f| over the torus (not just over grid samples):
/// every cell that the slope bound cannot rule out is refined.
inline double peak_norm(const Spectrum& f) {
  const double dx = f.grid().spacing();
  const LocalExpansion ex(f, 0.0, 0.5 * dx);
  const auto s = ex.shifted_samples().samples();
  const double coarse = sup_norm(s);
  // Cells whose sample plus the slope bound cannot beat the best sample are skipped.
  const double reach = detail::slope_bound(f) * 0.5 * dx;
  double best = coarse;
  for (std::size_t m = 0; m < s.size(); ++m) {
    if (std::abs(s[m]) + reach < coarse)
      continue;
    const double x = f.grid().point(m);
    best = std::max(best, detail::maximize_abs([&](double y) { return ex.value(m, y); },
                                               x - 0.5 * dx, x + 0.5 * dx));
  }
  return best;
}

/// Continuous supremum of |f o phi| where phi is known at the grid points
/// through `positions` (increasing, with positions[N-1] < positions[0] + 2pi).
/// Each displaced point owns the interval up to the midpoints with its
/// neighbours; since phi is a bijection these intervals tile the torus.
inline double peak_norm_along(const Spectrum& f, std::span<const double> positions) {
  const auto& grid = f.grid();
  const std::size_t n = grid.size();
  if (positions.size() != n)
    throw std::invalid_argument("peak_norm_along: one position per grid point required");
  auto pos = [&](std::ptrdiff_t m) {
    const auto nn = static_cast<std::ptrdiff_t>(n);
    if (m < 0)
      return positions[static_cast<std::size_t>(m + nn)] - kTwoPi;
    if (m >= nn)
      return positions[static_cast<std::size_t>(m - nn)] + kTwoPi;
    return positions[static_cast<std::size_t>(m)];
  };
  double shift = 0.0;
  for (std::size_t m = 0; m < n; ++m)
    shift += positions[m] - grid.point(m);
  shift /= static_cast<double>(n);
  double radius = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const auto i = static_cast<std::ptrdiff_t>(m);
    const double reach = std::max(pos(i) - 0.5 * (pos(i - 1) + pos(i)),
                                  0.5 * (pos(i) + pos(i + 1)) - pos(i));
    radius = std::max(radius, std::abs(positions[m] - grid.point(m) - shift) + reach);
  }
  // One shifted expansion when the particles stay close to a translate of
  // the grid, the node expansion otherwise.
  std::optional<LocalExpansion> shifted;
  std::optional<NodeExpansion> node;
  if (LocalExpansion::feasible(f, radius))
    shifted.emplace(f, shift, radius);
  else
    node.emplace(f);
  auto eval = [&](std::size_t m, double y) { return shifted ? shifted->value(m, y) : (*node)(y); };

  std::vector<double> at(n);
  for (std::size_t m = 0; m < n; ++m)
    at[m] = eval(m, positions[m]);
  const double coarse = sup_norm(at);
  const double slope = detail::slope_bound(f);
  double best = coarse;
  for (std::size_t m = 0; m < n; ++m) {
    const auto i = static_cast<std::ptrdiff_t>(m);
    const double span = std::max(pos(i) - pos(i - 1), pos(i + 1) - pos(i));
    if (std::abs(at[m]) + 0.5 * slope * span < coarse)
      continue;
    best = std::max(best, detail::maximize_abs([&](double y) { return eval(m, y); },
                                               0.5 * (pos(i - 1) + pos(i)),
                                               0.5 * (pos(i) + pos(i + 1))));
  }
  return best;
}

} // namespace torusbesov
