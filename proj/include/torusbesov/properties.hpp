#pragma once

// Seeded randomized checks of the spectral, dyadic and solver invariants.
// Each suite reports one statistic against one threshold and is fully
// determined by the seed.

#include "torusbesov/evolution.hpp"
#include "torusbesov/littlewood_paley.hpp"
#include "torusbesov/random.hpp"
#include "torusbesov/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace torusbesov {

struct PropertyResult {
  std::string name;
  std::size_t draws = 0;
  double statistic = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string detail;
};

namespace props {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline PropertyResult upper(std::string name, std::size_t draws, double stat, double threshold,
                            std::string detail = {}) {
  const bool ok = std::isfinite(stat) && stat <= threshold;
  return {std::move(name), draws, stat, threshold, ok, std::move(detail)};
}

inline double sup_diff(const GridFunction& a, const GridFunction& b) {
  double d = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m)
    d = std::max(d, std::abs(a[m] - b[m]));
  return d;
}

// Largest over the per-j constants divided by the smallest.
inline double spread(const std::vector<double>& cj) {
  const auto [lo, hi] = std::minmax_element(cj.begin(), cj.end());
  return *lo > 0.0 ? *hi / *lo : kInf;
}

inline std::string describe(const std::vector<double>& cj, int j0) {
  std::string s;
  for (std::size_t i = 0; i < cj.size(); ++i) {
    if (!s.empty())
      s += ' ';
    s += "C" + std::to_string(j0 + static_cast<int>(i)) + "=" + std::to_string(cj[i]);
  }
  return s;
}

inline std::string draw_tag(std::uint64_t seed, std::size_t draw) {
  return "seed=" + std::to_string(seed) + " draw=" + std::to_string(draw);
}

// A concentrated bump: coefficients of a translated Dirac mass with a 20%
// random modulation, so every block is close to a translate of its kernel.
inline Spectrum kernel_like(const TorusGrid& grid, std::int64_t kmax, Rng& rng) {
  Spectrum s(grid);
  auto h = s.half();
  const double x0 = rng.uniform(0.0, kTwoPi);
  for (std::int64_t k = 1; k <= kmax; ++k) {
    const double w = 1.0 + 0.2 * rng.normal();
    h[static_cast<std::size_t>(k)] = w * std::polar(1.0, -static_cast<double>(k) * x0);
  }
  return s;
}

// Random phases with |c_xi| ~ |xi|^{-3/2}: every dyadic block carries a
// comparable share of the B^1_{inf,1} norm.
inline Spectrum rough(const TorusGrid& grid, std::int64_t kmax, Rng& rng) {
  Spectrum s(grid);
  auto h = s.half();
  for (std::int64_t k = 1; k <= kmax; ++k) {
    const double w = std::pow(static_cast<double>(k), -1.5);
    h[static_cast<std::size_t>(k)] = w * std::polar(1.0, rng.uniform(0.0, kTwoPi));
  }
  return s;
}

} // namespace props

inline PropertyResult partition_of_unity_property(int top_exponent = 20) {
  const std::int64_t top = std::int64_t{1} << top_exponent;
  double worst = 0.0;
  std::int64_t at = 0;
  for (std::int64_t xi = 0; xi <= top; ++xi) {
    const double x = static_cast<double>(xi);
    double sum = BumpProfile::chi(x);
    for (int j = 0; j <= top_exponent + 1; ++j)
      sum += BumpProfile::multiplier(j, x);
    if (std::abs(sum - 1.0) > worst) {
      worst = std::abs(sum - 1.0);
      at = xi;
    }
  }
  return props::upper("partition_of_unity", static_cast<std::size_t>(top + 1), worst, 1e-12,
                      "|xi|<=2^" + std::to_string(top_exponent) + " worst_xi=" + std::to_string(at));
}

inline PropertyResult near_orthogonality_property(std::uint64_t seed, std::size_t draws = 100) {
  Rng rng(seed);
  const TorusGrid grid(1024);
  const int top = top_block(grid);
  double worst = 0.0;
  std::string where;
  for (std::size_t d = 0; d < draws; ++d) {
    const Spectrum f = random_band_limited(grid, grid.nyquist() / 3, rng);
    const double scale = sup_norm(inverse(f));
    for (int j = -1; j <= top; ++j) {
      const Spectrum bj = block_spectrum(f, j);
      for (int k = -1; k <= top; ++k) {
        if (std::abs(k - j) < 2)
          continue;
        const double v = sup_norm(block(bj, k)) / scale;
        if (v > worst) {
          worst = v;
          where = props::draw_tag(seed, d) + " j=" + std::to_string(j) + " k=" + std::to_string(k);
        }
      }
    }
  }
  return props::upper("near_orthogonality", draws, worst, 1e-12, where);
}

inline PropertyResult paraproduct_property(std::uint64_t seed, std::size_t draws = 20) {
  Rng rng(seed);
  const TorusGrid grid(4096);
  const int top = top_block(grid);
  double worst = 0.0;
  std::string where;
  for (std::size_t d = 0; d < draws; ++d) {
    const Spectrum u = random_band_limited(grid, 1000, rng);
    const Spectrum v = random_band_limited(grid, 1000, rng);
    for (int k = 0; k <= 7; ++k) {
      const GridFunction low = inverse(low_cutoff_spectrum(u, k - 1 >= -1 ? k - 1 : -1));
      const GridFunction high = block(v, k);
      const double scale = sup_norm(low) * sup_norm(high);
      if (scale == 0.0)
        continue;
      const Spectrum prod = dealiased_product_spectrum({&low, &high}, DealiasRule::quadratic);
      for (int j = -1; j <= top; ++j) {
        if (std::abs(k - j) < 5)
          continue;
        const double val = sup_norm(block(prod, j)) / scale;
        if (val > worst) {
          worst = val;
          where = props::draw_tag(seed, d) + " j=" + std::to_string(j) + " k=" + std::to_string(k);
        }
      }
    }
  }
  return props::upper("paraproduct_annihilation", draws, worst, 1e-12, where);
}

inline PropertyResult block_boundedness_property(std::uint64_t seed, std::size_t draws = 30) {
  Rng rng(seed);
  const TorusGrid grid(2048);
  double worst = 0.0;
  std::string where;
  for (std::size_t d = 0; d < draws; ++d) {
    const Spectrum f = d % 2 == 0 ? random_band_limited(grid, 600, rng, 0.5)
                                  : props::kernel_like(grid, 600, rng);
    const GridFunction fv = inverse(f);
    for (double p : {1.0, 2.0, props::kInf}) {
      const double base = lp_norm(fv, p);
      for (int j = -1; j <= 8; ++j) {
        const double c = lp_norm(block(f, j), p) / base;
        if (c > worst) {
          worst = c;
          where = props::draw_tag(seed, d) + " j=" + std::to_string(j) + " p=" + std::to_string(p);
        }
      }
    }
  }
  return props::upper("block_boundedness", draws, worst, 3.0, where);
}

/// Empirical Bernstein constants per j; the statistic is the worst spread
/// max_j C_j / min_j C_j over the tested (alpha, q, p).
inline PropertyResult bernstein_property(std::uint64_t seed, std::size_t draws = 10) {
  Rng rng(seed);
  const TorusGrid grid(4096);
  const int j0 = 2, j1 = 8;
  struct Case {
    int alpha;
    double q, p;
  };
  const std::vector<Case> cases{{0, 1, props::kInf}, {0, 2, props::kInf}, {0, props::kInf, props::kInf},
                                {1, 1, props::kInf}, {1, 2, props::kInf}, {1, props::kInf, props::kInf},
                                {2, 1, props::kInf}, {2, 2, props::kInf}, {2, props::kInf, props::kInf}};
  std::vector<std::vector<double>> c(cases.size(), std::vector<double>(j1 - j0 + 1, 0.0));
  for (std::size_t d = 0; d < draws; ++d) {
    const Spectrum f = props::kernel_like(grid, grid.nyquist() / 2 - 1, rng);
    for (int j = j0; j <= j1; ++j) {
      const Spectrum bj = block_spectrum(f, j);
      const GridFunction b0 = inverse(bj);
      const Spectrum d1 = derivative(bj);
      const GridFunction b1 = inverse(d1);
      const GridFunction b2 = inverse(derivative(d1));
      const GridFunction* by_alpha[] = {&b0, &b1, &b2};
      for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& cs = cases[i];
        const double inv = (std::isinf(cs.q) ? 0.0 : 1.0 / cs.q) - (std::isinf(cs.p) ? 0.0 : 1.0 / cs.p);
        const double scale = std::exp2(cs.alpha * j + j * inv) * lp_norm(b0, cs.q);
        const double ratio = lp_norm(*by_alpha[cs.alpha], cs.p) / scale;
        auto& slot = c[i][static_cast<std::size_t>(j - j0)];
        slot = std::max(slot, ratio);
      }
    }
  }
  double worst = 0.0;
  std::string where;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const double s = props::spread(c[i]);
    if (s >= worst) {
      worst = s;
      where = "alpha=" + std::to_string(cases[i].alpha) + " q=" + std::to_string(cases[i].q) +
              " p=" + std::to_string(cases[i].p) + " " + props::describe(c[i], j0);
    }
  }
  return props::upper("bernstein_constant_stability", draws, worst, 4.0, where);
}

/// Per-j constants of
///   2^j ||[Delta_j, v] d_x f||_inf <= C (||v_x||_inf ||f||_{B^1_{inf,1}} + ||f_x||_inf ||v_x||_{B^0_{inf,1}}).
inline PropertyResult commutator_property(std::uint64_t seed, std::size_t draws = 10) {
  Rng rng(seed);
  const TorusGrid grid(4096);
  const int j0 = 2, j1 = 8;
  const BesovSpec b1(1.0, props::kInf, 1.0), b0(0.0, props::kInf, 1.0);
  std::vector<double> c(j1 - j0 + 1, 0.0);
  for (std::size_t d = 0; d < draws; ++d) {
    const Spectrum vs = random_band_limited(grid, 4, rng);
    const Spectrum fs = props::rough(grid, 1000, rng);
    const GridFunction v = inverse(vs);
    const GridFunction f = inverse(fs);
    const Spectrum vx = derivative(vs);
    const double rhs = sup_norm(inverse(vx)) * besov_norm(fs, b1) +
                       sup_norm(inverse(derivative(fs))) * besov_norm(vx, b0);
    for (int j = j0; j <= j1; ++j) {
      const double lhs = std::exp2(j) * sup_norm(commutator(v, f, j));
      auto& slot = c[static_cast<std::size_t>(j - j0)];
      slot = std::max(slot, lhs / rhs);
    }
  }
  return props::upper("commutator_constant_stability", draws, props::spread(c), 4.0,
                      props::describe(c, j0));
}

inline PropertyResult telescoping_property(std::uint64_t seed, std::size_t draws = 10) {
  Rng rng(seed);
  const TorusGrid grid(1024);
  double worst = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    const Spectrum f = random_band_limited(grid, 300, rng);
    const double scale = sup_norm(inverse(f));
    for (int j = -1; j <= 8; ++j) {
      GridFunction sum(grid);
      for (int k = -1; k <= j - 1; ++k)
        sum += block(f, k);
      worst = std::max(worst, props::sup_diff(sum, inverse(low_cutoff_spectrum(f, j))) / scale);
    }
  }
  return props::upper("telescoping", draws, worst, 1e-12);
}

inline PropertyResult parseval_property(std::uint64_t seed, std::size_t draws = 20) {
  Rng rng(seed);
  const TorusGrid grid(512);
  double worst = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    const Spectrum f = random_band_limited(grid, 200, rng);
    const double spectral = l2_energy(f);
    const double physical = std::pow(lp_norm(inverse(f), 2.0), 2);
    worst = std::max(worst, std::abs(spectral - physical) / physical);
  }
  return props::upper("parseval", draws, worst, 1e-12);
}

inline PropertyResult linearity_property(std::uint64_t seed, std::size_t draws = 20) {
  Rng rng(seed);
  const TorusGrid grid(256);
  double worst = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    const Spectrum a = random_band_limited(grid, 80, rng);
    const Spectrum b = random_band_limited(grid, 80, rng);
    const double s = rng.normal(), t = rng.normal();
    const GridFunction fa = inverse(a), fb = inverse(b);
    const GridFunction combo = s * fa + t * fb;
    const double scale = sup_norm(combo) + sup_norm(fa) + sup_norm(fb);
    const std::function<Spectrum(const Spectrum&)> ops[] = {
        [](const Spectrum& x) { return x; },
        [](const Spectrum& x) { return derivative(x); },
        [](const Spectrum& x) { return helmholtz_inverse(x); },
        [](const Spectrum& x) { return derivative(helmholtz_inverse(x)); },
    };
    for (const auto& op : ops) {
      const GridFunction lhs = inverse(op(transform(combo)));
      const GridFunction rhs = s * inverse(op(a)) + t * inverse(op(b));
      worst = std::max(worst, props::sup_diff(lhs, rhs) / scale);
    }
    const GridFunction dh = inverse(derivative(helmholtz_inverse(a)));
    const GridFunction hd = inverse(helmholtz_inverse(derivative(a)));
    worst = std::max(worst, props::sup_diff(dh, hd) / scale);
  }
  return props::upper("linearity_and_commuting_multipliers", draws, worst, 1e-12);
}

inline PropertyResult novikov_symmetry_property(std::uint64_t seed, std::size_t draws = 20) {
  Rng rng(seed);
  const TorusGrid grid(256);
  double worst = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    Spectrum u = random_band_limited(grid, 40, rng, 1.0);
    // -R u, with R the reflection x -> -x, is -conj on the Fourier side.
    Spectrum reflected = time_reversed(u, Equation::novikov);
    reflected *= -1.0;
    const Spectrum lhs = rhs_spectrum(reflected, Equation::novikov);
    const Spectrum rhs = time_reversed(rhs_spectrum(u, Equation::novikov), Equation::novikov);
    worst = std::max(worst, std::sqrt(l2_energy(lhs - rhs) / l2_energy(rhs)));
  }
  return props::upper("novikov_reflection_symmetry", draws, worst, 1e-12);
}

inline PropertyResult steady_constants_property(std::uint64_t seed, std::size_t draws = 10) {
  Rng rng(seed);
  const TorusGrid grid(64);
  double worst = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    const double c = rng.uniform(-1.0, 1.0);
    for (Equation e : {Equation::ch, Equation::novikov}) {
      Spectrum s(grid);
      s.set(0, kTwoPi * c);
      SolverConfig cfg;
      cfg.equation = e;
      cfg.T = 0.25;
      const auto rec = evolve(s, cfg, std::nullopt, false);
      const GridFunction u = inverse(rec.final_state());
      for (double v : u.samples())
        worst = std::max(worst, std::abs(v - c));
      if (!rec.ok())
        worst = props::kInf;
    }
  }
  return props::upper("constant_steady_states", draws, worst, 1e-12);
}

inline std::vector<PropertyResult> run_property_suites(std::uint64_t seed) {
  // Each suite gets its own stream so adding draws to one leaves the rest unchanged.
  auto sub = [seed](std::uint64_t k) { return seed * 0x9E3779B97F4A7C15ULL + k; };
  return {partition_of_unity_property(),
          near_orthogonality_property(sub(1)),
          paraproduct_property(sub(2)),
          block_boundedness_property(sub(3)),
          bernstein_property(sub(4)),
          commutator_property(sub(5)),
          telescoping_property(sub(6)),
          parseval_property(sub(7)),
          linearity_property(sub(8)),
          novikov_symmetry_property(sub(9)),
          steady_constants_property(sub(10))};
}

} // namespace torusbesov
