#include "oracles.hpp"

#include <torusbesov/offgrid.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace torusbesov;

namespace {

Spectrum spectrum_of(const oracle::TrigPoly& p, const TorusGrid& g) {
  Spectrum s(g);
  for (auto [xi, c] : p.c)
    s.set(xi, xi == 0 ? cplx(c.real(), 0.0) : c);
  return s;
}

oracle::TrigPoly real_mean(oracle::TrigPoly p) {
  p.c[0] = p.c[0].real();
  return p;
}

} // namespace

TEST(EvaluateDirect, MatchesCoefficientSum) {
  std::mt19937_64 rng(31);
  const auto p = real_mean(oracle::random_poly(rng, 200));
  const TorusGrid g(1024);
  const Spectrum s = spectrum_of(p, g);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<double> pts(300);
  for (auto& x : pts)
    x = u(rng);
  const auto got = evaluate_direct(s, pts);
  for (std::size_t i = 0; i < pts.size(); ++i)
    ASSERT_NEAR(got[i], p(pts[i]), 1e-12) << pts[i];
}

TEST(LocalExpansion, ReproducesOffGridValuesAndSlopes) {
  std::mt19937_64 rng(32);
  const auto p = real_mean(oracle::random_poly(rng, 80));
  const TorusGrid g(256);
  const Spectrum s = spectrum_of(p, g);
  const double shift = 0.37, radius = 0.02;
  const LocalExpansion ex(s, shift, radius);
  EXPECT_GT(ex.order(), 0);
  std::uniform_real_distribution<double> d(-radius, radius);
  for (std::size_t m = 0; m < g.size(); ++m) {
    const double y = g.point(m) + shift + d(rng);
    ASSERT_NEAR(ex.value(m, y), p(y), 1e-13);
    ASSERT_NEAR(ex.slope(m, y), p.derivative(y), 1e-11);
  }
}

TEST(LocalExpansion, RefusesRadiiBeyondItsReach) {
  std::mt19937_64 rng(33);
  const TorusGrid g(1024);
  const Spectrum s = spectrum_of(real_mean(oracle::random_poly(rng, 300)), g);
  EXPECT_FALSE(LocalExpansion::feasible(s, 1.0));
  EXPECT_THROW(LocalExpansion(s, 0.0, 1.0), std::domain_error);
}

TEST(SampleDisplaced, BothRoutesAgreeWithTheOracle) {
  std::mt19937_64 rng(34);
  const auto p = real_mean(oracle::random_poly(rng, 60));
  const TorusGrid g(512);
  const Spectrum s = spectrum_of(p, g);
  std::uniform_real_distribution<double> d(-1e-3, 1e-3);
  // Small displacements favour the expansion, large ones direct summation.
  for (double spread : {1e-3, 0.5}) {
    std::vector<double> pos(g.size());
    for (std::size_t m = 0; m < g.size(); ++m)
      pos[m] = g.point(m) + 0.1 + spread * 1e3 * d(rng);
    const GridFunction got = sample_displaced(s, pos);
    for (std::size_t m = 0; m < g.size(); ++m)
      ASSERT_NEAR(got[m], p(pos[m]), 1e-12) << spread;
  }
}

TEST(PeakNorm, MatchesDenseSamplingAndDominatesGridSamples) {
  std::mt19937_64 rng(35);
  const auto p = real_mean(oracle::random_poly(rng, 20));
  const TorusGrid g(64);
  const Spectrum s = spectrum_of(p, g);
  double dense = 0.0;
  for (int m = 0; m < 400000; ++m)
    dense = std::max(dense, std::abs(p(2.0 * oracle::pi * m / 400000.0)));
  const double peak = peak_norm(s);
  EXPECT_GE(peak, sup_norm(inverse(s)));
  EXPECT_NEAR(peak, dense, 1e-7 * dense);
  EXPECT_GE(peak, dense - 1e-14);
}

TEST(PeakNorm, ExactForAShiftedCosine) {
  const TorusGrid g(32);
  Spectrum s(g);
  s.set(7, std::polar(oracle::pi, 0.3));
  EXPECT_NEAR(peak_norm(s), 1.0, 1e-15);
}

TEST(PeakNormAlong, InvariantUnderMonotoneMaps) {
  std::mt19937_64 rng(36);
  const TorusGrid g(256);
  const Spectrum s = spectrum_of(real_mean(oracle::random_poly(rng, 60)), g);
  const double peak = peak_norm(s);
  std::vector<double> pos(g.size());
  for (std::size_t m = 0; m < g.size(); ++m) {
    const double x = g.point(m);
    pos[m] = x + 0.8 + 0.004 * std::sin(x) + 0.002 * std::cos(3.0 * x);
  }
  EXPECT_NEAR(peak_norm_along(s, pos), peak, 1e-12 * peak);
}

TEST(NodeExpansion, ExactAtArbitraryPointsForFullBandwidth) {
  std::mt19937_64 rng(37);
  const auto p = real_mean(oracle::random_poly(rng, 127));
  const TorusGrid g(256);
  const Spectrum s = spectrum_of(p, g);
  const NodeExpansion ex(s);
  EXPECT_LE(ex.order(), LocalExpansion::kMaxOrder);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 2000; ++i) {
    const double y = u(rng);
    ASSERT_NEAR(ex(y), p(y), 1e-12) << y;
  }
  for (double y : {0.0, 2.0 * oracle::pi, 2.0 * oracle::pi - 1e-9, -1e-12, 0.5 * g.spacing()})
    EXPECT_NEAR(ex(y), p(y), 1e-12) << y;
}

TEST(EvaluateAt, ChoosesARouteAndStaysExact) {
  std::mt19937_64 rng(38);
  const TorusGrid g(512);
  std::uniform_real_distribution<double> u(0.0, 7.0);
  for (std::int64_t kmax : {3, 200}) {
    const auto p = real_mean(oracle::random_poly(rng, kmax));
    const Spectrum s = spectrum_of(p, g);
    std::vector<double> pts(3000);
    for (auto& x : pts)
      x = u(rng);
    const auto got = evaluate_at(s, pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
      ASSERT_NEAR(got[i], p(pts[i]), 1e-12);
  }
}

TEST(SampleDisplaced, WidelySpreadParticlesOnAFullSpectrum) {
  std::mt19937_64 rng(39);
  const auto p = real_mean(oracle::random_poly(rng, 150));
  const TorusGrid g(512);
  const Spectrum s = spectrum_of(p, g);
  std::vector<double> pos(g.size());
  for (std::size_t m = 0; m < g.size(); ++m) {
    const double x = g.point(m);
    pos[m] = x + 0.3 * std::sin(x) + 0.05;
  }
  const GridFunction got = sample_displaced(s, pos);
  for (std::size_t m = 0; m < g.size(); ++m)
    ASSERT_NEAR(got[m], p(pos[m]), 1e-12);
}
