#include "oracles.hpp"

#include <torusbesov/spectral.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace torusbesov;

namespace {

GridFunction from(const TorusGrid& g, const std::vector<double>& v) { return GridFunction(g, v); }

double max_diff(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

} // namespace

TEST(TorusGrid, RejectsNonPowersOfTwoAndSmallSizes) {
  EXPECT_THROW(TorusGrid(12), std::invalid_argument);
  EXPECT_THROW(TorusGrid(8), std::invalid_argument);
  EXPECT_NO_THROW(TorusGrid(16));
}

TEST(TorusGrid, PointsIncreaseAndSpanTheCircle) {
  const TorusGrid g(64);
  EXPECT_EQ(g.point(0), 0.0);
  for (std::size_t m = 1; m < g.size(); ++m)
    EXPECT_GT(g.point(m), g.point(m - 1));
  EXPECT_LT(g.point(63), oracle::pi * 2.0);
  EXPECT_EQ(g.exponent(), 6);
}

TEST(GridFunction, RejectsWrongSizeAndNonFinite) {
  const TorusGrid g(16);
  EXPECT_THROW(GridFunction(g, std::vector<double>(15, 0.0)), std::invalid_argument);
  std::vector<double> bad(16, 0.0);
  bad[3] = NAN;
  EXPECT_THROW(GridFunction(g, bad), std::invalid_argument);
}

TEST(Transform, MatchesDirectDftAtSixteenPoints) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> f(16);
  for (auto& v : f)
    v = u(rng);
  const Spectrum s = transform(from(TorusGrid(16), f));
  for (std::int64_t xi = -8; xi < 8; ++xi)
    EXPECT_LT(std::abs(s.at(xi) - oracle::dft(f, xi)), 1e-13) << "xi=" << xi;
}

TEST(Transform, CosineHasCoefficientPiAtPlusMinusLambda) {
  for (std::int64_t lambda : {1, 32, 256}) {
    const TorusGrid g(1024);
    const Spectrum s = transform(GridFunction::sample(g, [&](double x) { return std::cos(lambda * x); }));
    for (std::int64_t xi = -512; xi < 512; ++xi) {
      const cplx want = (xi == lambda || xi == -lambda) ? cplx(oracle::pi, 0.0) : cplx{};
      ASSERT_LT(std::abs(s.at(xi) - want), 1e-12) << "lambda=" << lambda << " xi=" << xi;
    }
  }
}

TEST(Transform, SineHasCoefficientsMinusIPiAndIPi) {
  const TorusGrid g(64);
  const Spectrum s = transform(GridFunction::sample(g, [](double x) { return std::sin(5.0 * x); }));
  EXPECT_LT(std::abs(s.at(5) - cplx(0.0, -oracle::pi)), 1e-13);
  EXPECT_LT(std::abs(s.at(-5) - cplx(0.0, oracle::pi)), 1e-13);
  EXPECT_LT(std::abs(s.at(4)), 1e-13);
}

TEST(Transform, ConstantHasMeanTwoPi) {
  const TorusGrid g(32);
  const Spectrum s = transform(GridFunction::sample(g, [](double) { return 1.0; }));
  EXPECT_NEAR(s.at(0).real(), 2.0 * oracle::pi, 1e-13);
  for (std::int64_t xi = 1; xi < 16; ++xi)
    EXPECT_LT(std::abs(s.at(xi)), 1e-14);
}

TEST(Inverse, CosineFromTwoCoefficients) {
  const TorusGrid g(32);
  Spectrum s(g);
  s.set(1, oracle::pi);
  const GridFunction f = inverse(s);
  for (std::size_t m = 0; m < g.size(); ++m)
    EXPECT_NEAR(f[m], std::cos(g.point(m)), 1e-15);
}

TEST(Inverse, ZeroSpectrumGivesZero) {
  const GridFunction f = inverse(Spectrum(TorusGrid(16)));
  EXPECT_EQ(sup_norm(f), 0.0);
}

TEST(Inverse, RejectsImaginaryMean) {
  Spectrum s(TorusGrid(16));
  s.half()[0] = cplx(0.0, 1.0);
  EXPECT_THROW(inverse(s), std::invalid_argument);
}

TEST(Spectrum, FromFullRejectsNonHermitianInput) {
  const TorusGrid g(16);
  std::vector<cplx> c(16);
  c[8 + 3] = cplx(1.0, 2.0);
  EXPECT_THROW(Spectrum::from_full(g, c), std::invalid_argument);
  c[8 - 3] = cplx(1.0, -2.0);
  const Spectrum s = Spectrum::from_full(g, c);
  EXPECT_EQ(s.at(3), cplx(1.0, 2.0));
  EXPECT_EQ(s.at(-3), cplx(1.0, -2.0));
}

TEST(Inverse, RoundTripAgainstDirectSummation) {
  std::mt19937_64 rng(11);
  const TorusGrid g(16);
  const auto p = oracle::random_poly(rng, 7);
  Spectrum s(g);
  for (std::int64_t xi = 0; xi <= 7; ++xi)
    s.set(xi, p.at(xi));
  s.half()[0] = p.at(0).real();
  const GridFunction f = inverse(s);
  for (std::size_t m = 0; m < g.size(); ++m)
    EXPECT_NEAR(f[m], p(g.point(m)), 1e-12);
  const GridFunction back = inverse(transform(f));
  EXPECT_LT(max_diff(back, f), 1e-12);
}

TEST(Derivative, SineToCosine) {
  const TorusGrid g(32);
  const GridFunction d = derivative(GridFunction::sample(g, [](double x) { return std::sin(x); }));
  for (std::size_t m = 0; m < g.size(); ++m)
    EXPECT_NEAR(d[m], std::cos(g.point(m)), 1e-14);
}

TEST(Derivative, ConstantToZero) {
  const GridFunction d = derivative(GridFunction::sample(TorusGrid(32), [](double) { return 3.5; }));
  EXPECT_LT(sup_norm(d), 1e-14);
}

TEST(Derivative, SupNormOfHighCosineMatchesFiniteDifferences) {
  const TorusGrid g(256);
  const GridFunction d = derivative(GridFunction::sample(g, [](double x) { return std::cos(32.0 * x); }));
  // Centered differences of cos(32 x) on a grid refined 64 times.
  const std::size_t fine = 256 * 64;
  const double h = 2.0 * oracle::pi / fine;
  double fd = 0.0;
  for (std::size_t m = 0; m < fine; ++m) {
    const double x = m * h;
    fd = std::max(fd, std::abs((std::cos(32.0 * (x + h)) - std::cos(32.0 * (x - h))) / (2.0 * h)));
  }
  EXPECT_NEAR(sup_norm(d), 32.0, 1e-12);
  EXPECT_NEAR(sup_norm(d), fd, 32.0 * 1e-4);
}

TEST(Derivative, ZeroesTheNyquistMode) {
  Spectrum s(TorusGrid(16));
  s.half()[8] = 5.0;
  EXPECT_EQ(derivative(s).half()[8], cplx{});
}

TEST(Helmholtz, CosineEigenfunction) {
  const TorusGrid g(64);
  const GridFunction f = inverse(helmholtz_inverse(transform(
      GridFunction::sample(g, [](double x) { return std::cos(3.0 * x); }))));
  for (std::size_t m = 0; m < g.size(); ++m)
    EXPECT_NEAR(f[m], std::cos(3.0 * g.point(m)) / 10.0, 1e-15);
}

TEST(Helmholtz, ConstantUnchanged) {
  const GridFunction f =
      inverse(helmholtz_inverse(transform(GridFunction::sample(TorusGrid(16), [](double) { return 2.0; }))));
  EXPECT_NEAR(f[5], 2.0, 1e-15);
}

TEST(Helmholtz, ForwardOperatorUndoesInverse) {
  std::mt19937_64 rng(3);
  const TorusGrid g(128);
  const auto p = oracle::random_poly(rng, 40);
  const GridFunction f(g, p.sample(g.size()));
  const Spectrum l = helmholtz_inverse(transform(f));
  // (1 - d_xx) applied spectrally.
  Spectrum back = l;
  back -= derivative(derivative(l));
  EXPECT_LT(max_diff(inverse(back), f), 1e-12);
}

TEST(Helmholtz, CommutesWithDerivative) {
  std::mt19937_64 rng(4);
  const TorusGrid g(128);
  const Spectrum s = transform(GridFunction(g, oracle::random_poly(rng, 40).sample(128)));
  const GridFunction a = inverse(derivative(helmholtz_inverse(s)));
  const GridFunction b = inverse(helmholtz_inverse(derivative(s)));
  EXPECT_LT(max_diff(a, b), 1e-15);
}

TEST(DealiasedProduct, CosineSquared) {
  const TorusGrid g(32);
  const GridFunction c = GridFunction::sample(g, [](double x) { return std::cos(x); });
  const Spectrum s = dealiased_product_spectrum({&c, &c}, DealiasRule::quadratic);
  for (std::int64_t xi = 0; xi < 16; ++xi) {
    const double want = xi == 0 ? oracle::pi : (xi == 2 ? oracle::pi / 2.0 : 0.0);
    EXPECT_LT(std::abs(s.at(xi) - want), 1e-14) << xi;
  }
}

TEST(DealiasedProduct, TimesZeroIsZero) {
  std::mt19937_64 rng(5);
  const TorusGrid g(64);
  const GridFunction f(g, oracle::random_poly(rng, 10).sample(64));
  EXPECT_EQ(sup_norm(dealiased_product(f, GridFunction(g), DealiasRule::quadratic)), 0.0);
}

TEST(DealiasedProduct, MatchesExactConvolution) {
  std::mt19937_64 rng(6);
  const TorusGrid g(256);
  const auto p = oracle::random_poly(rng, 32);
  const auto q = oracle::random_poly(rng, 32);
  const auto pq = oracle::multiply(p, q);
  const Spectrum s = transform(dealiased_product(GridFunction(g, p.sample(256)), GridFunction(g, q.sample(256)),
                                                 DealiasRule::quadratic));
  for (std::int64_t xi = 0; xi < 128; ++xi)
    ASSERT_LT(std::abs(s.at(xi) - pq.at(xi)), 1e-12) << xi;
}

TEST(DealiasedProduct, TruncatesAboveTheRetentionCutoff) {
  const TorusGrid g(64);
  EXPECT_EQ(retained_max(g, DealiasRule::quadratic), 21);
  EXPECT_EQ(retained_max(g, DealiasRule::cubic), 15);
  const GridFunction c = GridFunction::sample(g, [](double x) { return std::cos(12.0 * x); });
  const Spectrum s = dealiased_product_spectrum({&c, &c}, DealiasRule::quadratic);
  EXPECT_LT(std::abs(s.at(24)), 1e-15);
  EXPECT_NEAR(s.at(0).real(), oracle::pi, 1e-13);
  const Spectrum t = dealiased_product_spectrum({&c, &c, &c}, DealiasRule::cubic);
  EXPECT_NEAR(t.at(12).real(), 3.0 * oracle::pi / 4.0, 1e-13);
  EXPECT_EQ(t.at(36), cplx{});
}

TEST(Norms, ParsevalIdentity) {
  std::mt19937_64 rng(8);
  const TorusGrid g(128);
  const GridFunction f(g, oracle::random_poly(rng, 50).sample(128));
  const double lhs = l2_energy(transform(f));
  const double rhs = std::pow(lp_norm(f, 2.0), 2.0);
  EXPECT_NEAR(lhs / rhs, 1.0, 1e-12);
}

TEST(Norms, LpNormsOfCosine) {
  const TorusGrid g(256);
  const GridFunction c = GridFunction::sample(g, [](double x) { return std::cos(x); });
  const GridFunction shifted = GridFunction::sample(g, [](double x) { return 2.0 + std::cos(x); });
  EXPECT_NEAR(lp_norm(shifted, 1.0), 4.0 * oracle::pi, 1e-12);
  EXPECT_NEAR(lp_norm(c, 2.0), std::sqrt(oracle::pi), 1e-12);
  EXPECT_NEAR(lp_norm(c, INFINITY), 1.0, 1e-15);
  EXPECT_THROW(lp_norm(c, 0.5), std::invalid_argument);
}

TEST(Norms, H1EnergyOfSineMode) {
  const TorusGrid g(64);
  const Spectrum s = transform(GridFunction::sample(g, [](double x) { return std::sin(3.0 * x); }));
  EXPECT_NEAR(h1_energy(s), 10.0 * oracle::pi, 1e-12);
}

TEST(Linearity, TransformDerivativeHelmholtz) {
  std::mt19937_64 rng(9);
  const TorusGrid g(64);
  const GridFunction f(g, oracle::random_poly(rng, 20).sample(64));
  const GridFunction h(g, oracle::random_poly(rng, 20).sample(64));
  const double a = 0.7, b = -1.3;
  const GridFunction comb = a * f + b * h;
  const Spectrum lhs = helmholtz_inverse(derivative(transform(comb)));
  const Spectrum rhs = a * helmholtz_inverse(derivative(transform(f))) + b * helmholtz_inverse(derivative(transform(h)));
  for (std::int64_t xi = -32; xi < 32; ++xi)
    EXPECT_LT(std::abs(lhs.at(xi) - rhs.at(xi)), 1e-13);
}

TEST(Hermitian, OperationsKeepRealFunctionsReal) {
  std::mt19937_64 rng(10);
  const TorusGrid g(64);
  const GridFunction f(g, oracle::random_poly(rng, 20).sample(64));
  const Spectrum s = helmholtz_inverse(derivative(transform(dealiased_product(f, f, DealiasRule::quadratic))));
  EXPECT_EQ(s.at(0).imag(), 0.0);
  EXPECT_EQ(s.half()[32], cplx{});
  EXPECT_NO_THROW(inverse(s));
}
