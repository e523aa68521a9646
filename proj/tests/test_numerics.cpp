#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "convspec/error.hpp"
#include "convspec/kernels.hpp"
#include "convspec/large_interval.hpp"
#include "convspec/numerics/bessel.hpp"
#include "convspec/numerics/eigen.hpp"
#include "convspec/numerics/hilbert.hpp"
#include "convspec/numerics/oscillatory.hpp"
#include "convspec/numerics/quadrature.hpp"
#include "convspec/numerics/roots.hpp"

using namespace convspec;
using namespace convspec::numerics;
using std::numbers::pi;

TEST(GaussLegendre, OnePoint) {
  const auto r = gauss_legendre(1);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r.nodes[0], 0.0, 1e-15);
  EXPECT_NEAR(r.weights[0], 2.0, 1e-15);
}

TEST(GaussLegendre, TwoPoint) {
  const auto r = gauss_legendre(2);
  EXPECT_NEAR(std::abs(r.nodes[0]), 1 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(r.nodes[0], -r.nodes[1], 1e-15);
  EXPECT_NEAR(r.weights[0], 1.0, 1e-15);
  EXPECT_NEAR(r.weights[1], 1.0, 1e-15);
}

TEST(GaussLegendre, FivePointEighthMoment) {
  const auto r = gauss_legendre(5);
  EXPECT_NEAR(r.integrate([](double x) { return std::pow(x, 8); }, -1.0, 1.0), 2.0 / 9, 1e-14);
}

TEST(GaussLegendre, ExactOnMonomialsUpToDegree2Nm1) {
  for (int n : {3, 8, 20, 64}) {
    const auto r = gauss_legendre(n);
    for (int j = 0; j <= 2 * n - 1; ++j) {
      const double exact = j % 2 ? 0.0 : 2.0 / (j + 1);
      EXPECT_NEAR(r.integrate([j](double x) { return std::pow(x, j); }, -1.0, 1.0), exact, 1e-13) << "n=" << n << " j=" << j;
    }
  }
}

TEST(GaussLegendre, LongDoubleWeightsSumToTwo) {
  const auto r = gauss_legendre<long double>(100);
  long double s = 0;
  for (auto w : r.weights) s += w;
  EXPECT_NEAR(static_cast<double>(s - 2), 0.0, 1e-17);
}

TEST(GaussLegendre, InvalidOrderThrows) { EXPECT_THROW(gauss_legendre(0), DomainError); }

TEST(Legendre, LowOrders) {
  for (double x : {-0.7, 0.0, 0.4, 1.0}) EXPECT_DOUBLE_EQ(legendre_P(0, x), 1.0);
  EXPECT_NEAR(legendre_P(2, 0.5), -0.125, 1e-15);
}

TEST(Legendre, P10AgainstCoefficientExpansion) {
  // P10(x) = (46189x^10 - 109395x^8 + 90090x^6 - 30030x^4 + 3465x^2 - 63) / 256
  const double x = 0.3, x2 = x * x;
  const double closed =
      (((((46189 * x2 - 109395) * x2 + 90090) * x2 - 30030) * x2 + 3465) * x2 - 63) / 256;
  EXPECT_NEAR(legendre_P(10, x), closed, 1e-14);
}

TEST(Legendre, DerivativeMatchesFiniteDifference) {
  for (int n : {1, 4, 9}) {
    const double x = 0.37, h = 1e-6;
    const double fd = (legendre_P(n, x + h) - legendre_P(n, x - h)) / (2 * h);
    EXPECT_NEAR(legendre_P_d1(n, x), fd, 1e-7);
  }
}

namespace {
double bessel_integral(int nu, double x) {
  const auto r = composite_gauss_legendre(0.0, 8.0, 64, 16);
  double s = 0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::exp(-x * std::cosh(r.nodes[i])) * std::cosh(nu * r.nodes[i]);
  return s;
}
}  // namespace

TEST(Bessel, SmallArgumentLimit) {
  for (double x : {1e-3, 1e-5, 1e-7}) EXPECT_NEAR(x * bessel_k1(x), 1.0, 1e-5);
}

TEST(Bessel, IntegralRepresentationAtOne) {
  EXPECT_NEAR(bessel_k0(1.0), bessel_integral(0, 1.0), 1e-10);
  EXPECT_NEAR(bessel_k1(1.0), bessel_integral(1, 1.0), 1e-10);
}

TEST(Bessel, IntegralRepresentationAcrossBranchSwitch) {
  for (double x : {0.1, 1.9, 2.0, 2.1, 5.0, 12.0}) {
    EXPECT_NEAR(bessel_k0(x) / bessel_integral(0, x), 1.0, 1e-10) << x;
    EXPECT_NEAR(bessel_k1(x) / bessel_integral(1, x), 1.0, 1e-10) << x;
  }
}

TEST(Bessel, OrderMonotonicityAtTen) { EXPECT_LT(bessel_k0(10) / bessel_k1(10), 1.0); }

TEST(Bessel, MonotoneDecreaseOnGrid) {
  double p0 = bessel_k0(0.01), p1 = bessel_k1(0.01);
  for (int i = 1; i <= 1000; ++i) {
    const double x = 0.01 + 50.0 * i / 1000;
    const double k0 = bessel_k0(x), k1 = bessel_k1(x);
    EXPECT_LT(k0, p0);
    EXPECT_LT(k1, p1);
    p0 = k0;
    p1 = k1;
  }
}

TEST(Bessel, NonPositiveArgumentThrows) {
  EXPECT_THROW(bessel_k0(0.0), DomainError);
  EXPECT_THROW(bessel_k1(-1.0), DomainError);
}

TEST(SymEigen, TwoByTwo) {
  Matrix<double> a(2);
  a(0, 0) = a(1, 1) = 2;
  a(0, 1) = a(1, 0) = 1;
  const auto e = sym_eigen(a);
  EXPECT_NEAR(e.values[0], 1.0, 1e-15);
  EXPECT_NEAR(e.values[1], 3.0, 1e-15);
}

TEST(SymEigen, Identity) {
  const auto e = sym_eigen(Matrix<double>::identity(5));
  for (int i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(e.values[i], 1.0);
    for (int j = 0; j < 5; ++j) {
      double d = 0;
      for (int r = 0; r < 5; ++r) d += e.vectors[i][r] * e.vectors[j][r];
      EXPECT_NEAR(d, i == j ? 1.0 : 0.0, 1e-15);
    }
  }
}

TEST(SymEigen, RandomResiduals) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  const int n = 20;
  Matrix<double> a(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) a(i, j) = a(j, i) = u(rng);
  const auto e = sym_eigen(a);
  for (int k = 0; k < n; ++k) {
    double res = 0;
    for (int i = 0; i < n; ++i) {
      double s = -e.values[k] * e.vectors[k][i];
      for (int j = 0; j < n; ++j) s += a(i, j) * e.vectors[k][j];
      res += s * s;
    }
    EXPECT_LT(std::sqrt(res), 1e-10);
    if (k > 0) {
      EXPECT_LE(e.values[k - 1], e.values[k]);
    }
  }
}

TEST(SymEigen, NonSymmetricThrows) {
  Matrix<double> a(2);
  a(0, 1) = 1;
  EXPECT_THROW(sym_eigen(a), DomainError);
}

TEST(SymEigen, SimilarityInvariance) {
  // Eigenpairs of W^{1/2} K W^{1/2}, mapped back by W^{-1/2}, are eigenpairs
  // of the non-symmetric K W.
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.5, 2);
  const int n = 12;
  Matrix<double> k(n), b(n);
  std::vector<double> w(n);
  for (auto& v : w) v = u(rng);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k(i, j) = std::exp(-0.7 * std::abs(i - j));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = std::sqrt(w[i]) * k(i, j) * std::sqrt(w[j]);
  const auto e = sym_eigen(b);
  for (int m = 0; m < n; ++m) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = e.vectors[m][i] / std::sqrt(w[i]);
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += k(i, j) * w[j] * x[j];
      EXPECT_NEAR(s, e.values[m] * x[i], 1e-10);
    }
  }
}

TEST(TridiagEigen, ClosedForm) {
  SymTridiag<double> t{{2, 2, 2}, {-1, -1}};
  const auto e = tridiag_eigen(t, 3);
  EXPECT_NEAR(e.values[0], 2 - std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(e.values[1], 2.0, 1e-14);
  EXPECT_NEAR(e.values[2], 2 + std::sqrt(2.0), 1e-14);
}

TEST(TridiagEigen, SizeOne) {
  SymTridiag<double> t{{4.5}, {}};
  EXPECT_DOUBLE_EQ(tridiag_eigen(t, 1).values[0], 4.5);
}

TEST(TridiagEigen, FiftyAgainstDense) {
  SymTridiag<double> t;
  for (int i = 0; i < 50; ++i) t.diag.push_back(i * (i + 1.0));
  for (int i = 0; i < 49; ++i) t.offdiag.push_back(1.0 + 0.1 * i);
  const auto e = tridiag_eigen(t, 10);
  const auto d = sym_eigen(t.dense());
  ASSERT_EQ(e.values.size(), 10u);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(e.values[i], d.values[i], 1e-10 * std::max(1.0, d.values[i]));
}

TEST(TridiagEigen, BadShapeThrows) {
  SymTridiag<double> t{{1, 2}, {}};
  EXPECT_THROW(tridiag_eigen(t, 1), DomainError);
}

namespace {
double poisson(double t) { return 1 / (1 + t * t); }
}  // namespace

TEST(Hilbert, PoissonPairAtOne) { EXPECT_NEAR(hilbert_transform(poisson, 1.0), 0.5, 1e-12); }

TEST(Hilbert, PoissonPairGrid) {
  for (double k : {-20.0, -2.0, -0.5, 0.1, 0.7, 3.0, 40.0, 1000.0}) {
    EXPECT_NEAR(hilbert_transform(poisson, k), k / (1 + k * k), 1e-10) << k;
    EXPECT_NEAR(hilbert_transform([](double t) { return t / (1 + t * t); }, k), -1 / (1 + k * k), 1e-10) << k;
  }
}

TEST(Hilbert, EvenFunctionVanishesAtZero) {
  EXPECT_NEAR(hilbert_transform([](double t) { return std::exp(-t * t); }, 0.0), 0.0, 1e-14);
}

TEST(Hilbert, OddSymmetryForEvenInput) {
  auto f = [](double t) { return std::exp(-std::abs(t)) / (1 + t * t); };
  for (double k : {0.2, 0.9, 2.5, 7.0}) EXPECT_LT(std::abs(hilbert_transform(f, k) + hilbert_transform(f, -k)), 1e-7);
}

TEST(Hilbert, Linearity) {
  auto g = [](double t) { return std::exp(-t * t); };
  for (double k : {0.3, 1.7}) {
    const double lhs = hilbert_transform([&](double t) { return 2 * poisson(t) - 3 * g(t); }, k);
    EXPECT_NEAR(lhs, 2 * hilbert_transform(poisson, k) - 3 * hilbert_transform(g, k), 1e-10);
  }
}

TEST(Hilbert, LogGSelfConvergenceAndIndependentOracle) {
  const Kernel k = builtin_power32();
  auto logG = [&](double t) { return std::log(large::G_eval(k, t, 1.0)); };
  HilbertConfig c1;
  c1.breakpoints = {0.0, 1.0, -1.0};
  HilbertConfig c2 = c1;
  c2.order *= 2;
  const double h1 = hilbert_transform(logG, 2.0, c1), h2 = hilbert_transform(logG, 2.0, c2);
  EXPECT_NEAR(h1, h2, 1e-6);
  // Trapezoid in s = log t of the folded integrand, an independent route.
  const double ds = 2e-3;
  double s = 0;
  for (double u = -30; u <= 12; u += ds) {
    const double t = std::exp(u);
    s += (logG(2 - t) - logG(2 + t)) * ds;
  }
  EXPECT_NEAR(h1, s / pi, 1e-6);
}

TEST(Hilbert, NonFiniteSampleThrows) {
  EXPECT_THROW(hilbert_transform([](double) { return std::nan(""); }, 1.0), DomainError);
}

TEST(Oscillatory, GaussianSelfTransform) {
  const auto v = oscillatory_integral([](double k) { return std::exp(-pi * k * k); }, 0.5);
  EXPECT_NEAR(v.real(), std::exp(-pi * 0.25), 1e-12);
  EXPECT_NEAR(v.imag(), 0.0, 1e-12);
}

TEST(Oscillatory, PoissonPair) {
  const auto v = oscillatory_integral([](double k) { return 1 / (pi * (1 + k * k)); }, 1.0);
  EXPECT_NEAR(v.real(), std::exp(-2 * pi), 1e-9);
}

TEST(Oscillatory, CorrectionIntegrandStableUnderCutoffDoubling) {
  const Kernel k = builtin_power32();
  const double a = 10;
  const auto root = large::solve_branch(k, a, Parity::even, 0);
  const large::FactorisationCache cache(k, root.kappa, 400);
  auto g = [&](double q) {
    return std::exp(std::complex<double>(0, 2 * pi * q * a)) * cache.t0(q) / (std::complex<double>(q, 1) * cache.x_plus(q));
  };
  OscillatoryConfig c1;
  c1.k_max = 100;
  OscillatoryConfig c2 = c1;
  c2.k_max = 200;
  const auto v1 = oscillatory_integral(g, 0.0, c1), v2 = oscillatory_integral(g, 0.0, c2);
  EXPECT_LT(std::abs(v1 - v2), 1e-7);
}

TEST(Roots, SquareRootOfTwo) { EXPECT_NEAR(find_root([](double x) { return x * x - 2; }, 1, 2), std::sqrt(2.0), 1e-14); }

TEST(Roots, SinePi) { EXPECT_NEAR(find_root([](double x) { return std::sin(x); }, 3, 4), pi, 1e-14); }

TEST(Roots, NewtonSafeguarded) {
  const double r = find_root_newton([](double x) { return std::exp(x) - 3; }, [](double x) { return std::exp(x); }, -5, 5);
  EXPECT_NEAR(r, std::log(3.0), 1e-14);
}

TEST(Roots, MissingBracketThrows) {
  EXPECT_THROW(find_root([](double x) { return x * x + 1; }, -1, 1), BracketError);
}
