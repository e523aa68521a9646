#ifndef CONVSPEC_NUMERICS_QUADRATURE_HPP
#define CONVSPEC_NUMERICS_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "convspec/error.hpp"

namespace convspec::numerics {

/// Gauss-Legendre rule on [-1, 1]; nodes ascending, weights positive.
template <typename Real = double>
struct QuadratureRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;

  std::size_t size() const noexcept { return nodes.size(); }

  /// Integrates f over [lo, hi] by the affine image of the rule.
  template <typename F>
  auto integrate(F&& f, Real lo, Real hi) const {
    const Real half = (hi - lo) / 2;
    const Real mid = (hi + lo) / 2;
    using Out = decltype(f(mid));
    Out sum{};
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
    return sum * half;
  }
};

/// Legendre polynomial P_n(x) by the three-term recurrence.
template <typename Real>
Real legendre_P(int n, Real x) {
  if (n < 0) throw DomainError("legendre_P: negative degree");
  if (n == 0) return Real(1);
  Real p0 = 1, p1 = x;
  for (int k = 1; k < n; ++k) {
    const Real p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

/// P_n'(x); uses the closed form at x = +-1 where the recurrence formula is 0/0.
template <typename Real>
Real legendre_P_d1(int n, Real x) {
  if (n < 0) throw DomainError("legendre_P_d1: negative degree");
  if (n == 0) return Real(0);
  if (x == Real(1) || x == Real(-1)) {
    const Real sign = (x < 0 && n % 2 == 0) ? Real(-1) : Real(1);
    return sign * Real(n) * Real(n + 1) / 2;
  }
  // n (x P_n - P_{n-1}) / (x^2 - 1)
  Real p0 = 1, p1 = x;
  for (int k = 1; k < n; ++k) {
    const Real p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
    p0 = p1;
    p1 = p2;
  }
  return Real(n) * (x * p1 - p0) / (x * x - 1);
}

/// N-point Gauss-Legendre rule. Nodes are Newton-refined roots of P_N started
/// from Chebyshev-like guesses; weights are 2 / ((1 - x^2) P_N'(x)^2).
template <typename Real = double>
QuadratureRule<Real> gauss_legendre(int n) {
  if (n < 1 || n > 10000) throw DomainError("gauss_legendre: order must lie in [1, 10000]");
  QuadratureRule<Real> rule;
  rule.nodes.assign(static_cast<std::size_t>(n), Real(0));
  rule.weights.assign(static_cast<std::size_t>(n), Real(0));
  const Real pi = std::numbers::pi_v<Real>;
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    Real x = std::cos(pi * (Real(i) + Real(0.75)) / (Real(n) + Real(0.5)));
    Real dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Real p0 = 1, p1 = x;
      for (int k = 1; k < n; ++k) {
        const Real p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = Real(n) * (x * p1 - p0) / (x * x - 1);
      const Real dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 4 * std::numeric_limits<Real>::epsilon() * std::abs(x) ||
          std::abs(dx) < std::numeric_limits<Real>::min()) {
        // one more derivative evaluation at the converged point
        p0 = 1;
        p1 = x;
        for (int k = 1; k < n; ++k) {
          const Real p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
          p0 = p1;
          p1 = p2;
        }
        if (n == 1) p0 = 1;
        dp = Real(n) * (x * p1 - p0) / (x * x - 1);
        break;
      }
    }
    const Real w = 2 / ((1 - x * x) * dp * dp);
    // i-th guess is the i-th largest root
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    rule.weights[static_cast<std::size_t>(i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0;
  return rule;
}

/// Process-wide cache of double-precision rules; safe for concurrent use.
inline std::shared_ptr<const QuadratureRule<double>> cached_gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const QuadratureRule<double>>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto rule = std::make_shared<const QuadratureRule<double>>(gauss_legendre<double>(n));
  cache.emplace(n, rule);
  return rule;
}

/// Nodes and weights of a composite rule: [lo, hi] cut into `panels` equal
/// pieces with the given per-panel order.
struct CompositeRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline CompositeRule composite_gauss_legendre(double lo, double hi, int panels, int order = 16) {
  if (panels < 1) throw DomainError("composite_gauss_legendre: need at least one panel");
  const auto rule = cached_gauss_legendre(order);
  CompositeRule out;
  out.nodes.reserve(static_cast<std::size_t>(panels * order));
  out.weights.reserve(static_cast<std::size_t>(panels * order));
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    const double mid = a + h / 2;
    for (std::size_t i = 0; i < rule->size(); ++i) {
      out.nodes.push_back(mid + h / 2 * rule->nodes[i]);
      out.weights.push_back(h / 2 * rule->weights[i]);
    }
  }
  return out;
}

}  // namespace convspec::numerics

#endif  // CONVSPEC_NUMERICS_QUADRATURE_HPP
