#ifndef CONVSPEC_NYSTROM_HPP
#define CONVSPEC_NYSTROM_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "convspec/error.hpp"
#include "convspec/kernels.hpp"
#include "convspec/numerics/eigen.hpp"
#include "convspec/numerics/quadrature.hpp"
#include "convspec/types.hpp"

namespace convspec::nystrom {

using numerics::Matrix;

/// Symmetrised Nystrom matrix B = D^{1/2} A D^{-1/2} together with D.
template <typename Real = double>
struct SymmetrisedMatrix {
  Matrix<Real> B;
  std::vector<Real> D;
};

/// A_lj = a w_j K(a (x_l - x_j)) on the N-point Gauss-Legendre rule, returned
/// in the symmetric form B_lj = a sqrt(w_l w_j) K(a (x_l - x_j)).
template <typename Real = double>
SymmetrisedMatrix<Real> build_matrix(const Kernel& kern, double a, int N) {
  if (!(a > 0)) throw DomainError("build_matrix: a must be positive");
  if (N < 2) throw DomainError("build_matrix: N must be at least 2");
  const auto rule = numerics::gauss_legendre<Real>(N);
  SymmetrisedMatrix<Real> out{Matrix<Real>(N), rule.weights};
  const Real ar = static_cast<Real>(a);
  for (int l = 0; l < N; ++l) {
    for (int j = 0; j <= l; ++j) {
      const Real arg = ar * (rule.nodes[l] - rule.nodes[j]);
      Real kv;
      if constexpr (std::is_same_v<Real, long double>) kv = kern.eval_long(arg);
      else kv = kern.eval(static_cast<double>(arg));
      const Real v = ar * std::sqrt(rule.weights[l] * rule.weights[j]) * kv;
      out.B(l, j) = out.B(j, l) = v;
    }
  }
  return out;
}

struct ParityClass {
  Parity parity;
  /// ||v -+ Rv|| / ||v|| for the chosen parity; R reflects x -> -x.
  double residual;
  /// Residual of the rejected parity.
  double other_residual;
  bool ambiguous;
};

/// Parity of values sampled at nodes symmetric about 0 (node j mirrors N-1-j).
inline ParityClass classify_parity(const std::vector<double>& values) {
  const std::size_t n = values.size();
  double norm = 0, re = 0, ro = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double v = values[j], r = values[n - 1 - j];
    norm += v * v;
    re += (v - r) * (v - r);
    ro += (v + r) * (v + r);
  }
  if (norm == 0) return {Parity::even, 0, 0, true};
  re = std::sqrt(re / norm);
  ro = std::sqrt(ro / norm);
  const bool even = re <= ro;
  const double res = even ? re : ro, other = even ? ro : re;
  return {even ? Parity::even : Parity::odd, res, other, res > 0.1};
}

struct NystromSolution {
  Kernel kernel;
  double a = 0;
  int N = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  /// Descending.
  std::vector<double> lambda;
  std::vector<Parity> parity;
  std::vector<double> parity_residual;
  std::vector<bool> parity_ambiguous;
  /// Below 1e2 * eps * lambda_1: not trustworthy.
  std::vector<bool> below_noise_floor;
  /// values[l][j] = phi_l(x_j), with sum_j w_j phi_l(x_j)^2 = 1.
  std::vector<std::vector<double>> values;

  std::size_t size() const { return lambda.size(); }
};

namespace detail {

inline long double interpolate_raw(const Kernel& kern, double a, const std::vector<double>& nodes,
                                   const std::vector<double>& weights, const std::vector<double>& phi, long double lambda,
                                   double x) {
  long double s = 0;
  const long double al = a;
  for (std::size_t j = 0; j < nodes.size(); ++j)
    s += static_cast<long double>(weights[j]) * kern.eval_long(al * (x - static_cast<long double>(nodes[j]))) * phi[j];
  return al * s / lambda;
}

}  // namespace detail

/// phi_l(x) = (a / lambda_l) sum_j w_j K(a (x - x_j)) phi_l(x_j) on [-1, 1].
inline double interpolate(const NystromSolution& sol, std::size_t l, double x) {
  if (l >= sol.size()) throw DomainError("interpolate: eigen-index not retained");
  if (!(std::abs(x) <= 1)) throw DomainError("interpolate: x outside [-1, 1]");
  const auto it = std::lower_bound(sol.nodes.begin(), sol.nodes.end(), x);
  if (it != sol.nodes.end() && *it == x) return sol.values[l][static_cast<std::size_t>(it - sol.nodes.begin())];
  return static_cast<double>(
      detail::interpolate_raw(sol.kernel, sol.a, sol.nodes, sol.weights, sol.values[l], sol.lambda[l], x));
}

/// Retained eigenpair count by interval size: 60 for a >= 5, 20 for a >= 0.5,
/// 10 below.
inline int default_retained(double a) { return a >= 5 ? 60 : (a >= 0.5 ? 20 : 10); }

/// Eigenpairs of the rescaled problem a int_{-1}^{1} K(a(x - t)) phi(t) dt = lambda phi(x).
///
/// The matrix is assembled in extended precision and split into even and odd
/// blocks by the reflection basis, which keeps parities exact and separates
/// the two interlaced halves of the spectrum.
inline NystromSolution solve(const Kernel& kern, double a, int N = 100, int n_max = 60) {
  if (n_max < 1 || n_max > N) throw DomainError("nystrom::solve: need 1 <= n_max <= N");
  using LD = long double;
  const auto sym = build_matrix<LD>(kern, a, N);
  const auto rule = numerics::gauss_legendre<LD>(N);
  const int half = N / 2;
  const bool centre = N % 2 == 1;
  const int c = half;
  const LD r2 = std::sqrt(LD(2));

  struct Pair {
    LD value;
    Parity parity;
    std::vector<LD> v;  // eigenvector of B
  };
  std::vector<Pair> pairs;

  for (const Parity par : {Parity::even, Parity::odd}) {
    const LD sgn = par == Parity::even ? 1 : -1;
    const int m = half + (par == Parity::even && centre ? 1 : 0);
    Matrix<LD> blk(m);
    for (int i = 0; i < half; ++i)
      for (int j = 0; j < half; ++j) blk(i, j) = sym.B(i, j) + sgn * sym.B(i, N - 1 - j);
    if (par == Parity::even && centre) {
      for (int i = 0; i < half; ++i) blk(i, half) = blk(half, i) = r2 * sym.B(i, c);
      blk(half, half) = sym.B(c, c);
    }
    const auto eig = numerics::sym_eigen(blk);
    for (int k = 0; k < m; ++k) {
      std::vector<LD> v(N, 0);
      const auto& y = eig.vectors[k];
      for (int i = 0; i < half; ++i) {
        v[i] = y[i] / r2;
        v[N - 1 - i] = sgn * y[i] / r2;
      }
      if (par == Parity::even && centre) v[c] = y[half];
      pairs.push_back({eig.values[k], par, std::move(v)});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.value > y.value; });

  NystromSolution sol;
  sol.kernel = kern;
  sol.a = a;
  sol.N = N;
  for (int j = 0; j < N; ++j) {
    sol.nodes.push_back(static_cast<double>(rule.nodes[j]));
    sol.weights.push_back(static_cast<double>(rule.weights[j]));
  }
  const double floor = 1e2 * std::numeric_limits<double>::epsilon() * static_cast<double>(pairs.front().value);
  for (int l = 0; l < n_max; ++l) {
    const auto& p = pairs[l];
    std::vector<double> phi(N);
    for (int j = 0; j < N; ++j) phi[j] = static_cast<double>(p.v[j] / std::sqrt(rule.weights[j]));
    const LD end = detail::interpolate_raw(kern, a, sol.nodes, sol.weights, phi, p.value, 1.0);
    if (end < 0)
      for (double& v : phi) v = -v;
    const auto cls = classify_parity(phi);
    sol.lambda.push_back(static_cast<double>(p.value));
    sol.parity.push_back(p.parity);
    sol.parity_residual.push_back(cls.parity == p.parity ? cls.residual : cls.other_residual);
    sol.parity_ambiguous.push_back(cls.ambiguous || cls.parity != p.parity);
    sol.below_noise_floor.push_back(static_cast<double>(p.value) < floor);
    sol.values.push_back(std::move(phi));
  }
  return sol;
}

/// Indices of the retained eigenpairs of one parity, in descending lambda.
inline std::vector<std::size_t> indices_of(const NystromSolution& sol, Parity p) {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < sol.size(); ++l)
    if (sol.parity[l] == p) out.push_back(l);
  return out;
}

}  // namespace convspec::nystrom

#endif  // CONVSPEC_NYSTROM_HPP
