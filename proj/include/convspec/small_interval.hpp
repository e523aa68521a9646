#ifndef CONVSPEC_SMALL_INTERVAL_HPP
#define CONVSPEC_SMALL_INTERVAL_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

#include "convspec/error.hpp"
#include "convspec/kernels.hpp"
#include "convspec/numerics/eigen.hpp"
#include "convspec/numerics/quadrature.hpp"
#include "convspec/types.hpp"

namespace convspec::small {

/// A real or purely imaginary number stored as its modulus plus a flag;
/// only the square enters the real formulas.
struct Param {
  double value = 0;
  bool imaginary = false;

  double squared() const { return imaginary ? -value * value : value * value; }
  static Param from_squared(double sq) { return {std::sqrt(std::abs(sq)), sq < 0}; }
};

/// K_{C,b,c}(a x) = C sin(a b x) / sin(a c x). C is carried through its value
/// at x = 0, C b / c, which is real whenever the kernel is.
struct ApproximantParams {
  double C0 = 1;
  Param b;
  Param c;
  double a = 1;
};

namespace detail {

/// sin(beta t) / beta continued to imaginary beta (sinh) and beta = 0.
inline double scaled_sin(double beta_sq, double t) {
  if (beta_sq > 0) {
    const double r = std::sqrt(beta_sq);
    return std::sin(r * t) / r;
  }
  if (beta_sq < 0) {
    const double r = std::sqrt(-beta_sq);
    return std::sinh(r * t) / r;
  }
  return t;
}

}  // namespace detail

inline void check_params(const ApproximantParams& p) {
  if (!(p.a > 0)) throw DomainError("approximant: a must be positive");
  if (!p.c.imaginary && p.c.value * p.a >= std::numbers::pi)
    throw DomainError("approximant: real c must satisfy |c| < pi / a");
}

/// Value of the approximant at the rescaled point x, i.e. K_{C,b,c}(a x).
inline double kernel_family_eval(const ApproximantParams& p, double x) {
  const double t = p.a * x;
  if (t == 0) return p.C0;
  const double den = detail::scaled_sin(p.c.squared(), t);
  if (!p.c.imaginary && std::abs(p.c.value * t) >= std::numbers::pi)
    throw DomainError("kernel_family_eval: sin(a c x) vanishes inside the interval");
  return p.C0 * detail::scaled_sin(p.b.squared(), t) / den;
}

/// K''(0): analytic if the kernel provides it, else Richardson-extrapolated
/// central differences.
inline double second_derivative_at_0(const Kernel& k) {
  if (k.d2_at_0) return *k.d2_at_0;
  if (k.eval_d2) return k.eval_d2(0.0);
  auto d2 = [&](double h) { return (k.eval(h) - 2 * k.eval(0.0) + k.eval(-h)) / (h * h); };
  const double h = 1e-2;
  return (4 * d2(h / 2) - d2(h)) / 3;
}

/// K''''(0) by central differences of K'' with Richardson extrapolation over
/// steps 1e-2 and 5e-3, unless the kernel provides it.
inline double fourth_derivative_at_0(const Kernel& k) {
  if (k.d4_at_0) return *k.d4_at_0;
  std::function<double(double)> d2 = k.eval_d2;
  if (!d2) {
    d2 = [&k](double x) {
      const double h = 1e-3;
      return (-k.eval(x + 2 * h) + 16 * k.eval(x + h) - 30 * k.eval(x) + 16 * k.eval(x - h) - k.eval(x - 2 * h)) /
             (12 * h * h);
    };
  }
  auto d4 = [&](double h) { return (d2(h) - 2 * d2(0.0) + d2(-h)) / (h * h); };
  return (4 * d4(5e-3) - d4(1e-2)) / 3;
}

/// Matches K(0) and K''(0) for a chosen c: b^2 = c^2 - 3 K''(0) / K(0).
inline ApproximantParams match_order1(const Kernel& kern, Param c, double a) {
  const double k0 = kern.eval(0.0);
  if (k0 == 0) throw DomainError("match_order1: K(0) = 0");
  const double k2 = second_derivative_at_0(kern);
  ApproximantParams p{k0, Param::from_squared(c.squared() - 3 * k2 / k0), c, a};
  check_params(p);
  return p;
}

/// Matches K(0), K''(0) and K''''(0).
inline ApproximantParams match_order2(const Kernel& kern, double a) {
  const double k0 = kern.eval(0.0);
  const double k2 = second_derivative_at_0(kern);
  if (k2 == 0) throw DomainError("match_order2: K''(0) = 0");
  if (k0 == 0) throw DomainError("match_order2: K(0) = 0");
  const double k4 = fourth_derivative_at_0(kern);
  const double den = 4 * k0 * k2;
  ApproximantParams p{k0, Param::from_squared((5 * k0 * k4 - 21 * k2 * k2) / den),
                      Param::from_squared((5 * k0 * k4 - 9 * k2 * k2) / den), a};
  check_params(p);
  return p;
}

/// sqrt(-3 K''(0) / K(0)) a.
inline double bandwidth(const Kernel& kern, double a) {
  const double k0 = kern.eval(0.0), k2 = second_derivative_at_0(kern);
  const double r = -3 * k2 / k0;
  if (!(r >= 0)) throw DomainError("bandwidth: K''(0) / K(0) must be non-positive");
  return a * std::sqrt(r);
}

/// Eigenfunctions stored as coefficients in the orthonormal Legendre basis
/// sqrt((2k + 1) / 2) P_k.
struct LegendreSeries {
  std::vector<long double> coeffs;

  template <typename Real>
  Real eval(Real x) const {
    Real p0 = 1, p1 = x, s = 0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      Real pk;
      if (k == 0) {
        pk = 1;
      } else if (k == 1) {
        pk = x;
      } else {
        pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      s += static_cast<Real>(coeffs[k]) * pk * std::sqrt(static_cast<Real>(2 * k + 1) / 2);
    }
    return s;
  }
  double operator()(double x) const { return static_cast<double>(eval<long double>(x)); }
};

struct PswfSolution {
  double c_eff = 0;
  /// chi_0 < chi_1 < ...; entry n - 1 belongs to ordinal n.
  std::vector<double> chi;
  std::vector<Parity> parity;
  std::vector<LegendreSeries> functions;
};

namespace detail {

inline void fix_sign(std::vector<long double>& coeffs) {
  // phi(1) = sum coeffs_k sqrt((2k+1)/2) since P_k(1) = 1.
  long double end = 0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) end += coeffs[k] * std::sqrt((2 * k + 1) / 2.0L);
  if (end < 0)
    for (long double& v : coeffs) v = -v;
}

inline void check_tail(const std::vector<long double>& coeffs, const char* who) {
  long double mx = 0;
  for (const long double v : coeffs) mx = std::max(mx, std::abs(v));
  // Last two entries cover both parities.
  const std::size_t m = coeffs.size();
  const long double last = std::max(std::abs(coeffs[m - 1]), m > 1 ? std::abs(coeffs[m - 2]) : 0.0L);
  if (last > 1e-12 * mx) {
    std::ostringstream os;
    os << who << ": basis too small (trailing coefficient " << static_cast<double>(last / mx) << " of max)";
    throw ResolutionError(os.str());
  }
}

template <typename Assemble>
PswfSolution parity_split_solve(int n_max, int M, Assemble&& block_eigs) {
  struct Item {
    double chi;
    Parity parity;
    std::vector<long double> coeffs;
  };
  std::vector<Item> items;
  for (const Parity par : {Parity::even, Parity::odd}) {
    const int first = par == Parity::even ? 0 : 1;
    std::vector<int> ks;
    for (int k = first; k < M; k += 2) ks.push_back(k);
    const auto eig = block_eigs(ks);
    const int want = (n_max + (par == Parity::even ? 1 : 0)) / 2;
    for (int j = 0; j < want && j < static_cast<int>(eig.values.size()); ++j) {
      std::vector<long double> full(M, 0.0L);
      for (std::size_t i = 0; i < ks.size(); ++i) full[ks[i]] = eig.vectors[j][i];
      fix_sign(full);
      items.push_back({static_cast<double>(eig.values[j]), par, std::move(full)});
    }
  }
  std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) { return x.chi < y.chi; });
  PswfSolution sol;
  for (int n = 0; n < n_max && n < static_cast<int>(items.size()); ++n) {
    sol.chi.push_back(items[n].chi);
    sol.parity.push_back(items[n].parity);
    sol.functions.push_back({std::move(items[n].coeffs)});
  }
  return sol;
}

}  // namespace detail

/// Bounded solutions of ((1 - x^2) phi')' + (chi - c^2 x^2) phi = 0 by a
/// Legendre-Galerkin method; each parity class is tridiagonal.
inline PswfSolution pswf_solve(double c_eff, int n_max, int M) {
  if (n_max < 1) throw DomainError("pswf_solve: n_max must be positive");
  if (M < 2 * n_max + 30) throw DomainError("pswf_solve: need M >= 2 n_max + 30");
  const long double c2 = static_cast<long double>(c_eff) * c_eff;
  // Extended precision keeps the small eigenvalues of the matching integral
  // operator resolvable from the coefficients.
  auto block = [&](const std::vector<int>& ks) {
    numerics::SymTridiag<long double> t;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const long double k = ks[i];
      t.diag.push_back(k * (k + 1) + c2 * (2 * k * k + 2 * k - 1) / ((2 * k - 1) * (2 * k + 3)));
      if (i + 1 < ks.size())
        t.offdiag.push_back(c2 * (k + 1) * (k + 2) / ((2 * k + 3) * sqrtl((2 * k + 1) * (2 * k + 5))));
    }
    return numerics::tridiag_eigen(t, ks.size());
  };
  auto sol = detail::parity_split_solve(n_max, M, block);
  sol.c_eff = c_eff;
  for (const auto& f : sol.functions) detail::check_tail(f.coeffs, "pswf_solve");
  return sol;
}

/// Eigenpairs of -((1 - p) phi')' + a^2 (b^2 - c^2) p phi = mu phi with
/// p(x) = sin^2(a c x) / sin^2(a c), by Legendre-Galerkin with quadrature
/// assembly.
inline PswfSolution sturm_liouville_solve(const ApproximantParams& prm, int n_max, int M) {
  check_params(prm);
  if (n_max < 1) throw DomainError("sturm_liouville_solve: n_max must be positive");
  if (M < 2 * n_max + 30) throw DomainError("sturm_liouville_solve: need M >= 2 n_max + 30");
  const double a = prm.a, c2 = prm.c.squared();
  const double coupling = a * a * (prm.b.squared() - c2);
  const double pend = detail::scaled_sin(c2, a);
  auto p_of = [&](double x) {
    const double s = detail::scaled_sin(c2, a * x) / pend;
    return s * s;
  };

  auto assemble = [&](int q) {
    const auto rule = numerics::gauss_legendre<double>(q);
    std::vector<std::vector<double>> P(M, std::vector<double>(q)), D(M, std::vector<double>(q));
    for (int i = 0; i < q; ++i) {
      const double x = rule.nodes[i];
      for (int k = 0; k < M; ++k) {
        const double nrm = std::sqrt((2 * k + 1) / 2.0);
        P[k][i] = nrm * numerics::legendre_P(k, x);
        D[k][i] = nrm * numerics::legendre_P_d1(k, x);
      }
    }
    std::vector<double> w1(q), w2(q);
    for (int i = 0; i < q; ++i) {
      const double pv = p_of(rule.nodes[i]);
      w1[i] = rule.weights[i] * (1 - pv);
      w2[i] = rule.weights[i] * coupling * pv;
    }
    numerics::Matrix<double> A(M);
    for (int r = 0; r < M; ++r)
      for (int s = r; s < M; s += 2) {
        double v = 0;
        for (int i = 0; i < q; ++i) v += w1[i] * D[r][i] * D[s][i] + w2[i] * P[r][i] * P[s][i];
        A(r, s) = A(s, r) = v;
      }
    return A;
  };
  const int q = M + 40;
  const auto A = assemble(q);
  const auto A2 = assemble(q + 24);
  double diff = 0;
  for (int r = 0; r < M; ++r)
    for (int s = 0; s < M; ++s) diff = std::max(diff, std::abs(A(r, s) - A2(r, s)) / std::max(1.0, std::abs(A2(r, s))));
  if (diff > 1e-10) throw ResolutionError("sturm_liouville_solve: matrix entries not converged under quadrature refinement");

  auto block = [&](const std::vector<int>& ks) {
    numerics::Matrix<double> b(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i)
      for (std::size_t j = 0; j < ks.size(); ++j) b(i, j) = A(ks[i], ks[j]);
    return numerics::sym_eigen(b);
  };
  auto sol = detail::parity_split_solve(n_max, M, block);
  sol.c_eff = std::sqrt(std::max(0.0, coupling));
  for (const auto& f : sol.functions) detail::check_tail(f.coeffs, "sturm_liouville_solve");
  return sol;
}

/// lambda = a int int phi(x) K(a (x - t)) phi(t) dt dx / ||phi||^2 on [-1, 1]^2
/// with the kernel itself, by tensor Gauss-Legendre in extended precision.
template <typename Phi>
double rayleigh_eigenvalue(const Kernel& kern, double a, Phi&& phi, int quad_order = 200) {
  const auto rule = numerics::gauss_legendre<long double>(quad_order);
  const int n = quad_order;
  std::vector<long double> v(n);
  long double norm = 0;
  for (int i = 0; i < n; ++i) {
    v[i] = static_cast<long double>(phi(static_cast<double>(rule.nodes[i])));
    norm += rule.weights[i] * v[i] * v[i];
  }
  const long double al = a;
  long double s = 0;
  for (int i = 0; i < n; ++i) {
    long double row = 0;
    for (int j = 0; j < n; ++j) row += rule.weights[j] * kern.eval_long(al * (rule.nodes[i] - rule.nodes[j])) * v[j];
    s += rule.weights[i] * v[i] * row;
  }
  return static_cast<double>(al * s / norm);
}

struct SmallSpectrum {
  double a = 0;
  PswfSolution pswf;
  /// Rayleigh-quotient eigenvalues, ordinal n at index n - 1.
  std::vector<double> lambda;

  std::size_t size() const { return lambda.size(); }
  /// lambda / a, the eigenvalue of the unit-interval-scaled operator.
  double eta(std::size_t i) const { return lambda[i] / a; }
  Parity parity(std::size_t i) const { return pswf.parity[i]; }
  /// Eigenfunction on [-1, 1], unit L2 norm, phi(1) > 0.
  double phi(std::size_t i, double x) const { return pswf.functions[i](x); }
};

/// Prolate spheroidal approximations (c = 0 member of the family, matched to
/// second order) with Rayleigh eigenvalues from the true kernel.
inline SmallSpectrum solve(const Kernel& kern, double a, int n_max = 10, int M = 0, int quad_order = 200) {
  if (M <= 0) M = 2 * n_max + 40;
  SmallSpectrum out;
  out.a = a;
  out.pswf = pswf_solve(bandwidth(kern, a), n_max, M);
  for (const auto& f : out.pswf.functions) out.lambda.push_back(rayleigh_eigenvalue(kern, a, f, quad_order));
  return out;
}

}  // namespace convspec::small

#endif  // CONVSPEC_SMALL_INTERVAL_HPP
