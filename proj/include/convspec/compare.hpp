#ifndef CONVSPEC_COMPARE_HPP
#define CONVSPEC_COMPARE_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "convspec/error.hpp"
#include "convspec/kernels.hpp"
#include "convspec/large_interval.hpp"
#include "convspec/numerics/quadrature.hpp"
#include "convspec/nystrom.hpp"
#include "convspec/small_interval.hpp"
#include "convspec/types.hpp"

namespace convspec::compare {

using Function = std::function<double(double)>;

/// One eigenpair in the original variable x in [-a, a], unit L2 norm.
struct Mode {
  Parity parity = Parity::even;
  /// 1-based ordinal within the parity class.
  int n = 0;
  /// 1-based ordinal in the merged descending spectrum.
  int global = 0;
  double lambda = 0;
  /// Only meaningful for the large-interval backend.
  double kappa = 0;
  Function f;
};

struct Spectrum {
  std::string backend;
  double a = 0;
  std::vector<Mode> modes;

  std::vector<const Mode*> of_parity(Parity p) const {
    std::vector<const Mode*> out;
    for (const auto& m : modes)
      if (m.parity == p) out.push_back(&m);
    return out;
  }
};

namespace detail {

inline void number_modes(Spectrum& s) {
  std::stable_sort(s.modes.begin(), s.modes.end(), [](const Mode& x, const Mode& y) { return x.lambda > y.lambda; });
  int ne = 0, no = 0, g = 0;
  for (auto& m : s.modes) {
    m.global = ++g;
    m.n = m.parity == Parity::even ? ++ne : ++no;
  }
}

}  // namespace detail

inline Spectrum from_nystrom(const nystrom::NystromSolution& sol) {
  auto sp = std::make_shared<const nystrom::NystromSolution>(sol);
  Spectrum s{"nystrom", sol.a, {}};
  const double a = sol.a, inv = 1 / std::sqrt(a);
  for (std::size_t l = 0; l < sol.size(); ++l)
    s.modes.push_back({sol.parity[l], 0, 0, sol.lambda[l], 0,
                       [sp, l, a, inv](double x) { return inv * nystrom::interpolate(*sp, l, x / a); }});
  detail::number_modes(s);
  return s;
}

inline Spectrum from_large(const std::vector<large::AsymptoticEigenfunction>& fs) {
  if (fs.empty()) throw DomainError("from_large: empty spectrum");
  Spectrum s{"large", fs.front().a(), {}};
  for (const auto& f : fs) {
    auto sp = std::make_shared<const large::AsymptoticEigenfunction>(f);
    s.modes.push_back({f.parity(), 0, 0, f.lambda(), f.root().kappa, [sp](double x) { return (*sp)(x); }});
  }
  detail::number_modes(s);
  return s;
}

inline Spectrum from_small(const small::SmallSpectrum& sm) {
  auto sp = std::make_shared<const small::SmallSpectrum>(sm);
  Spectrum s{"small", sm.a, {}};
  const double a = sm.a, inv = 1 / std::sqrt(a);
  for (std::size_t i = 0; i < sm.size(); ++i)
    s.modes.push_back(
        {sm.parity(i), 0, 0, sm.lambda[i], 0, [sp, i, a, inv](double x) { return inv * sp->phi(i, x / a); }});
  detail::number_modes(s);
  return s;
}

/// Large-interval spectrum with n_max roots per parity.
inline Spectrum solve_large(const Kernel& kern, double a, int n_max, const large::LargeConfig& cfg = {}) {
  std::vector<large::AsymptoticEigenfunction> fs;
  for (const Parity p : {Parity::even, Parity::odd})
    for (const auto& r : large::solve_characteristic(kern, a, p, n_max, cfg)) fs.emplace_back(kern, a, r, cfg);
  return from_large(fs);
}

/// f_test or -f_test, whichever has the sign of f_ref at x = a.
inline Function align_sign(const Function& f_ref, const Function& f_test, double a) {
  const double r = f_ref(a);
  if (std::abs(r) < 1e-10) throw DomainError("align_sign: reference endpoint value too small to fix the sign");
  if ((f_test(a) < 0) == (r < 0)) return f_test;
  return [f_test](double x) { return -f_test(x); };
}

inline double l2_error(const Function& f_ref, const Function& f_test, double a, int quad_order = 400) {
  const auto rule = numerics::cached_gauss_legendre(quad_order);
  double s = 0;
  for (std::size_t i = 0; i < rule->size(); ++i) {
    const double x = a * rule->nodes[i];
    const double d = f_ref(x) - f_test(x);
    s += rule->weights[i] * d * d;
  }
  return std::sqrt(a * s);
}

struct InterlacingResult {
  bool ok = true;
  /// 1-based index of the first offending pair, 0 when ok.
  int first_violation = 0;
  std::string message;
};

/// kappa_n(e) < kappa_n(o) < kappa_{n+1}(e) for ascending lists.
inline InterlacingResult interlacing_check(const std::vector<double>& evens, const std::vector<double>& odds) {
  for (std::size_t i = 0; i < odds.size(); ++i) {
    if (i < evens.size() && !(evens[i] < odds[i]))
      return {false, static_cast<int>(i + 1), "even " + std::to_string(i + 1) + " not below odd " + std::to_string(i + 1)};
    if (i + 1 < evens.size() && !(odds[i] < evens[i + 1]))
      return {false, static_cast<int>(i + 1), "odd " + std::to_string(i + 1) + " not below even " + std::to_string(i + 2)};
  }
  return {};
}

/// Interlacing of a spectrum, using -lambda as the ascending key.
inline InterlacingResult interlacing_check(const Spectrum& s) {
  std::vector<double> e, o;
  for (const auto* m : s.of_parity(Parity::even)) e.push_back(-m->lambda);
  for (const auto* m : s.of_parity(Parity::odd)) o.push_back(-m->lambda);
  return interlacing_check(e, o);
}

struct EnergyIdentity {
  /// -int k K^'(k) [|f^(k)|^2 + |f^(-k)|^2] dk, f^ evaluated at k and -k.
  double lhs = 0;
  /// Same integral using |f^(-k)| = |f^(k)| for real f.
  double lhs_symmetric = 0;
  /// lambda a [|f(a)|^2 + |f(-a)|^2].
  double rhs = 0;
  double k_end = 0;

  double residual() const { return rhs > 0 ? std::abs(lhs - rhs) / rhs : std::abs(lhs - rhs); }
};

/// Both sides of the energy identity. quad_order is the Gauss-Legendre order
/// per panel; the k-integral stops at k_max or once a crude tail bound drops
/// below 1e-10 of the right-hand side.
inline EnergyIdentity energy_identity(const Kernel& kern, double a, double lambda, const Function& f,
                                      double k_max = 20, int quad_order = 16) {
  using std::numbers::pi;
  EnergyIdentity out;
  const double fa = f(a), fm = f(-a);
  out.rhs = lambda * a * (fa * fa + fm * fm);

  const double k_step = 0.25;
  double k_end = k_step;
  while (k_end < k_max) {
    const double bound = 4 * a * k_end * std::abs(kern.ft_d1(k_end)) * (k_max - k_end);
    if (bound < 1e-10 * std::max(out.rhs, 1e-300)) break;
    k_end += k_step;
  }
  k_end = std::min(k_end, k_max);
  out.k_end = k_end;

  const int x_panels = static_cast<int>(std::ceil(2 * a * (2 * k_end + 2)));
  const auto xr = numerics::composite_gauss_legendre(-a, a, x_panels, quad_order);
  std::vector<double> wf(xr.nodes.size());
  for (std::size_t j = 0; j < xr.nodes.size(); ++j) wf[j] = xr.weights[j] * f(xr.nodes[j]);

  const int k_panels = static_cast<int>(std::ceil(k_end * (4 * a + 4)));
  const auto kr = numerics::composite_gauss_legendre(0.0, k_end, k_panels, quad_order);
  double two = 0, sym = 0;
  for (std::size_t i = 0; i < kr.nodes.size(); ++i) {
    const double k = kr.nodes[i];
    double cp = 0, sp = 0, cm = 0, sm = 0;
    for (std::size_t j = 0; j < xr.nodes.size(); ++j) {
      const double th = 2 * pi * k * xr.nodes[j];
      const double c = std::cos(th), s = std::sin(th);
      cp += wf[j] * c;
      sp += wf[j] * s;
      cm += wf[j] * c;
      sm -= wf[j] * s;
    }
    const double w = -kr.weights[i] * k * kern.ft_d1(k);
    two += w * (cp * cp + sp * sp + cm * cm + sm * sm);
    sym += w * 2 * (cp * cp + sp * sp);
  }
  out.lhs = two;
  out.lhs_symmetric = sym;
  return out;
}

inline double energy_identity_residual(const Kernel& kern, double a, const Mode& m, double k_max = 20,
                                       int quad_order = 16) {
  return energy_identity(kern, a, m.lambda, m.f, k_max, quad_order).residual();
}

struct Row {
  int n = 0;
  Parity parity = Parity::even;
  double lambda_ref = 0;
  double lambda_test = 0;
  double rel_err = 0;
  double l2_err = 0;
};

struct ComparisonReport {
  double a = 0;
  std::string kernel;
  std::string backend_ref;
  std::string backend_test;
  int quad_order = 400;
  std::vector<Row> rows;
  std::vector<std::string> warnings;

  const Row* find(Parity p, int n) const {
    for (const auto& r : rows)
      if (r.parity == p && r.n == n) return &r;
    return nullptr;
  }
};

/// Pairs modes by (parity, ordinal). Interlacing of both spectra is checked
/// first; a violation aborts.
inline ComparisonReport build_report(const Spectrum& ref, const Spectrum& test, const std::string& kernel_name,
                                     int quad_order = 400) {
  if (std::abs(ref.a - test.a) > 1e-12 * std::max(1.0, ref.a))
    throw DomainError("build_report: spectra computed on different intervals");
  for (const Spectrum* s : {&ref, &test}) {
    const auto il = interlacing_check(*s);
    if (!il.ok) throw AccuracyError("build_report: " + s->backend + " spectrum violates interlacing: " + il.message);
  }
  ComparisonReport rep{ref.a, kernel_name, ref.backend, test.backend, quad_order, {}, {}};
  for (const Parity p : {Parity::even, Parity::odd}) {
    const auto r = ref.of_parity(p), t = test.of_parity(p);
    if (r.size() != t.size())
      rep.warnings.push_back(std::string(to_string(p)) + ": " + std::to_string(r.size()) + " reference vs " +
                             std::to_string(t.size()) + " test modes, truncated");
    for (std::size_t i = 0; i < std::min(r.size(), t.size()); ++i) {
      const auto ft = align_sign(r[i]->f, t[i]->f, ref.a);
      rep.rows.push_back({r[i]->n, p, r[i]->lambda, t[i]->lambda, std::abs(t[i]->lambda - r[i]->lambda) / r[i]->lambda,
                          l2_error(r[i]->f, ft, ref.a, quad_order)});
    }
  }
  return rep;
}

/// Three significant digits, lower-case exponent: 1.95e+00.
inline std::string format_sci3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

inline void write_csv(std::ostream& os, const ComparisonReport& rep) {
  os << "n,parity,lambda_ref,lambda_test,rel_err,l2_err\n";
  for (const auto& r : rep.rows)
    os << r.n << ',' << to_string(r.parity) << ',' << format_sci3(r.lambda_ref) << ',' << format_sci3(r.lambda_test)
       << ',' << format_sci3(r.rel_err) << ',' << format_sci3(r.l2_err) << '\n';
}

}  // namespace convspec::compare

#endif  // CONVSPEC_COMPARE_HPP
