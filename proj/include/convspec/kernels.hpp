#ifndef CONVSPEC_KERNELS_HPP
#define CONVSPEC_KERNELS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "convspec/error.hpp"
#include "convspec/numerics/bessel.hpp"
#include "convspec/numerics/quadrature.hpp"
#include "convspec/numerics/roots.hpp"

namespace convspec {

using RealFn = std::function<double(double)>;
using LongFn = std::function<long double(long double)>;

/// An even convolution kernel K together with its Fourier transform
/// K^(k) = int K(x) exp(2 pi i k x) dx.
///
/// ft_d1 is odd in k; at k = 0 it returns the right derivative.
struct Kernel {
  std::string name;
  std::map<std::string, double> params;
  RealFn eval;
  RealFn eval_d1;
  RealFn eval_d2;
  RealFn ft;
  RealFn ft_d1;
  double decay_alpha = 2.0;
  /// Optional extended-precision evaluator used by the matrix builders.
  LongFn eval_ext;
  std::optional<double> d2_at_0;
  std::optional<double> d4_at_0;

  long double eval_long(long double x) const {
    return eval_ext ? eval_ext(x) : static_cast<long double>(eval(static_cast<double>(x)));
  }
  double ft0() const { return ft(0.0); }
  /// Logarithmic derivative (log K^)'(k).
  double log_ft_d1(double k) const { return ft_d1(k) / ft(k); }
};

namespace detail {

inline double sign_of(double k) { return k > 0 ? 1.0 : (k < 0 ? -1.0 : 0.0); }

// Central difference fallback for kernels supplied without derivatives.
inline RealFn numeric_d1(RealFn f) {
  return [f](double x) {
    const double h = 1e-4 * std::max(1.0, std::abs(x));
    return (f(x + h) - f(x - h)) / (2 * h);
  };
}

inline RealFn numeric_d2(RealFn f) {
  return [f](double x) {
    const double h = 1e-3 * std::max(1.0, std::abs(x));
    return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
  };
}

}  // namespace detail

inline Kernel builtin_power32() {
  using std::numbers::pi;
  Kernel k;
  k.name = "power32";
  k.eval = [](double x) { return std::pow(1 + x * x, -1.5); };
  k.eval_d1 = [](double x) { return -3 * x * std::pow(1 + x * x, -2.5); };
  k.eval_d2 = [](double x) { return (12 * x * x - 3) * std::pow(1 + x * x, -3.5); };
  k.eval_ext = [](long double x) { return std::pow(1.0L + x * x, -1.5L); };
  k.ft = [](double q) {
    const double z = 2 * pi * std::abs(q);
    if (z < 1e-300) return 2.0;
    return 2 * z * numerics::bessel_k1(z);
  };
  k.ft_d1 = [](double q) {
    const double z = 2 * pi * std::abs(q);
    if (z == 0) return 0.0;
    return -detail::sign_of(q) * 4 * pi * z * numerics::bessel_k0(z);
  };
  k.decay_alpha = 3.0;
  k.d2_at_0 = -3.0;
  k.d4_at_0 = 45.0;
  return k;
}

inline Kernel builtin_cauchy(double h) {
  using std::numbers::pi;
  if (!(h > 0) || !std::isfinite(h)) throw DomainError("cauchy kernel: h must be positive");
  Kernel k;
  k.name = "cauchy";
  k.params["h"] = h;
  const double h2 = h * h;
  k.eval = [h2](double x) { return 1 / (x * x + h2); };
  k.eval_d1 = [h2](double x) { return -2 * x / ((x * x + h2) * (x * x + h2)); };
  k.eval_d2 = [h2](double x) {
    const double d = x * x + h2;
    return (6 * x * x - 2 * h2) / (d * d * d);
  };
  const long double h2l = static_cast<long double>(h) * h;
  k.eval_ext = [h2l](long double x) { return 1.0L / (x * x + h2l); };
  k.ft = [h](double q) { return pi / h * std::exp(-2 * pi * h * std::abs(q)); };
  k.ft_d1 = [h](double q) {
    const double s = q < 0 ? -1.0 : 1.0;
    return -s * 2 * pi * pi * std::exp(-2 * pi * h * std::abs(q));
  };
  k.decay_alpha = 2.0;
  k.d2_at_0 = -2 / (h2 * h2);
  k.d4_at_0 = 24 / (h2 * h2 * h2);
  return k;
}

inline Kernel builtin_gaussian() {
  using std::numbers::pi;
  Kernel k;
  k.name = "gaussian";
  k.eval = [](double x) { return std::exp(-pi * x * x); };
  k.eval_d1 = [](double x) { return -2 * pi * x * std::exp(-pi * x * x); };
  k.eval_d2 = [](double x) { return (4 * pi * pi * x * x - 2 * pi) * std::exp(-pi * x * x); };
  k.eval_ext = [](long double x) { return std::exp(-std::numbers::pi_v<long double> * x * x); };
  k.ft = [](double q) { return std::exp(-pi * q * q); };
  k.ft_d1 = [](double q) { return -2 * pi * q * std::exp(-pi * q * q); };
  // Faster than any power; the tail check only needs a finite exponent.
  k.decay_alpha = 4.0;
  k.d2_at_0 = -2 * pi;
  k.d4_at_0 = 12 * pi * pi;
  return k;
}

struct ValidationCheck {
  std::string id;
  std::string grid;
  double max_violation = 0;
  double tolerance = 0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.pass; });
  }
  const ValidationCheck* first_failure() const {
    for (const auto& c : checks)
      if (!c.pass) return &c;
    return nullptr;
  }
};

/// K^(k) by direct quadrature of 2 int_0^X K(x) cos(2 pi k x) dx plus three
/// integration-by-parts terms for the tail beyond X. Intended for k != 0.
inline double fourier_quadrature(const Kernel& kern, double k, double x_cut = 400.0) {
  const double omega = 2 * std::numbers::pi * std::abs(k);
  const double panel = std::min(0.25, 1.0 / (4 * std::abs(k) + 4));
  const int panels = static_cast<int>(std::ceil(x_cut / panel));
  const auto rule = numerics::composite_gauss_legendre(0.0, x_cut, panels, 16);
  double sum = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * kern.eval(rule.nodes[i]) * std::cos(omega * rule.nodes[i]);
  if (omega > 0) {
    const RealFn d1 = kern.eval_d1 ? kern.eval_d1 : detail::numeric_d1(kern.eval);
    const RealFn d2 = kern.eval_d2 ? kern.eval_d2 : detail::numeric_d2(kern.eval);
    const double s = std::sin(omega * x_cut), c = std::cos(omega * x_cut);
    sum += -kern.eval(x_cut) * s / omega - d1(x_cut) * c / (omega * omega) + d2(x_cut) * s / (omega * omega * omega);
  }
  return 2 * sum;
}

/// Grid checks of evenness, positivity and monotone decay of K^, tail decay
/// of K and agreement of ft with a quadrature transform of eval. Failures are
/// reported, never thrown.
inline ValidationReport validate_assumptions(const Kernel& kern, double x_max = 50.0, double k_max = 10.0,
                                             int n_grid = 2001) {
  if (!(x_max > 0) || !(k_max > 0) || n_grid < 2) throw DomainError("validate_assumptions: grids must be positive");
  ValidationReport rep;
  auto grid_str = [](const char* var, double lo, double hi, int n) {
    std::ostringstream os;
    os << var << " in [" << lo << ", " << hi << "], " << n << " points";
    return os.str();
  };

  {
    const double scale = std::max(1.0, std::abs(kern.eval(0.0)));
    double worst = 0;
    for (int i = 0; i < n_grid; ++i) {
      const double x = x_max * i / (n_grid - 1);
      const double d = std::abs(kern.eval(x) - kern.eval(-x));
      worst = std::max(worst, std::isfinite(d) ? d : std::numeric_limits<double>::infinity());
    }
    worst /= scale;
    rep.checks.push_back({"assumption1_evenness", grid_str("x", -x_max, x_max, 2 * n_grid - 1), worst, 1e-9, worst <= 1e-9});
  }

  std::vector<double> fts(n_grid);
  for (int i = 0; i < n_grid; ++i) fts[i] = kern.ft(k_max * i / (n_grid - 1));
  {
    double worst = -std::numeric_limits<double>::infinity();
    for (const double v : fts) worst = std::max(worst, std::isfinite(v) ? -v : std::numeric_limits<double>::infinity());
    rep.checks.push_back({"assumption3_positivity", grid_str("k", 0, k_max, n_grid), worst, 0.0, worst < 0});
  }
  {
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < n_grid; ++i) {
      const double d = fts[i + 1] - fts[i];
      worst = std::max(worst, std::isfinite(d) ? d : std::numeric_limits<double>::infinity());
    }
    rep.checks.push_back({"assumption4_monotone", grid_str("k", 0, k_max, n_grid), worst, 0.0, worst < 0});
  }
  {
    // sup |K| x^alpha on the far half of the grid relative to the sup on the
    // quarter before it.
    const double alpha = kern.decay_alpha;
    double head = 0, tail = 0;
    for (int i = 0; i < n_grid; ++i) {
      const double x = x_max / 4 + (x_max / 4) * i / (n_grid - 1);
      head = std::max(head, std::abs(kern.eval(x)) * std::pow(x, alpha));
      const double y = x_max / 2 + (x_max / 2) * i / (n_grid - 1);
      tail = std::max(tail, std::abs(kern.eval(y)) * std::pow(y, alpha));
    }
    double ratio = 0;
    if (tail > 0) ratio = head > 0 ? tail / head : std::numeric_limits<double>::infinity();
    const bool ok = alpha > 1 && std::isfinite(ratio) && ratio <= 1.5;
    rep.checks.push_back({"assumption2_decay", grid_str("x", x_max / 4, x_max, 2 * n_grid), ratio, 1.5, ok});
  }
  {
    const double tol = 1e-7 * std::max(1.0, std::abs(kern.ft0()));
    double worst = 0;
    for (const double k : {0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0}) {
      const double d = std::abs(kern.ft(k) - fourier_quadrature(kern, k));
      worst = std::max(worst, std::isfinite(d) ? d : std::numeric_limits<double>::infinity());
    }
    rep.checks.push_back({"ft_consistency", "k in {0.1, 0.25, 0.5, 1, 2, 3, 4, 5}", worst, tol, worst <= tol});
  }
  return rep;
}

/// Wraps user closures into a Kernel and validates it with default grids.
/// Throws ValidationError naming the first failed check.
inline Kernel custom_kernel(RealFn eval, RealFn ft, RealFn ft_d1, double decay_alpha, std::string name = "custom",
                            RealFn eval_d1 = {}, RealFn eval_d2 = {}) {
  if (!eval || !ft || !ft_d1) throw DomainError("custom_kernel: eval, ft and ft_d1 are required");
  Kernel k;
  k.name = std::move(name);
  k.eval = std::move(eval);
  k.ft = std::move(ft);
  k.ft_d1 = std::move(ft_d1);
  k.eval_d1 = eval_d1 ? std::move(eval_d1) : detail::numeric_d1(k.eval);
  k.eval_d2 = eval_d2 ? std::move(eval_d2) : detail::numeric_d2(k.eval);
  k.decay_alpha = decay_alpha;
  const auto rep = validate_assumptions(k);
  if (const auto* bad = rep.first_failure()) {
    std::ostringstream os;
    os << "kernel '" << k.name << "' failed " << bad->id << " (violation " << bad->max_violation << ", tolerance "
       << bad->tolerance << ")";
    throw ValidationError(bad->id, os.str());
  }
  return k;
}

/// The unique kappa > 0 with K^(kappa) = lambda.
inline double khat_inverse(const Kernel& kern, double lambda) {
  const double top = kern.ft0();
  if (!(lambda > 0) || !(lambda < top)) {
    std::ostringstream os;
    os << "khat_inverse: lambda = " << lambda << " outside (0, " << top << ")";
    throw DomainError(os.str());
  }
  double hi = 1;
  while (kern.ft(hi) > lambda) {
    hi *= 2;
    if (hi > 1e8) throw DomainError("khat_inverse: no bracket found");
  }
  auto f = [&](double k) { return kern.ft(k) - lambda; };
  return numerics::find_root_newton(f, kern.ft_d1, 0.0, hi, 1e-15 * lambda);
}

/// Parses "power32", "gaussian" or "cauchy:h=<float>".
inline Kernel parse_kernel_spec(const std::string& spec) {
  if (spec == "power32") return builtin_power32();
  if (spec == "gaussian") return builtin_gaussian();
  const std::string prefix = "cauchy:h=";
  if (spec.rfind(prefix, 0) == 0) {
    const std::string num = spec.substr(prefix.size());
    std::size_t used = 0;
    double h = 0;
    try {
      h = std::stod(num, &used);
    } catch (const std::exception&) {
      throw DomainError("kernel spec: cannot parse h in '" + spec + "'");
    }
    if (used != num.size()) throw DomainError("kernel spec: cannot parse h in '" + spec + "'");
    return builtin_cauchy(h);
  }
  if (spec == "cauchy") return builtin_cauchy(1.0);
  throw DomainError("unknown kernel '" + spec + "' (expected power32, gaussian or cauchy:h=<float>)");
}

}  // namespace convspec

#endif  // CONVSPEC_KERNELS_HPP
