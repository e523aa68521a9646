#ifndef CONVSPEC_LARGE_INTERVAL_HPP
#define CONVSPEC_LARGE_INTERVAL_HPP

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <sstream>
#include <vector>

#include "convspec/error.hpp"
#include "convspec/kernels.hpp"
#include "convspec/numerics/hilbert.hpp"
#include "convspec/numerics/quadrature.hpp"
#include "convspec/numerics/roots.hpp"
#include "convspec/types.hpp"

namespace convspec::large {

using cplx = std::complex<double>;

struct LargeConfig {
  /// Radius around k = +-kappa inside which removable singularities are
  /// evaluated by their regularised forms.
  double eps_sing = 1e-4;
  int hilbert_order = 800;
  /// Samples of H[log G] on the tan-mapped grid.
  int cache_points = 2400;
  /// Target for the neglected tail of the correction integrals.
  double tail_tol = 1e-7;
  /// Gauss-Legendre order of the L2(-a, a) renormalisation.
  int norm_order = 400;
  /// Largest phase 2 pi k (2a) swept by one 16-point panel.
  double panel_phase = std::numbers::pi / 3;
};

/// G(k, kappa) = K^(kappa)(k^2 - kappa^2) / ((K^(kappa) - K^(k))(k^2 + 1)).
inline double G_eval(const Kernel& kern, double k, double kappa, double eps_sing = 1e-4) {
  if (!(kappa > 0)) throw DomainError("G_eval: kappa must be positive");
  const double q = std::abs(k);
  const double d = q - kappa;
  const double fk = kern.ft(kappa);
  if (std::abs(d) < eps_sing) {
    // (K^(kappa) - K^(q)) / (q - kappa) as the mean of -K^' over [kappa, q].
    double slope;
    if (d == 0) {
      slope = -kern.ft_d1(kappa);
    } else {
      static constexpr std::array<double, 4> t{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                               0.8611363115940526};
      static constexpr std::array<double, 4> w{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                               0.3478548451374538};
      slope = 0;
      for (int i = 0; i < 4; ++i) slope -= w[i] * kern.ft_d1(kappa + d * (1 + t[i]) / 2);
      slope /= 2;
    }
    return fk * (q + kappa) / (slope * (k * k + 1));
  }
  return fk * (k * k - kappa * kappa) / ((fk - kern.ft(q)) * (k * k + 1));
}

namespace detail {

inline numerics::HilbertConfig hilbert_cfg(double kappa, int order) {
  numerics::HilbertConfig cfg;
  cfg.order = order;
  cfg.breakpoints = {0.0, kappa, -kappa};
  return cfg;
}

}  // namespace detail

/// H[log G(., kappa)](k) by direct principal-value quadrature.
inline double hilbert_log_G(const Kernel& kern, double k, double kappa, const LargeConfig& cfg = {}) {
  auto logG = [&](double t) { return std::log(G_eval(kern, t, kappa, cfg.eps_sing)); };
  return numerics::hilbert_transform(logG, k, detail::hilbert_cfg(kappa, cfg.hilbert_order));
}

/// Factorisation data for one kappa: G, a tabulated H[log G] and the derived
/// X+ and T0 evaluators.
class FactorisationCache {
 public:
  FactorisationCache(const Kernel& kern, double kappa, double k_end, const LargeConfig& cfg = {})
      : kern_(kern), kappa_(kappa), cfg_(cfg) {
    if (!(kappa > 0)) throw DomainError("FactorisationCache: kappa must be positive");
    ft_kappa_ = kern_.ft(kappa);
    log_d1_ = kern_.ft_d1(kappa) / ft_kappa_;
    if (!(log_d1_ < 0)) throw DomainError("FactorisationCache: K^ must be strictly decreasing at kappa");
    scale_ = kappa + 1;
    k_end_ = std::max(k_end, 2 * kappa + 2);
    theta_end_ = std::atan(k_end_ / scale_);
    const int n = std::max(16, cfg.cache_points);
    dtheta_ = theta_end_ / n;
    build_log_table();
    H_.resize(n + 1);
    H_[0] = 0;
    auto logG = [this](double t) { return log_G_table(t); };
    const auto hcfg = detail::hilbert_cfg(kappa, cfg_.hilbert_order);
    for (int i = 1; i <= n; ++i) H_[i] = numerics::hilbert_transform(logG, scale_ * std::tan(i * dtheta_), hcfg);
  }

  double kappa() const { return kappa_; }
  double k_end() const { return k_end_; }
  const Kernel& kernel() const { return kern_; }
  /// (log K^)'(kappa).
  double log_d1() const { return log_d1_; }

  double G(double k) const { return G_eval(kern_, k, kappa_, cfg_.eps_sing); }

  /// log G from a cubic table in theta = atan(|k| / s); exact G is used to
  /// build it, the table only feeds the Hilbert integrand.
  double log_G_table(double k) const {
    const double q = std::abs(k);
    const int n = static_cast<int>(logG_.size()) - 1;
    const double u = std::atan(q / scale_) / dlog_;
    if (u >= n) return logG_.back() * (q_last_ / q) * (q_last_ / q);
    const int i = std::clamp(static_cast<int>(std::floor(u)), 0, n - 1);
    const int base = std::clamp(i - 1, 0, n - 3);
    const double t = u - base;
    return cubic(logG_[base], logG_[base + 1], logG_[base + 2], logG_[base + 3], t);
  }

  /// Interpolated H[log G](k); odd in k, ~ 1/k past the table.
  double hilbert(double k) const {
    const double q = std::abs(k);
    const double sgn = k < 0 ? -1.0 : 1.0;
    if (q >= k_end_) return sgn * H_.back() * k_end_ / q;
    const double u = std::atan(q / scale_) / dtheta_;
    const int n = static_cast<int>(H_.size()) - 1;
    int i = std::clamp(static_cast<int>(std::floor(u)), 0, n - 1);
    int base = std::clamp(i - 1, -1, n - 3);
    auto node = [&](int j) { return j < 0 ? -H_[-j] : H_[j]; };
    const double t = u - base;
    const double y0 = node(base), y1 = node(base + 1), y2 = node(base + 2), y3 = node(base + 3);
    return sgn * cubic(y0, y1, y2, y3, t);
  }

  /// X+(k) = sqrt(G) exp(i H[log G](k) / 2).
  cplx x_plus(double k) const { return std::sqrt(G(k)) * std::exp(cplx(0, hilbert(k) / 2)); }

  /// T0(k) = K^(k)/(K^(k) - K^(kappa)) - 2 kappa / ((k^2 - kappa^2)(log K^)'(kappa)).
  double t0(double k) const {
    const double q = std::abs(k);
    const double d = q - kappa_;
    const double e = cfg_.eps_sing;
    if (std::abs(d) < e) {
      // Cubic through kappa +- e and kappa +- 2e.
      const std::array<double, 4> xs{-2 * e, -e, e, 2 * e};
      double v = 0;
      for (int i = 0; i < 4; ++i) {
        double w = 1;
        for (int j = 0; j < 4; ++j)
          if (j != i) w *= (d - xs[j]) / (xs[i] - xs[j]);
        v += w * t0_direct(kappa_ + xs[i]);
      }
      return v;
    }
    return t0_direct(q);
  }

 private:
  static double cubic(double y0, double y1, double y2, double y3, double t) {
    return y0 * (t - 1) * (t - 2) * (t - 3) / -6 + y1 * t * (t - 2) * (t - 3) / 2 + y2 * t * (t - 1) * (t - 3) / -2 +
           y3 * t * (t - 1) * (t - 2) / 6;
  }

  void build_log_table() {
    constexpr int m = 8000;
    const double end = std::numbers::pi / 2 * (1 - 1.0 / 64);
    dlog_ = end / m;
    logG_.resize(m + 1);
    for (int i = 0; i <= m; ++i) logG_[i] = std::log(G(scale_ * std::tan(i * dlog_)));
    q_last_ = scale_ * std::tan(m * dlog_);
  }

  double t0_direct(double q) const {
    const double f = kern_.ft(q);
    return f / (f - ft_kappa_) - 2 * kappa_ / ((q * q - kappa_ * kappa_) * log_d1_);
  }

  Kernel kern_;
  double kappa_;
  LargeConfig cfg_;
  double ft_kappa_ = 0;
  double log_d1_ = 0;
  double scale_ = 1;
  double k_end_ = 0;
  double theta_end_ = 0;
  double dtheta_ = 0;
  std::vector<double> H_;
  double dlog_ = 0;
  double q_last_ = 0;
  std::vector<double> logG_;
};

/// X+(k) evaluated with a direct Hilbert transform (no cache).
inline cplx x_plus(const Kernel& kern, double k, double kappa, const LargeConfig& cfg = {}) {
  return std::sqrt(G_eval(kern, k, kappa, cfg.eps_sing)) * std::exp(cplx(0, hilbert_log_G(kern, k, kappa, cfg) / 2));
}

inline double t0_eval(const Kernel& kern, double k, double kappa, const LargeConfig& cfg = {}) {
  const double fk = kern.ft(kappa);
  const double ld = kern.ft_d1(kappa) / fk;
  auto direct = [&](double q) {
    const double f = kern.ft(q);
    return f / (f - fk) - 2 * kappa / ((q * q - kappa * kappa) * ld);
  };
  const double q = std::abs(k);
  const double d = q - kappa;
  const double e = cfg.eps_sing;
  if (std::abs(d) < e) {
    const std::array<double, 4> xs{-2 * e, -e, e, 2 * e};
    double v = 0;
    for (int i = 0; i < 4; ++i) {
      double w = 1;
      for (int j = 0; j < 4; ++j)
        if (j != i) w *= (d - xs[j]) / (xs[i] - xs[j]);
      v += w * direct(kappa + xs[i]);
    }
    return v;
  }
  return direct(q);
}

/// L(kappa) = 2 pi kappa a - arctan(1/kappa) - H[log G(., kappa)](kappa) / 2.
inline double char_lhs(const Kernel& kern, double a, double kappa, const LargeConfig& cfg = {}) {
  if (!(kappa > 0)) throw DomainError("char_lhs: kappa must be positive");
  return 2 * std::numbers::pi * kappa * a - std::atan(1 / kappa) - hilbert_log_G(kern, kappa, kappa, cfg) / 2;
}

/// Right-hand side of the characteristic equation on branch m.
inline double char_target(Parity p, int m) {
  return std::numbers::pi * (m + (p == Parity::odd ? 0.5 : 0.0));
}

struct CharacteristicRoot {
  Parity parity = Parity::even;
  int m = 0;
  double kappa = 0;
  double lambda = 0;
  /// |L(kappa) - target|.
  double residual = 0;

  int n() const { return m + 1; }
};

inline CharacteristicRoot solve_branch(const Kernel& kern, double a, Parity parity, int m, const LargeConfig& cfg = {}) {
  if (!(a > 0)) throw DomainError("solve_characteristic: a must be positive");
  if (m < 0) throw DomainError("solve_characteristic: branch index must be non-negative");
  const double target = char_target(parity, m);
  auto f = [&](double k) { return char_lhs(kern, a, k, cfg) - target; };
  const double guess = (target + std::numbers::pi / 2) / (2 * std::numbers::pi * a);
  double lo = guess, hi = guess;
  double flo = f(lo);
  double fhi = flo;
  auto fail = [&](const char* why) {
    std::ostringstream os;
    os << "solve_characteristic: " << why << " for " << to_string(parity) << " branch m = " << m;
    throw BracketError(os.str());
  };
  for (int it = 0; flo > 0; ++it) {
    if (it > 200) fail("no lower bracket");
    hi = lo;
    fhi = flo;
    lo /= 1.25;
    flo = f(lo);
  }
  for (int it = 0; fhi < 0; ++it) {
    if (it > 200) fail("no upper bracket");
    lo = hi;
    flo = fhi;
    hi *= 1.25;
    fhi = f(hi);
  }
  CharacteristicRoot r;
  r.parity = parity;
  r.m = m;
  r.kappa = (flo == 0) ? lo : (fhi == 0 ? hi : numerics::find_root(f, lo, hi, 1e-12));
  r.lambda = kern.ft(r.kappa);
  r.residual = std::abs(f(r.kappa));
  if (!(r.residual < 1e-9)) fail("root residual above 1e-9");
  return r;
}

/// Roots for m = 0 .. n_max - 1, ascending in kappa.
inline std::vector<CharacteristicRoot> solve_characteristic(const Kernel& kern, double a, Parity parity, int n_max,
                                                             const LargeConfig& cfg = {}) {
  std::vector<CharacteristicRoot> out;
  for (int m = 0; m < n_max; ++m) out.push_back(solve_branch(kern, a, parity, m, cfg));
  return out;
}

/// Eigenfunction on [-a, a] built from a characteristic root: the cos / sin
/// leading term plus the correction integral over k, renormalised to unit
/// L2(-a, a) norm with f(a) > 0.
class AsymptoticEigenfunction {
 public:
  AsymptoticEigenfunction(const Kernel& kern, double a, const CharacteristicRoot& root, const LargeConfig& cfg = {})
      : root_(root), a_(a) {
    using std::numbers::pi;
    const double kappa = root.kappa;
    const double ld = kern.ft_d1(kappa) / kern.ft(kappa);
    leading_ = 2 * (root.m % 2 == 0 ? 1.0 : -1.0) / std::sqrt(-2 * kappa * ld);
    const double c0 = 2 * kappa / std::abs(ld);
    k_max_ = std::max(2 * kappa + 10, std::cbrt(c0 / (6 * cfg.tail_tol)));
    cache_ = std::make_shared<FactorisationCache>(kern, kappa, k_max_, cfg);

    const int panels = static_cast<int>(std::ceil(k_max_ * 2 * pi * (2 * a + 1) / cfg.panel_phase));
    half_ = k_max_ / panels / 2;
    rule_ = numerics::cached_gauss_legendre(16);
    const bool even = root.parity == Parity::even;
    g_.resize(static_cast<std::size_t>(panels) * 16);
    for (int p = 0; p < panels; ++p) {
      const double c = (2 * p + 1) * half_;
      for (int i = 0; i < 16; ++i) {
        const double k = c + half_ * rule_->nodes[i];
        const cplx F = std::exp(cplx(0, 2 * pi * k * a)) * cache_->t0(k) / (cplx(k, 1) * cache_->x_plus(k));
        g_[p * 16 + i] = half_ * rule_->weights[i] * (even ? -2 / pi * F.imag() : 2 / pi * F.real());
      }
    }

    const auto gl = numerics::cached_gauss_legendre(cfg.norm_order);
    double norm2 = 0;
    for (std::size_t i = 0; i < gl->size(); ++i) {
      if (gl->nodes[i] < 0) continue;
      const double v = raw(a * gl->nodes[i]);
      norm2 += (gl->nodes[i] == 0 ? 1 : 2) * gl->weights[i] * v * v;
    }
    norm2 *= a;
    end_raw_ = raw(a);
    scale_ = (end_raw_ < 0 ? -1.0 : 1.0) / std::sqrt(norm2);
  }

  const CharacteristicRoot& root() const { return root_; }
  double a() const { return a_; }
  double lambda() const { return root_.lambda; }
  Parity parity() const { return root_.parity; }
  const FactorisationCache& cache() const { return *cache_; }
  double k_max() const { return k_max_; }
  /// Value of the unnormalised formula at x = a.
  double raw_endpoint() const { return end_raw_; }

  double leading_term(double x) const { return leading_ * trig(2 * std::numbers::pi * root_.kappa * x); }

  double correction(double x) const {
    // Panel centres are equally spaced, so cos / sin of w k factor into a
    // per-panel rotation and 16 fixed in-panel phases.
    const double w = 2 * std::numbers::pi * x;
    std::array<double, 16> cb, sb;
    for (int i = 0; i < 16; ++i) {
      cb[i] = std::cos(w * half_ * rule_->nodes[i]);
      sb[i] = std::sin(w * half_ * rule_->nodes[i]);
    }
    const bool even = root_.parity == Parity::even;
    const std::size_t panels = g_.size() / 16;
    const double cs = std::cos(2 * w * half_), ss = std::sin(2 * w * half_);
    double ca = 0, sa = 0, s = 0;
    for (std::size_t p = 0; p < panels; ++p) {
      if (p % 64 == 0) {
        ca = std::cos(w * (2 * p + 1) * half_);
        sa = std::sin(w * (2 * p + 1) * half_);
      }
      double gc = 0, gs = 0;
      const double* g = &g_[p * 16];
      for (int i = 0; i < 16; ++i) {
        gc += g[i] * cb[i];
        gs += g[i] * sb[i];
      }
      s += even ? ca * gc - sa * gs : sa * gc + ca * gs;
      const double nc = ca * cs - sa * ss;
      sa = sa * cs + ca * ss;
      ca = nc;
    }
    return s;
  }

  double raw(double x) const { return leading_term(x) + correction(x); }

  double operator()(double x) const {
    if (!(std::abs(x) <= a_ * (1 + 1e-12))) throw DomainError("asymptotic eigenfunction: x outside [-a, a]");
    return scale_ * raw(x);
  }

  /// Rescaled form phi(s) = sqrt(a) f(a s) on [-1, 1].
  double rescaled(double s) const { return std::sqrt(a_) * (*this)(a_ * s); }

 private:
  double trig(double t) const { return root_.parity == Parity::even ? std::cos(t) : std::sin(t); }

  CharacteristicRoot root_;
  double a_;
  double leading_ = 0;
  double k_max_ = 0;
  double scale_ = 1;
  double end_raw_ = 0;
  std::shared_ptr<const FactorisationCache> cache_;
  std::shared_ptr<const numerics::QuadratureRule<double>> rule_;
  double half_ = 0;
  /// Weighted integrand samples, 16 per panel.
  std::vector<double> g_;
};

inline double eigenfunction_eval(const Kernel& kern, double a, const CharacteristicRoot& root, double x,
                                 const LargeConfig& cfg = {}) {
  return AsymptoticEigenfunction(kern, a, root, cfg)(x);
}

/// Residual of the full characteristic equation at kappa:
/// 1 + K^(1 +- e^{4 pi i kappa a}) / (K^'(kappa)(kappa + i) X+(kappa))
///   - (i / 2 pi) int T0(k)(1 +- e^{4 pi i k a}) / ((k + i) X+(k)) dk.
inline cplx full_char_residual(const Kernel& kern, double a, double kappa, Parity parity, const LargeConfig& cfg = {}) {
  using std::numbers::pi;
  const double pm = parity == Parity::even ? 1.0 : -1.0;
  const double ld = kern.ft_d1(kappa) / kern.ft(kappa);
  const double c0 = 2 * kappa / std::abs(ld);
  const double k_max = std::max(2 * kappa + 10, std::cbrt(c0 / (6 * cfg.tail_tol)));
  const FactorisationCache cache(kern, kappa, k_max, cfg);
  const cplx e_kappa = 1.0 + pm * std::exp(cplx(0, 4 * pi * kappa * a));
  cplx res = 1.0 + kern.ft(kappa) * e_kappa / (kern.ft_d1(kappa) * cplx(kappa, 1) * cache.x_plus(kappa));
  const double panel = cfg.panel_phase / (2 * pi * (2 * a + 1));
  const int panels = static_cast<int>(std::ceil(2 * k_max / panel));
  const auto rule = numerics::composite_gauss_legendre(-k_max, k_max, panels, 16);
  cplx integral = 0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double k = rule.nodes[j];
    integral += rule.weights[j] * cache.t0(k) * (1.0 + pm * std::exp(cplx(0, 4 * pi * k * a))) /
                (cplx(k, 1) * cache.x_plus(k));
  }
  res -= cplx(0, 1 / (2 * pi)) * integral;
  return res;
}

}  // namespace convspec::large

#endif  // CONVSPEC_LARGE_INTERVAL_HPP
