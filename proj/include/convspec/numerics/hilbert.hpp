#ifndef CONVSPEC_NUMERICS_HILBERT_HPP
#define CONVSPEC_NUMERICS_HILBERT_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "convspec/error.hpp"
#include "convspec/numerics/quadrature.hpp"

namespace convspec::numerics {

struct HilbertConfig {
  /// Total Gauss-Legendre order spent on the mapped half-line.
  int order = 800;
  /// Length scale s of the map t = s tan(theta); 0 picks max(1, |k|).
  double scale = 0.0;
  /// Abscissae where f has a kink or other loss of smoothness; the
  /// quadrature is split there.
  std::vector<double> breakpoints;
};

/// H[f](k) = (1/pi) p.v. int f(tau) / (k - tau) dtau.
///
/// Evaluated in the folded form (1/pi) int_0^inf [f(k - t) - f(k + t)] / t dt,
/// whose integrand is regular at t = 0, with t = s tan(theta) mapping the
/// half-line onto (0, pi/2). Requires f(tau) -> 0 as |tau| -> inf.
template <typename F>
double hilbert_transform(F&& f, double k, const HilbertConfig& cfg = {}) {
  if (cfg.order < 16) throw DomainError("hilbert_transform: order must be at least 16");
  const double s = cfg.scale > 0 ? cfg.scale : std::max(1.0, std::abs(k));
  const double half_pi = std::numbers::pi / 2;

  std::vector<double> cuts{0.0, half_pi};
  for (const double bp : cfg.breakpoints) {
    const double t = std::abs(k - bp);
    if (t > 0) cuts.push_back(std::atan(t / s));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double x, double y) { return y - x < 1e-12; }), cuts.end());

  double sum = 0;
  auto add_panel = [&](double lo, double hi, int n) {
    const auto rule = cached_gauss_legendre(n);
    const double half = (hi - lo) / 2, mid = (hi + lo) / 2;
    double part = 0;
    for (std::size_t i = 0; i < rule->size(); ++i) {
      const double theta = mid + half * rule->nodes[i];
      const double t = s * std::tan(theta);
      const double fm = f(k - t);
      const double fp = f(k + t);
      if (!std::isfinite(fm) || !std::isfinite(fp)) throw DomainError("hilbert_transform: non-finite sample");
      // dt / t = dtheta / (sin cos)
      part += rule->weights[i] * (fm - fp) / (std::sin(theta) * std::cos(theta));
    }
    sum += part * half;
  };
  // Panels shrink geometrically towards every cut so that features sitting
  // at a breakpoint far out on the line stay resolved in theta.
  constexpr int levels = 8;
  constexpr double ratio = 0.2;
  for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    const double lo = cuts[seg], hi = cuts[seg + 1];
    const double w = (hi - lo) / 2;
    const double inner = w * std::pow(ratio, levels);
    const int n0 = std::max(16, static_cast<int>(std::lround(cfg.order * w / half_pi)));
    for (int j = 0; j < levels; ++j) {
      const double a = w * std::pow(ratio, j + 1), b = w * std::pow(ratio, j);
      add_panel(lo + a, lo + b, j == 0 ? n0 : 16);
      add_panel(hi - b, hi - a, j == 0 ? n0 : 16);
    }
    add_panel(lo, lo + inner, 16);
    add_panel(hi - inner, hi, 16);
  }
  return sum / std::numbers::pi;
}

}  // namespace convspec::numerics

#endif  // CONVSPEC_NUMERICS_HILBERT_HPP
