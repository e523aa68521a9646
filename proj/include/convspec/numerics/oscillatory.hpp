#ifndef CONVSPEC_NUMERICS_OSCILLATORY_HPP
#define CONVSPEC_NUMERICS_OSCILLATORY_HPP

#include <cmath>
#include <complex>
#include <numbers>

#include "convspec/error.hpp"
#include "convspec/numerics/quadrature.hpp"

namespace convspec::numerics {

struct OscillatoryConfig {
  /// Target size of the neglected tail after the end corrections.
  double tail_tol = 1e-10;
  /// Gauss-Legendre order per panel.
  int panel_order = 16;
  /// Fixed truncation; 0 selects it from tail_tol.
  double k_max = 0.0;
  /// Upper limit for the automatic truncation search.
  double k_cap = 1e5;
};

/// int_R g(k) exp(2 pi i k theta) dk for g with at least 1/k^2 decay.
///
/// The line is cut at +-K and covered by panels of length <= 1/(4|theta| + 4)
/// with a fixed-order rule per panel. For theta != 0 the two tails are added
/// through two integration-by-parts terms.
template <typename G>
std::complex<double> oscillatory_integral(G&& g, double theta, const OscillatoryConfig& cfg = {}) {
  using cplx = std::complex<double>;
  const double omega = 2 * std::numbers::pi * theta;
  auto sample = [&](double k) { return cplx(g(k)); };

  double kmax = cfg.k_max;
  if (kmax <= 0) {
    kmax = 8;
    for (;;) {
      const double gp = std::abs(sample(kmax)), gm = std::abs(sample(-kmax));
      const double estimate = omega != 0 ? 6 * (gp + gm) / (kmax * kmax * std::pow(std::abs(omega), 3))
                                         : (gp + gm) * kmax;
      if (estimate < cfg.tail_tol) break;
      if (kmax >= cfg.k_cap) {
        if (omega == 0) throw DomainError("oscillatory_integral: integrand does not decay fast enough at theta = 0");
        break;
      }
      kmax *= 2;
    }
  }

  const double panel_len = 1.0 / (4 * std::abs(theta) + 4);
  const int panels = static_cast<int>(std::ceil(2 * kmax / panel_len));
  const auto rule = composite_gauss_legendre(-kmax, kmax, panels, cfg.panel_order);
  cplx sum = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double k = rule.nodes[i];
    sum += rule.weights[i] * sample(k) * std::exp(cplx(0, omega * k));
  }

  if (omega != 0) {
    const cplx iw(0, omega);
    const double h = 1e-3 * kmax;
    const cplx gp = sample(kmax), gm = sample(-kmax);
    const cplx dgp = (sample(kmax + h) - sample(kmax - h)) / (2 * h);
    const cplx dgm = (sample(-kmax + h) - sample(-kmax - h)) / (2 * h);
    const cplx ep = std::exp(cplx(0, omega * kmax)), em = std::exp(cplx(0, -omega * kmax));
    sum += -gp * ep / iw + dgp * ep / (iw * iw);
    sum += gm * em / iw - dgm * em / (iw * iw);
  }
  return sum;
}

}  // namespace convspec::numerics

#endif  // CONVSPEC_NUMERICS_OSCILLATORY_HPP
