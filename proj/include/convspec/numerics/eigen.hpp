#ifndef CONVSPEC_NUMERICS_EIGEN_HPP
#define CONVSPEC_NUMERICS_EIGEN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "convspec/error.hpp"

namespace convspec::numerics {

/// Dense row-major square matrix.
template <typename Real = double>
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, Real fill = Real(0)) : n_(n), data_(n * n, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  Real& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const Real& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  Real max_abs() const {
    Real m = 0;
    for (const Real v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  Real frobenius() const {
    Real s = 0;
    for (const Real v : data_) s += v * v;
    return std::sqrt(s);
  }

 private:
  std::size_t n_ = 0;
  std::vector<Real> data_;
};

/// Symmetric tridiagonal matrix: diag has n entries, offdiag n - 1.
template <typename Real = double>
struct SymTridiag {
  std::vector<Real> diag;
  std::vector<Real> offdiag;

  Matrix<Real> dense() const {
    Matrix<Real> m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    for (std::size_t i = 0; i < offdiag.size(); ++i) m(i, i + 1) = m(i + 1, i) = offdiag[i];
    return m;
  }
};

/// Eigenvalues ascending; vectors[j] is the unit eigenvector of values[j].
template <typename Real = double>
struct EigenDecomposition {
  std::vector<Real> values;
  std::vector<std::vector<Real>> vectors;
};

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// A rotation is skipped when |a_pq| <= eps * sqrt(|a_pp a_qq|), so small
/// eigenvalues of graded matrices keep their relative accuracy. Sweep order is
/// fixed, which makes the result deterministic.
template <typename Real>
EigenDecomposition<Real> sym_eigen(Matrix<Real> a, int max_sweeps = 100) {
  const std::size_t n = a.size();
  const Real scale = a.max_abs();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a(i, j) - a(j, i)) > Real(1e-12) * scale)
        throw DomainError("sym_eigen: matrix is not symmetric");

  Matrix<Real> v = Matrix<Real>::identity(n);
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real tiny = std::numeric_limits<Real>::min() / eps;

  bool converged = n < 2;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Real apq = a(p, q);
        const Real app = a(p, p);
        const Real aqq = a(q, q);
        if (std::abs(apq) <= eps * std::sqrt(std::abs(app * aqq)) || std::abs(apq) <= tiny * scale) {
          a(p, q) = a(q, p) = 0;
          continue;
        }
        rotated = true;
        const Real theta = (aqq - app) / (2 * apq);
        Real t;
        if (std::abs(theta) > Real(1e100)) {
          t = Real(0.5) / theta;
        } else {
          t = (theta >= 0 ? Real(1) : Real(-1)) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        }
        const Real c = 1 / std::sqrt(t * t + 1);
        const Real s = t * c;
        const Real tau = s / (1 + c);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const Real arp = a(r, p);
          const Real arq = a(r, q);
          a(r, p) = a(p, r) = arp - s * (arq + tau * arp);
          a(r, q) = a(q, r) = arq + s * (arp - tau * arq);
        }
        for (std::size_t r = 0; r < n; ++r) {
          const Real vrp = v(r, p);
          const Real vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) throw ConvergenceError("sym_eigen: no convergence after " + std::to_string(max_sweeps) + " sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenDecomposition<Real> out;
  out.values.resize(n);
  out.vectors.assign(n, std::vector<Real>(n));
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors[j][i] = v(i, order[j]);
  }
  return out;
}

/// The n_lowest smallest eigenpairs of a symmetric tridiagonal matrix.
template <typename Real>
EigenDecomposition<Real> tridiag_eigen(const SymTridiag<Real>& t, std::size_t n_lowest) {
  if (t.diag.empty()) throw DomainError("tridiag_eigen: empty matrix");
  if (t.offdiag.size() + 1 != t.diag.size()) throw DomainError("tridiag_eigen: offdiag length must be diag length - 1");
  auto full = sym_eigen(t.dense());
  const std::size_t m = std::min(n_lowest, t.diag.size());
  full.values.resize(m);
  full.vectors.resize(m);
  return full;
}

}  // namespace convspec::numerics

#endif  // CONVSPEC_NUMERICS_EIGEN_HPP
