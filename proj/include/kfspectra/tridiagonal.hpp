#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kfspectra {

/// Real symmetric tridiagonal matrix: diag has size m, off has size m-1.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const noexcept { return diag.size(); }

  /// y = T x
  std::vector<double> multiply(const std::vector<double> &x) const {
    const std::size_t m = size();
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) {
      double v = diag[i] * x[i];
      if (i > 0)
        v += off[i - 1] * x[i - 1];
      if (i + 1 < m)
        v += off[i] * x[i + 1];
      y[i] = v;
    }
    return y;
  }

  /// Gershgorin interval containing the whole spectrum.
  std::pair<double, double> gershgorin() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const std::size_t m = size();
    for (std::size_t i = 0; i < m; ++i) {
      double radius = 0.0;
      if (i > 0)
        radius += std::abs(off[i - 1]);
      if (i + 1 < m)
        radius += std::abs(off[i]);
      lo = std::min(lo, diag[i] - radius);
      hi = std::max(hi, diag[i] + radius);
    }
    return {lo, hi};
  }
};

/// Number of eigenvalues strictly below sigma, from the signs of the pivots
/// of the LDL^T factorization of T - sigma I (Sturm sequence count).
inline std::size_t sturm_count(const SymTridiagonal &t, double sigma) {
  const std::size_t m = t.size();
  if (m == 0)
    return 0;
  const double tiny = std::numeric_limits<double>::min() /
                      std::numeric_limits<double>::epsilon();
  std::size_t count = 0;
  double q = t.diag[0] - sigma;
  for (std::size_t i = 0;; ++i) {
    if (q == 0.0)
      q = -tiny;
    if (q < 0.0)
      ++count;
    if (i + 1 == m)
      break;
    q = t.diag[i + 1] - sigma - t.off[i] * t.off[i] / q;
  }
  return count;
}

/// k-th smallest eigenvalue (k = 0, 1, ...) by bisection on Sturm counts,
/// refined until the bracket is at the rounding level of its endpoints.
inline double bisect_eigenvalue(const SymTridiagonal &t, std::size_t k) {
  if (k >= t.size())
    throw std::out_of_range("bisect_eigenvalue: index exceeds matrix order");
  auto [lo, hi] = t.gershgorin();
  const double eps = std::numeric_limits<double>::epsilon();
  const double pad = eps * std::max({1.0, std::abs(lo), std::abs(hi)});
  lo -= pad;
  hi += pad;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi)))
      break;
    if (sturm_count(t, mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

/// The `count` smallest eigenvalues in ascending order.
inline std::vector<double> lowest_eigenvalues(const SymTridiagonal &t,
                                              std::size_t count) {
  if (count > t.size())
    throw std::out_of_range("lowest_eigenvalues: count exceeds matrix order");
  std::vector<double> ev(count);
  for (std::size_t k = 0; k < count; ++k)
    ev[k] = bisect_eigenvalue(t, k);
  return ev;
}

namespace detail {

// Solves (T - sigma I) x = b by Gaussian elimination with partial pivoting.
// Exactly singular pivots are nudged so the solve always completes; that is
// the desired behaviour inside inverse iteration.
inline std::vector<double> shifted_solve(const SymTridiagonal &t, double sigma,
                                         std::vector<double> b) {
  const std::size_t m = t.size();
  std::vector<double> d(m), du(m, 0.0), du2(m, 0.0), dl(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    d[i] = t.diag[i] - sigma;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    du[i] = t.off[i];
    dl[i] = t.off[i];
  }
  const double tiny = std::numeric_limits<double>::epsilon() *
                      std::max(1.0, std::abs(sigma));
  for (std::size_t i = 0; i + 1 < m; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0)
        d[i] = tiny;
      const double f = dl[i] / d[i];
      dl[i] = f;
      d[i + 1] -= f * du[i];
      b[i + 1] -= f * b[i];
    } else {
      // swap rows i and i+1
      const double f = d[i] / dl[i];
      d[i] = dl[i];
      dl[i] = f;
      const double tmp = du[i];
      du[i] = d[i + 1];
      d[i + 1] = tmp - f * d[i + 1];
      if (i + 2 < m) {
        du2[i] = du[i + 1];
        du[i + 1] = -f * du2[i];
      }
      std::swap(b[i], b[i + 1]);
      b[i + 1] -= f * b[i];
    }
  }
  if (d[m - 1] == 0.0)
    d[m - 1] = tiny;
  std::vector<double> x(m);
  for (std::size_t i = m; i-- > 0;) {
    double v = b[i];
    if (i + 1 < m)
      v -= du[i] * x[i + 1];
    if (i + 2 < m)
      v -= du2[i] * x[i + 2];
    x[i] = v / d[i];
  }
  return x;
}

inline double norm2(const std::vector<double> &x) {
  double s = 0.0;
  for (double v : x)
    s += v * v;
  return std::sqrt(s);
}

} // namespace detail

struct EigenVector {
  std::vector<double> values; ///< unit 2-norm, largest component positive
  double rayleigh = 0.0;      ///< Rayleigh quotient x^T T x
  int sweeps = 0;
  bool converged = false;
};

/// Eigenvector for an eigenvalue estimate by shifted inverse iteration from a
/// fixed deterministic start vector. Convergence is declared when successive
/// iterates agree to `tol` in the 2-norm (up to sign); at most 50 sweeps.
inline EigenVector inverse_iteration(const SymTridiagonal &t, double lambda,
                                     double tol = 1e-10) {
  const std::size_t m = t.size();
  EigenVector out;
  const auto [glo, ghi] = t.gershgorin();
  const double scale = std::max({1.0, std::abs(glo), std::abs(ghi)});
  const double shift =
      lambda + 4.0 * std::numeric_limits<double>::epsilon() * scale;

  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i)
    x[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3);
  double nx = detail::norm2(x);
  for (double &v : x)
    v /= nx;

  for (int sweep = 1; sweep <= 50; ++sweep) {
    auto y = detail::shifted_solve(t, shift, x);
    const double ny = detail::norm2(y);
    if (!(ny > 0.0) || !std::isfinite(ny))
      break;
    double dot = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      y[i] /= ny;
      dot += y[i] * x[i];
    }
    const double sgn = dot < 0.0 ? -1.0 : 1.0;
    double diff = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double dv = y[i] - sgn * x[i];
      diff += dv * dv;
    }
    x = std::move(y);
    out.sweeps = sweep;
    if (std::sqrt(diff) < tol) {
      out.converged = true;
      break;
    }
  }

  std::size_t imax = 0;
  for (std::size_t i = 1; i < m; ++i)
    if (std::abs(x[i]) > std::abs(x[imax]))
      imax = i;
  if (x[imax] < 0.0)
    for (double &v : x)
      v = -v;

  const auto tx = t.multiply(x);
  double rq = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    rq += x[i] * tx[i];
  out.rayleigh = rq;
  out.values = std::move(x);
  return out;
}

} // namespace kfspectra
