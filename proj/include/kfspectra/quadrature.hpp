#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "kfspectra/radial_model.hpp"
#include "kfspectra/tridiagonal.hpp"

namespace kfspectra {

/// Gauss rule for integral_0^inf x^a e^{-x} f(x) dx.
struct GaussLaguerreRule {
  double exponent = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t order() const noexcept { return nodes.size(); }

  template <class F> double integrate(F &&f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

namespace detail {

// Orthonormal generalized Laguerre polynomials with respect to the normalized
// measure x^a e^{-x} dx / Gamma(a+1):
//   b_{k+1} p_{k+1} = (x - a_k) p_k - b_k p_{k-1},
//   a_k = 2k + a + 1,  b_k = sqrt(k (k + a)).
struct OrthonormalLaguerre {
  double a;

  double diag(std::size_t k) const { return 2.0 * static_cast<double>(k) + a + 1.0; }
  double offd(std::size_t k) const {
    const double kk = static_cast<double>(k);
    return std::sqrt(kk * (kk + a));
  }

  // p_order(x) and its derivative, values rescaled by a common positive
  // factor (only the ratio p/p' is used).
  std::pair<double, double> value_and_derivative(std::size_t order, double x) const {
    double p0 = 0.0, p1 = 1.0, d0 = 0.0, d1 = 0.0;
    for (std::size_t k = 0; k < order; ++k) {
      const double b1 = offd(k + 1);
      const double p2 = ((x - diag(k)) * p1 - offd(k) * p0) / b1;
      const double d2 = (p1 + (x - diag(k)) * d1 - offd(k) * d0) / b1;
      p0 = p1;
      p1 = p2;
      d0 = d1;
      d1 = d2;
      const double m = std::max(std::abs(p1), std::abs(d1));
      if (m > 1e100) {
        p0 /= m;
        p1 /= m;
        d0 /= m;
        d1 /= m;
      }
    }
    return {p1, d1};
  }

  // 1 / sum_{k<order} p_k(x)^2, evaluated with rescaling to avoid overflow.
  double christoffel(std::size_t order, double x) const {
    double p0 = 0.0, p1 = 1.0;
    double sum = 1.0;
    double log_scale = 0.0; // sum and p's are stored divided by exp(log_scale)
    for (std::size_t k = 0; k + 1 < order; ++k) {
      const double p2 = ((x - diag(k)) * p1 - offd(k) * p0) / offd(k + 1);
      p0 = p1;
      p1 = p2;
      sum += p1 * p1;
      if (std::abs(p1) > 1e100) {
        p0 *= 1e-100;
        p1 *= 1e-100;
        sum *= 1e-200;
        log_scale += 200.0 * std::log(10.0);
      }
    }
    return std::exp(-log_scale) / sum;
  }
};

} // namespace detail

/// Golub-Welsch construction: nodes are the eigenvalues of the Jacobi matrix
/// of the generalized Laguerre polynomials (Sturm bisection, then Newton
/// polishing); weights are Gamma(a+1) times the squared first components of
/// the normalized eigenvectors, i.e. the Christoffel numbers.
inline GaussLaguerreRule gauss_laguerre(std::size_t order, double exponent) {
  if (order == 0)
    throw DomainError("gauss_laguerre: order must be positive");
  if (!(exponent > -1.0))
    throw DomainError("gauss_laguerre: weight exponent must exceed -1", -1.0);

  const detail::OrthonormalLaguerre poly{exponent};
  SymTridiagonal jacobi;
  jacobi.diag.resize(order);
  jacobi.off.resize(order - 1);
  for (std::size_t k = 0; k < order; ++k)
    jacobi.diag[k] = poly.diag(k);
  for (std::size_t k = 0; k + 1 < order; ++k)
    jacobi.off[k] = poly.offd(k + 1);

  GaussLaguerreRule rule;
  rule.exponent = exponent;
  rule.nodes = lowest_eigenvalues(jacobi, order);
  const double mass = std::tgamma(exponent + 1.0);
  for (double &x : rule.nodes) {
    for (int it = 0; it < 3; ++it) {
      const auto [p, dp] = poly.value_and_derivative(order, x);
      if (dp == 0.0)
        break;
      const double step = p / dp;
      if (!std::isfinite(step) || std::abs(step) > 1e-6 * std::max(1.0, x))
        break;
      x -= step;
    }
    rule.weights.push_back(mass * poly.christoffel(order, x));
  }
  return rule;
}

} // namespace kfspectra
