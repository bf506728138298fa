#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "kfspectra/polynomial.hpp"
#include "kfspectra/radial_model.hpp"

namespace kfspectra {

/// Bound state obtained from the power-series ansatz
///   phi(r) = r^s exp(-decay_alpha r) sum_j coeffs[j] r^j.
struct FrobeniusSolution {
  double s = 0.0;
  double decay_alpha = 0.0;
  int n = 0;
  double energy = 0.0;
  Coefficients coeffs; ///< c_0..c_n with c_0 = 1
};

/// Positive root of the indicial equation s(s-1) = l(l+1) + 2B. The negative
/// root yields solutions irregular at the origin and is never used.
inline double indicial_exponent(const RadialProblem &p) {
  if (p.l < 0)
    throw DomainError("indicial_exponent: l must be non-negative");
  const double disc = regularity_discriminant(p);
  if (disc < 0.0)
    throw DomainError("indicial_exponent: " + validate(p).violation(),
                      regularity_boundary(p.l));
  return 0.5 * (std::sqrt(disc) + 1.0);
}

/// c_{j+1}/c_j = 2(alpha(j+s) - A) / ((j+1)(j+2s)).
inline double recurrence_step(int j, double s, double decay_alpha, double A) {
  if (j < 0)
    throw DomainError("recurrence_step: index must be non-negative");
  if (!(s > 0.0))
    throw DomainError("recurrence_step: exponent s must be positive (singular "
                      "denominator)");
  return 2.0 * (decay_alpha * (j + s) - A) / ((j + 1.0) * (j + 2.0 * s));
}

namespace detail {

inline void require_level(int n) {
  if (n < 0)
    throw DomainError("level index n must be non-negative");
}

inline double checked_exponent(const RadialProblem &p) {
  require_valid(p);
  return indicial_exponent(p);
}

} // namespace detail

/// Quantized decay rate alpha = A/(n+s).
inline double quantized_decay(const RadialProblem &p, int n) {
  detail::require_level(n);
  return p.A() / (n + detail::checked_exponent(p));
}

/// E_{n,l} = -A^2 / (2 (n+s)^2).
inline double closed_form_energy(const RadialProblem &p, int n) {
  detail::require_level(n);
  detail::checked_exponent(p);
  // long double intermediates, one rounding at the end
  using LD = long double;
  const LD two_l1 = 2 * p.l + 1;
  const LD ns = n + (std::sqrt(8 * LD(p.B()) + two_l1 * two_l1) + 1) / 2;
  return static_cast<double>(-LD(p.A()) * p.A() / (2 * ns * ns));
}

/// Terminating coefficients c_0..c_n of u(r) at the quantized decay rate.
inline Coefficients polynomial_coefficients(const RadialProblem &p, int n) {
  detail::require_level(n);
  const double s = detail::checked_exponent(p);
  const double alpha = p.A() / (n + s);
  Coefficients c(static_cast<std::size_t>(n) + 1);
  c[0] = 1.0;
  for (int j = 0; j < n; ++j)
    c[j + 1] = recurrence_step(j, s, alpha, p.A()) * c[j];
  return c;
}

/// The coefficient c_{n+1} implied by the recurrence after the last retained
/// term; zero up to the rounding of alpha(n+s) - A.
inline double termination_coefficient(const RadialProblem &p, int n) {
  const double s = detail::checked_exponent(p);
  const double alpha = p.A() / (n + s);
  const auto c = polynomial_coefficients(p, n);
  return recurrence_step(n, s, alpha, p.A()) * c.back();
}

inline FrobeniusSolution solve_level(const RadialProblem &p, int n) {
  FrobeniusSolution sol;
  sol.n = n;
  sol.s = detail::checked_exponent(p);
  detail::require_level(n);
  sol.decay_alpha = p.A() / (n + sol.s);
  sol.energy = closed_form_energy(p, n);
  sol.coeffs = polynomial_coefficients(p, n);
  return sol;
}

/// phi(r) = r^s e^{-alpha r} u(r) for the terminated polynomial u.
inline double wavefunction(const FrobeniusSolution &sol, double r) {
  if (!(r > 0.0))
    throw DomainError("wavefunction: radius must be positive");
  return std::pow(r, sol.s) * std::exp(-sol.decay_alpha * r) *
         poly_eval(sol.coeffs, r).p;
}

inline double wavefunction(const RadialProblem &p, int n, double r) {
  if (!(r > 0.0))
    throw DomainError("wavefunction: radius must be positive");
  return wavefunction(solve_level(p, n), r);
}

namespace detail {

/// Coefficients of u in t, where r = scale * t. The scale first maps r to
/// x = 2 alpha r (Laguerre form) and then balances |c_0| against |c_n|, so
/// the roots are O(1) and the Sturm trimming never drops the leading term.
inline Coefficients balanced_polynomial(const FrobeniusSolution &sol,
                                        double &scale) {
  Coefficients q(sol.coeffs);
  const std::size_t n = q.size() - 1;
  scale = 1.0 / (2.0 * sol.decay_alpha);
  if (n > 0)
    scale *= std::pow(std::abs(q.front() / (q.back() * std::pow(scale, n))),
                      1.0 / n);
  double f = 1.0;
  for (double &c : q) {
    c *= f;
    f *= scale;
  }
  return q;
}

} // namespace detail

/// Positive zeros of the terminated polynomial for level n (the nodes of
/// phi), ascending.
inline std::vector<double> polynomial_nodes(const FrobeniusSolution &sol) {
  double scale = 1.0;
  auto roots = positive_roots(detail::balanced_polynomial(sol, scale));
  for (double &t : roots)
    t *= scale;
  return roots;
}

/// Number of distinct positive real roots of u, by Sturm sequence.
inline int polynomial_node_count(const FrobeniusSolution &sol) {
  double scale = 1.0;
  return SturmSequence(detail::balanced_polynomial(sol, scale))
      .count_positive_roots();
}

/// Left side of the equation satisfied by u(r) after substituting the ansatz,
/// for arbitrary (s, alpha, E):
///   -u''/2 + (alpha - s/r) u' + (alpha s - A) u / r
///     + [2B + l(l+1) - s(s-1)] u / (2 r^2) - (alpha^2 + 2E) u / 2.
/// `scale` is the largest magnitude among the individual pieces of the terms.
struct OdeResidual {
  double value = 0.0;
  double scale = 0.0;
  double inverse_square_term = 0.0; ///< the 1/r^2 contribution alone

  double relative() const {
    return scale > 0.0 ? std::abs(value) / scale : std::abs(value);
  }
};

inline OdeResidual ode_residual_full(const RadialProblem &p, double s,
                                     double decay_alpha, double energy,
                                     std::span<const double> u, double r) {
  if (!(r > 0.0))
    throw DomainError("ode_residual_full: radius must be positive");
  const auto v = poly_eval(u, r);
  const double l = p.l;
  const double t[] = {
      -0.5 * v.d2p,
      (decay_alpha - s / r) * v.dp,
      (decay_alpha * s - p.A()) * v.p / r,
      (2.0 * p.B() + l * (l + 1.0) - s * (s - 1.0)) * v.p / (2.0 * r * r),
      -(decay_alpha * decay_alpha + 2.0 * energy) * v.p / 2.0,
  };
  OdeResidual res;
  for (double x : t) {
    res.value += x;
    res.scale = std::max(res.scale, std::abs(x));
  }
  // Scale: every piece of every term, with u, u', u'' replaced by sums of
  // |c_j| r^j (the size of what Horner actually adds up), so rounding in an
  // alternating polynomial or in a cancelling coefficient is not mistaken
  // for a residual.
  Coefficients mag(u.begin(), u.end());
  for (double &c : mag)
    c = std::abs(c);
  const auto m = poly_eval(mag, r);
  res.scale = std::max({res.scale, 0.5 * m.d2p, decay_alpha * m.dp, s / r * m.dp,
                        std::max(decay_alpha * s, p.A()) * m.p / r,
                        std::max({std::abs(2.0 * p.B()), l * (l + 1.0),
                                  std::abs(s * (s - 1.0))}) *
                            m.p / (2.0 * r * r),
                        std::max(decay_alpha * decay_alpha, std::abs(2.0 * energy)) *
                            m.p / 2.0});
  res.inverse_square_term = t[3];
  return res;
}

/// Same, with E tied to the decay rate through alpha = sqrt(-2E).
inline OdeResidual ode_residual_full(const RadialProblem &p, double s,
                                     double decay_alpha,
                                     std::span<const double> u, double r) {
  return ode_residual_full(p, s, decay_alpha,
                           -0.5 * decay_alpha * decay_alpha, u, r);
}

/// First `terms` coefficients of the (generally non-terminating) series for u.
inline Coefficients series_coefficients(double s, double decay_alpha, double A,
                                        std::size_t terms) {
  Coefficients c;
  if (terms == 0)
    return c;
  c.reserve(terms);
  c.push_back(1.0);
  for (std::size_t j = 0; j + 1 < terms; ++j)
    c.push_back(recurrence_step(static_cast<int>(j), s, decay_alpha, A) *
                c.back());
  return c;
}

/// Result of summing the power series for u(r) at one radius.
struct SeriesValue {
  double value = 0.0;
  std::size_t terms = 0;
  bool converged = false;
};

/// Sums u(r) = sum_j c_j r^j until three consecutive terms each fall below
/// 1e-15 of the running partial sum, with a hard cap of 1e5 terms.
inline SeriesValue series_value(double s, double decay_alpha, double A,
                                double r) {
  constexpr std::size_t max_terms = 100000;
  constexpr double rel = 1e-15;
  SeriesValue out;
  double term = 1.0;
  double sum = 0.0;
  int small_run = 0;
  for (std::size_t j = 0; j < max_terms; ++j) {
    sum += term;
    out.terms = j + 1;
    if (std::abs(term) < rel * std::abs(sum)) {
      if (++small_run == 3) {
        out.converged = true;
        break;
      }
    } else {
      small_run = 0;
    }
    term *= recurrence_step(static_cast<int>(j), s, decay_alpha, A) * r;
  }
  out.value = sum;
  return out;
}

} // namespace kfspectra
