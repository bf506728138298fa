#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "kfspectra/frobenius.hpp"
#include "kfspectra/quadrature.hpp"
#include "kfspectra/radial_model.hpp"
#include "kfspectra/tridiagonal.hpp"

namespace kfspectra {

/// Parameters of the scaled-Laguerre basis
///   phi_n(r) = (lambda r)^mu exp(-lambda r / 2) L_n^nu(lambda r),  n < size.
///
/// mu > 1/2 is required (rather than merely mu > 0) so that the weak-form
/// kinetic integrand, which behaves like r^(2mu-2) at the origin, is
/// integrable.
struct BasisSpec {
  double lambda = 1.0;
  double mu = 1.0;
  double nu = 0.0;
  std::size_t size = 30;

  void check() const {
    if (!(lambda > 0.0))
      throw DomainError("BasisSpec: lambda must be positive", 0.0);
    if (!(mu > 0.5))
      throw DomainError("BasisSpec: mu must exceed 1/2", 0.5);
    if (!(nu > -1.0))
      throw DomainError("BasisSpec: nu must exceed -1", -1.0);
    if (size == 0)
      throw DomainError("BasisSpec: basis size must be positive");
  }
};

/// Generalized Laguerre polynomial L_n^nu(x) by the three-term recurrence
///   (k+1) L_{k+1} = (2k + nu + 1 - x) L_k - (k + nu) L_{k-1}.
namespace detail {

template <class T> T laguerre_recurrence(int n, T nu, T x) {
  if (n < 0)
    return T(0);
  T prev = 1;
  if (n == 0)
    return prev;
  T cur = nu + 1 - x;
  for (int k = 1; k < n; ++k) {
    const T next = ((2 * k + nu + 1 - x) * cur - (k + nu) * prev) / (k + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

template <class T> T basis_value(const BasisSpec &spec, int n, T r) {
  const T x = static_cast<T>(spec.lambda) * r;
  return std::pow(x, static_cast<T>(spec.mu)) * std::exp(-x / 2) *
         laguerre_recurrence<T>(n, static_cast<T>(spec.nu), x);
}

} // namespace detail

inline double laguerre_eval(int n, double nu, double x) {
  return detail::laguerre_recurrence<double>(n, nu, x);
}

/// L, dL/dx, d2L/dx2 using d/dx L_n^nu = -L_{n-1}^{nu+1}.
struct LaguerreDerivs {
  double value = 0.0, d1 = 0.0, d2 = 0.0;
};

inline LaguerreDerivs laguerre_derivs(int n, double nu, double x) {
  return {laguerre_eval(n, nu, x), -laguerre_eval(n - 1, nu + 1.0, x),
          laguerre_eval(n - 2, nu + 2.0, x)};
}

inline double basis_function(const BasisSpec &spec, int n, double r) {
  spec.check();
  if (!(r > 0.0))
    throw DomainError("basis_function: radius must be positive");
  return detail::basis_value<double>(spec, n, r);
}

/// Which pieces of the bracket to include; the flag exists so the identity
/// check can be shown to fail when a term is removed.
struct BracketOptions {
  bool drop_mu_over_x = false;
};

/// Relative disagreement between
///   LHS = -(2/lambda^2) (H - E) phi_n(r), with the second derivative taken by
///         a 5-point central difference of step 1e-4 r, and
///   RHS = x^mu e^{-x/2} [ L'' + (2mu/x - 1) L' + (mu(mu-1) - l(l+1))/x^2 L
///         - mu/x L + L/4 - 2V/lambda^2 L + 2E/lambda^2 L ],  x = lambda r.
/// Returns |LHS - RHS| / max(|LHS|, |RHS|, 1e-30).
inline double j_identity_residual(const BasisSpec &spec, int n,
                                  const RadialProblem &p, double energy,
                                  double r, BracketOptions opts = {}) {
  spec.check();
  if (!(r > 0.0))
    throw DomainError("j_identity_residual: radius must be positive");
  const double lam = spec.lambda;
  // the stencil runs in long double: with h = 1e-4 r its rounding error,
  // about 5 eps |phi| / h^2, would otherwise dominate where (H - E) phi is small
  using LD = long double;
  const LD rl = r, h = LD(1e-4) * rl;
  auto phi = [&](LD rr) { return detail::basis_value<LD>(spec, n, rr); };
  const LD f0 = phi(rl);
  const LD d2 = (-phi(rl + 2 * h) + 16 * phi(rl + h) - 30 * f0 +
                 16 * phi(rl - h) - phi(rl - 2 * h)) /
                (12 * h * h);
  const double l = p.l;
  const double v = p.potential(r);
  const LD h_phi = -d2 / 2 + (LD(l * (l + 1.0)) / (2 * rl * rl) + LD(v)) * f0;
  const double lhs = static_cast<double>(-2 / (LD(lam) * lam) * (h_phi - LD(energy) * f0));

  const double x = lam * r;
  const double mu = spec.mu;
  const auto L = laguerre_derivs(n, spec.nu, x);
  double bracket = L.d2 + (2.0 * mu / x - 1.0) * L.d1 +
                   (mu * (mu - 1.0) - l * (l + 1.0)) / (x * x) * L.value +
                   0.25 * L.value - 2.0 * v / (lam * lam) * L.value +
                   2.0 * energy / (lam * lam) * L.value;
  if (!opts.drop_mu_over_x)
    bracket -= mu / x * L.value;
  const double rhs = std::pow(x, mu) * std::exp(-0.5 * x) * bracket;
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-30});
}

/// Hamiltonian and overlap matrices of the Rayleigh-Ritz problem H c = E S c.
struct GalerkinSystem {
  Eigen::MatrixXd H;
  Eigen::MatrixXd S;
  std::size_t quadrature_order = 0;
  BasisSpec spec;
};

/// Assembles
///   S_mn = int phi_m phi_n dr,
///   H_mn = int [ phi_m' phi_n' / 2 + V_eff phi_m phi_n ] dr
/// with a Gauss rule for the weight x^(2mu-2) e^{-x}, x = lambda r. Every
/// integrand is then a polynomial of degree <= 2 N_b, so an order of at least
/// N_b + 1 is exact; the default 2 N_b + 8 leaves margin.
inline GalerkinSystem build_galerkin(const BasisSpec &spec,
                                     const RadialProblem &p,
                                     std::size_t quadrature_order = 0) {
  spec.check();
  require_valid(p);
  const std::size_t nb = spec.size;
  if (quadrature_order == 0)
    quadrature_order = 2 * nb + 8;
  const auto rule = gauss_laguerre(quadrature_order, 2.0 * spec.mu - 2.0);

  // Tabulate L_n(x_i) and g_n(x_i) = mu L + x L' - x L / 2 at all nodes.
  const std::size_t q = rule.order();
  Eigen::MatrixXd Lt(q, nb), Gt(q, nb);
  for (std::size_t i = 0; i < q; ++i) {
    const double x = rule.nodes[i];
    for (std::size_t n = 0; n < nb; ++n) {
      const auto L = laguerre_derivs(static_cast<int>(n), spec.nu, x);
      Lt(i, n) = L.value;
      Gt(i, n) = spec.mu * L.value + x * L.d1 - 0.5 * x * L.value;
    }
  }
  Eigen::VectorXd w(q), wx(q), wxx(q);
  for (std::size_t i = 0; i < q; ++i) {
    const double x = rule.nodes[i];
    w(i) = rule.weights[i];
    wx(i) = w(i) * x;
    wxx(i) = wx(i) * x;
  }

  const double lam = spec.lambda;
  const Eigen::MatrixXd overlap_x2 = Lt.transpose() * wxx.asDiagonal() * Lt;
  const Eigen::MatrixXd overlap_x1 = Lt.transpose() * wx.asDiagonal() * Lt;
  const Eigen::MatrixXd overlap_x0 = Lt.transpose() * w.asDiagonal() * Lt;
  const Eigen::MatrixXd kinetic = Gt.transpose() * w.asDiagonal() * Gt;

  GalerkinSystem sys;
  sys.spec = spec;
  sys.quadrature_order = q;
  sys.S = overlap_x2 / lam;
  sys.H = 0.5 * lam * kinetic + lam * p.inverse_square_coefficient() * overlap_x0 -
          p.A() * overlap_x1;
  return sys;
}

/// Lowest `count` eigenvalues of H c = E S c: S = L L^T, C = L^{-1} H L^{-T},
/// Householder tridiagonalization, then Sturm bisection.
inline std::vector<double> galerkin_spectrum(const GalerkinSystem &sys,
                                             std::size_t count) {
  const auto nb = static_cast<std::size_t>(sys.S.rows());
  if (count > nb)
    throw DomainError("galerkin_spectrum: count exceeds basis size");
  Eigen::LLT<Eigen::MatrixXd> llt(sys.S);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    // pivots are the squared diagonal of L
    const Eigen::VectorXd pivots = llt.matrixLLT().diagonal().array().square();
    ok = pivots.minCoeff() > 1e-14 * pivots.maxCoeff();
  }
  if (!ok)
    throw DomainError("galerkin_spectrum: overlap matrix is not numerically "
                      "positive definite; reduce the basis size or change nu");

  Eigen::MatrixXd c = llt.matrixL().solve(sys.H);
  c = llt.matrixL().solve(c.transpose()).eval();
  c = (0.5 * (c + c.transpose())).eval();

  Eigen::Tridiagonalization<Eigen::MatrixXd> tri(c);
  SymTridiagonal t;
  const Eigen::VectorXd d = tri.diagonal();
  const Eigen::VectorXd e = tri.subDiagonal();
  t.diag.assign(d.data(), d.data() + d.size());
  t.off.assign(e.data(), e.data() + e.size());
  return lowest_eigenvalues(t, count);
}

/// Basis matched to level n_target: lambda/2 equals the quantized decay rate,
/// mu = s and nu = 2s - 1, so the exact eigenfunction of that level lies in
/// the span.
inline BasisSpec default_basis(const RadialProblem &p, int n_target,
                               std::size_t size = 30) {
  const double s = indicial_exponent(p);
  BasisSpec spec{2.0 * quantized_decay(p, n_target), s, 2.0 * s - 1.0, size};
  spec.check();
  return spec;
}

/// Galerkin energies of levels 0..n_max in the default basis matched to n_max.
inline std::vector<double> galerkin_energies(const RadialProblem &p, int n_max,
                                             std::size_t size = 30) {
  const auto sys = build_galerkin(default_basis(p, n_max, size), p);
  return galerkin_spectrum(sys, static_cast<std::size_t>(n_max) + 1);
}

/// Largest |(H - E S)_{ij}| on each diagonal offset |i - j| = 0..N_b-1,
/// relative to the largest entry overall. Diagnostic only.
inline std::vector<double> band_profile(const GalerkinSystem &sys,
                                        double energy) {
  const Eigen::MatrixXd j = sys.H - energy * sys.S;
  const auto nb = static_cast<std::size_t>(j.rows());
  std::vector<double> band(nb, 0.0);
  for (std::size_t a = 0; a < nb; ++a)
    for (std::size_t b = 0; b < nb; ++b) {
      const std::size_t k = a > b ? a - b : b - a;
      band[k] = std::max(band[k], std::abs(j(a, b)));
    }
  const double top = *std::max_element(band.begin(), band.end());
  if (top > 0.0)
    for (double &v : band)
      v /= top;
  return band;
}

} // namespace kfspectra
