#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kfspectra/frobenius.hpp"
#include "kfspectra/laguerre_basis.hpp"
#include "kfspectra/numeric_oracle.hpp"
#include "kfspectra/parallel.hpp"
#include "kfspectra/radial_model.hpp"

namespace kfspectra {

/// Parametrization the reported ("AB") level formula is written in:
///   V = (lambda^2/2)(ab_alpha x + beta)/x^2 = Z/r + beta/r^2,  x = lambda r,
/// with Z = ab_alpha lambda / 2. Bound states need Z < 0.
struct ABParametrization {
  double Z = 0.0;
  double beta = 0.0;
  double lambda_scale = 1.0;
  double ab_alpha = 0.0;
  int k = 0;
  int l = 0;

  static ABParametrization from_ab_alpha(double ab_alpha, double lambda_scale,
                                         double beta, int k, int l) {
    if (!(lambda_scale > 0.0))
      throw DomainError("ABParametrization: lambda must be positive", 0.0);
    return {ab_alpha * lambda_scale / 2.0, beta, lambda_scale, ab_alpha, k, l};
  }

  /// The library's (A, B) for the same potential: A = -Z, B = beta.
  static ABParametrization from_kratzer_fues(const RadialProblem &p,
                                             double lambda_scale, int k) {
    if (!(lambda_scale > 0.0))
      throw DomainError("ABParametrization: lambda must be positive", 0.0);
    const double Z = -p.A();
    return {Z, p.B(), lambda_scale, 2.0 * Z / lambda_scale, k, p.l};
  }

  double two_z_over_lambda() const { return 2.0 * Z / lambda_scale; }
  bool bound_regime() const { return Z < 0.0; }
  RadialProblem problem() const { return {{-Z, beta}, l}; }
};

/// beta = (k + l + 1 + 2Z/lambda)(k - l + 2Z/lambda)
inline double pps_beta(int k, int l, double two_z_over_lambda) {
  return (k + l + 1.0 + two_z_over_lambda) * (k - l + two_z_over_lambda);
}

/// N = floor(-(1/2 + 2Z/lambda)), or nothing when that quantity is negative
/// (no admissible k at all).
inline std::optional<int> ab_level_bound(double two_z_over_lambda) {
  const double top = -(0.5 + two_z_over_lambda);
  if (!(top >= 0.0))
    return std::nullopt;
  return static_cast<int>(std::floor(top));
}

/// E_k = -Z^2 / (2 [k + 1/2 + sqrt(beta + (l+1/2)^2)]^2), exactly as reported.
/// With `corrected` the radical carries 2 beta instead of beta.
inline double ab_energy(double Z, double beta, int l, int k, bool corrected) {
  const double lh = l + 0.5;
  const double radicand = (corrected ? 2.0 * beta : beta) + lh * lh;
  if (radicand < 0.0)
    throw DomainError("ab_energy: negative radicand under the square root",
                      -lh * lh / (corrected ? 2.0 : 1.0));
  using LD = long double;
  const LD rad = (corrected ? 2 * LD(beta) : LD(beta)) + LD(lh) * lh;
  const LD d = k + LD(0.5) + std::sqrt(rad);
  return static_cast<double>(-LD(Z) * Z / (2 * d * d));
}

enum class Verdict {
  ConfirmsCorrected,
  ConfirmsUncorrected,
  Degenerate,
  Inconclusive,
  OracleFailed,
  Invalid,
};

inline std::string_view to_string(Verdict v) {
  switch (v) {
  case Verdict::ConfirmsCorrected:
    return "CONFIRMS_CORRECTED";
  case Verdict::ConfirmsUncorrected:
    return "CONFIRMS_UNCORRECTED";
  case Verdict::Degenerate:
    return "DEGENERATE";
  case Verdict::Inconclusive:
    return "INCONCLUSIVE";
  case Verdict::OracleFailed:
    return "ORACLE_FAILED";
  case Verdict::Invalid:
    return "INVALID";
  }
  return "INVALID";
}

inline std::optional<Verdict> verdict_from_string(std::string_view s) {
  for (auto v : {Verdict::ConfirmsCorrected, Verdict::ConfirmsUncorrected,
                 Verdict::Degenerate, Verdict::Inconclusive,
                 Verdict::OracleFailed, Verdict::Invalid})
    if (to_string(v) == s)
      return v;
  return std::nullopt;
}

/// One (A, B, l, n) point to adjudicate.
struct SweepPoint {
  double A = 1.0;
  double B = 0.0;
  int l = 0;
  int n = 0;
};

struct OracleSettings {
  double tol = 1e-6;                 ///< finite-difference verdict tolerance
  double galerkin_tol = 1e-8;
  std::size_t grid_points = default_grid_points;
  std::optional<double> box_radius;  ///< default max(30/alpha, 20)
  bool use_galerkin = true;
  std::size_t basis_size = 30;
  std::optional<double> lambda, mu, nu; ///< basis overrides
};

struct DiscrepancyRow {
  SweepPoint point;
  double Z = 0.0;
  double beta = 0.0;
  /// sqrt(-8 E_k) for this level; display only.
  double lambda_level = 0.0;
  /// sqrt(-8 E_0): the single lambda of the potential, used for the bound N.
  double lambda_bound = 0.0;
  double two_z_over_lambda = 0.0;
  std::optional<int> ab_bound;
  bool exceeds_ab_bound = false;
  double E_ab = 0.0;
  double E_ab_corrected = 0.0;
  double E_frobenius = 0.0;
  double E_oracle = std::nan("");
  double E_oracle_error = std::nan("");
  double E_galerkin = std::nan("");
  double dev_ab = std::nan("");        ///< |E_ab - E_oracle|
  double dev_corrected = std::nan(""); ///< |E_ab_corrected - E_oracle|
  Verdict verdict = Verdict::Inconclusive;
  std::string message;
};

struct DiscrepancyReport {
  std::vector<DiscrepancyRow> rows;

  std::size_t count(Verdict v) const {
    std::size_t c = 0;
    for (const auto &r : rows)
      c += r.verdict == v;
    return c;
  }
};

inline GridSpec oracle_grid(const RadialProblem &p, int n_max,
                            const OracleSettings &settings) {
  GridSpec g = default_grid(p, n_max, settings.grid_points);
  if (settings.box_radius)
    g.box_radius = *settings.box_radius;
  return g;
}

inline BasisSpec oracle_basis(const RadialProblem &p, int n_max,
                              const OracleSettings &settings) {
  BasisSpec spec = default_basis(p, n_max, settings.basis_size);
  if (settings.lambda)
    spec.lambda = *settings.lambda;
  if (settings.mu)
    spec.mu = *settings.mu;
  if (settings.nu)
    spec.nu = *settings.nu;
  spec.check();
  return spec;
}

/// Verdict for one row given the oracle and formula energies.
inline Verdict classify(double B, double E_ab, double E_corrected,
                        double E_oracle, double tol) {
  if (B == 0.0)
    return Verdict::Degenerate;
  if (!std::isfinite(E_oracle))
    return Verdict::OracleFailed;
  const double dc = std::abs(E_corrected - E_oracle);
  const double du = std::abs(E_ab - E_oracle);
  if (dc < tol && du > 10.0 * tol)
    return Verdict::ConfirmsCorrected;
  if (du < tol && dc > 10.0 * tol)
    return Verdict::ConfirmsUncorrected;
  return Verdict::Inconclusive;
}

inline DiscrepancyRow adjudicate(const SweepPoint &pt,
                                 const OracleSettings &settings) {
  DiscrepancyRow row;
  row.point = pt;
  const RadialProblem p{{pt.A, pt.B}, pt.l};
  const auto validity = validate(p);
  if (!validity.ok() || pt.n < 0) {
    row.verdict = Verdict::Invalid;
    row.message = pt.n < 0 ? "level index must be non-negative"
                           : validity.violation();
    row.E_ab = row.E_ab_corrected = row.E_frobenius = std::nan("");
    return row;
  }
  row.Z = -pt.A;
  row.beta = pt.B;
  row.E_frobenius = closed_form_energy(p, pt.n);
  row.E_ab = ab_energy(row.Z, row.beta, pt.l, pt.n, false);
  row.E_ab_corrected = ab_energy(row.Z, row.beta, pt.l, pt.n, true);
  row.lambda_level = std::sqrt(-8.0 * row.E_frobenius);
  row.lambda_bound = std::sqrt(-8.0 * closed_form_energy(p, 0));
  row.two_z_over_lambda = 2.0 * row.Z / row.lambda_bound;
  row.ab_bound = ab_level_bound(row.two_z_over_lambda);
  row.exceeds_ab_bound = !row.ab_bound || pt.n > *row.ab_bound;

  try {
    const auto levels = extrapolate_levels(
        p, static_cast<std::size_t>(pt.n) + 1, oracle_grid(p, pt.n, settings));
    const auto &e = levels.back();
    if (!e.ok)
      throw DomainError(e.warning);
    row.E_oracle = e.energy;
    row.E_oracle_error = e.error_estimate;
    if (!e.warning.empty())
      row.message = e.warning;
  } catch (const std::exception &ex) {
    row.message = std::string("finite-difference oracle failed: ") + ex.what();
  }
  if (settings.use_galerkin) {
    try {
      const auto sys = build_galerkin(oracle_basis(p, pt.n, settings), p);
      row.E_galerkin =
          galerkin_spectrum(sys, static_cast<std::size_t>(pt.n) + 1).back();
    } catch (const std::exception &ex) {
      if (!row.message.empty())
        row.message += "; ";
      row.message += std::string("galerkin oracle failed: ") + ex.what();
    }
  }
  if (std::isfinite(row.E_oracle)) {
    row.dev_ab = std::abs(row.E_ab - row.E_oracle);
    row.dev_corrected = std::abs(row.E_ab_corrected - row.E_oracle);
  }
  row.verdict = classify(pt.B, row.E_ab, row.E_ab_corrected, row.E_oracle,
                         settings.tol);
  return row;
}

/// Adjudicates every point; rows keep input order. Failures are recorded per
/// row and never abort the sweep.
inline DiscrepancyReport
build_discrepancy_report(const std::vector<SweepPoint> &sweep,
                         const OracleSettings &settings = {}) {
  DiscrepancyReport report;
  report.rows.resize(sweep.size());
  parallel_for(sweep.size(), [&](std::size_t i) {
    try {
      report.rows[i] = adjudicate(sweep[i], settings);
    } catch (const std::exception &ex) {
      auto &row = report.rows[i];
      row.point = sweep[i];
      row.verdict = Verdict::OracleFailed;
      row.message = ex.what();
    }
  });
  return report;
}

/// Sweep used by `compare-ab` when no parameters are given.
inline std::vector<SweepPoint> demo_sweep() {
  return {{1.0, 1.0, 0, 0}, {1.0, 0.0, 0, 0}, {2.0, 0.5, 1, 1}, {0.5, 1.0, 1, 1}};
}

} // namespace kfspectra
