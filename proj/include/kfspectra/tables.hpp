#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "kfspectra/ab_formulas.hpp"
#include "kfspectra/frobenius.hpp"
#include "kfspectra/laguerre_basis.hpp"
#include "kfspectra/numeric_oracle.hpp"

namespace kfspectra {

struct SpectrumRow {
  double A = 0.0, B = 0.0;
  int l = 0;
  int n = 0;
  double energy = 0.0;
  double s = 0.0;
  double decay_alpha = 0.0;

  bool operator==(const SpectrumRow &) const = default;
};

/// Closed-form levels 0..levels-1.
inline std::vector<SpectrumRow> spectrum_table(const RadialProblem &p,
                                               int levels) {
  require_valid(p);
  std::vector<SpectrumRow> rows;
  for (int n = 0; n < levels; ++n) {
    const auto sol = solve_level(p, n);
    rows.push_back({p.A(), p.B(), p.l, n, sol.energy, sol.s, sol.decay_alpha});
  }
  return rows;
}

enum class CheckStatus { Ok, ExceedsTolerance, Failed };

inline std::string_view to_string(CheckStatus s) {
  switch (s) {
  case CheckStatus::Ok:
    return "OK";
  case CheckStatus::ExceedsTolerance:
    return "EXCEEDS_TOL";
  case CheckStatus::Failed:
    return "FAILED";
  }
  return "FAILED";
}

struct VerifyRow {
  double A = 0.0, B = 0.0;
  int l = 0;
  int n = 0;
  double E_closed = 0.0;
  double E_fd = std::nan("");
  double E_fd_error = std::nan(""); ///< Richardson error estimate
  double E_galerkin = std::nan("");
  double max_deviation = std::nan(""); ///< largest pairwise |difference|
  std::string status = "FAILED";
  std::string message;
};

/// Closed form against both oracles for levels 0..levels-1. A row passes when
/// every pairwise deviation is below `settings.tol`.
inline std::vector<VerifyRow> verify_table(const RadialProblem &p, int levels,
                                           const OracleSettings &settings) {
  require_valid(p);
  const int n_max = levels - 1;
  std::vector<VerifyRow> rows(static_cast<std::size_t>(std::max(levels, 0)));
  for (int n = 0; n < levels; ++n) {
    auto &r = rows[static_cast<std::size_t>(n)];
    r.A = p.A();
    r.B = p.B();
    r.l = p.l;
    r.n = n;
    r.E_closed = closed_form_energy(p, n);
  }
  if (levels <= 0)
    return rows;

  std::string fd_failure, gk_failure;
  std::vector<ExtrapolatedEnergy> fd;
  std::vector<double> gk;
  try {
    fd = extrapolate_levels(p, static_cast<std::size_t>(levels),
                            oracle_grid(p, n_max, settings));
  } catch (const std::exception &ex) {
    fd_failure = std::string("finite-difference oracle failed: ") + ex.what();
  }
  try {
    gk = galerkin_spectrum(build_galerkin(oracle_basis(p, n_max, settings), p),
                           static_cast<std::size_t>(levels));
  } catch (const std::exception &ex) {
    gk_failure = std::string("galerkin oracle failed: ") + ex.what();
  }

  for (std::size_t k = 0; k < rows.size(); ++k) {
    auto &r = rows[k];
    std::vector<std::string> notes;
    if (!fd_failure.empty())
      notes.push_back(fd_failure);
    if (!gk_failure.empty())
      notes.push_back(gk_failure);
    if (k < fd.size()) {
      if (fd[k].ok) {
        r.E_fd = fd[k].energy;
        r.E_fd_error = fd[k].error_estimate;
      }
      if (!fd[k].warning.empty())
        notes.push_back(fd[k].warning);
    }
    if (k < gk.size())
      r.E_galerkin = gk[k];

    const double vals[] = {r.E_closed, r.E_fd, r.E_galerkin};
    bool finite = true;
    double dev = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) {
        if (!std::isfinite(vals[a]) || !std::isfinite(vals[b])) {
          finite = false;
          continue;
        }
        dev = std::max(dev, std::abs(vals[a] - vals[b]));
      }
    r.max_deviation = finite ? dev : std::nan("");
    if (!finite)
      r.status = std::string(to_string(CheckStatus::Failed));
    else if (dev < settings.tol)
      r.status = std::string(to_string(CheckStatus::Ok));
    else
      r.status = std::string(to_string(CheckStatus::ExceedsTolerance));
    for (const auto &m : notes)
      r.message += (r.message.empty() ? "" : "; ") + m;
  }
  return rows;
}

struct WavefunctionSample {
  double r = 0.0;
  double phi = 0.0;
  double phi_oracle = std::nan("");
};

/// Grid eigenvector of level n, scaled by least squares onto the closed form
/// and interpolated linearly at r (zero beyond the box).
class OracleWavefunction {
public:
  OracleWavefunction(const RadialProblem &p, int n, const GridSpec &grid)
      : grid_(grid) {
    const auto res = solve_on_grid(p, grid, static_cast<std::size_t>(n) + 1);
    if (res.eigenvectors.size() <= static_cast<std::size_t>(n))
      throw DomainError("oracle wavefunction: level is not bound in the box");
    values_ = res.eigenvectors[static_cast<std::size_t>(n)];
    nodes_ = res.node_counts[static_cast<std::size_t>(n)];
    const auto sol = solve_level(p, n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double exact = wavefunction(sol, grid.node(i + 1));
      num += exact * values_[i];
      den += values_[i] * values_[i];
    }
    const double factor = den > 0.0 ? num / den : 0.0;
    for (double &v : values_)
      v *= factor;
  }

  double operator()(double r) const {
    const double h = grid_.spacing();
    const double t = r / h; // node index of r, r_i = i h
    if (t <= 0.0 || t >= static_cast<double>(values_.size()) + 1.0)
      return 0.0;
    const auto i = static_cast<std::size_t>(std::floor(t));
    const double f = t - static_cast<double>(i);
    const double left = i == 0 ? 0.0 : values_[i - 1];
    const double right = i < values_.size() ? values_[i] : 0.0;
    return (1.0 - f) * left + f * right;
  }

  const std::vector<double> &samples() const noexcept { return values_; }
  const GridSpec &grid() const noexcept { return grid_; }
  int node_count() const noexcept { return nodes_; }

private:
  GridSpec grid_;
  std::vector<double> values_;
  int nodes_ = 0;
};

/// Evenly spaced samples of phi on [rmin, rmax].
inline std::vector<WavefunctionSample>
wavefunction_table(const RadialProblem &p, int n, double rmin, double rmax,
                   std::size_t samples, const OracleWavefunction *oracle) {
  if (!(rmin > 0.0))
    throw DomainError("wavefunction: rmin must be positive");
  if (!(rmax >= rmin))
    throw DomainError("wavefunction: rmax must not be below rmin");
  if (samples == 0)
    throw DomainError("wavefunction: at least one sample required");
  const auto sol = solve_level(p, n);
  std::vector<WavefunctionSample> out;
  for (std::size_t i = 0; i < samples; ++i) {
    const double r =
        samples == 1 ? rmin
                     : rmin + (rmax - rmin) * static_cast<double>(i) /
                                  static_cast<double>(samples - 1);
    WavefunctionSample w{r, wavefunction(sol, r)};
    if (oracle)
      w.phi_oracle = (*oracle)(r);
    out.push_back(w);
  }
  return out;
}

} // namespace kfspectra
