#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "kfspectra/frobenius.hpp"
#include "kfspectra/radial_model.hpp"
#include "kfspectra/tridiagonal.hpp"

namespace kfspectra {

/// Uniform grid r_i = i h, i = 1..M, h = R/(M+1). The end points 0 and R are
/// excluded, which imposes psi(0) = psi(R) = 0.
struct GridSpec {
  double box_radius = 20.0;
  std::size_t points = 12000;

  double spacing() const { return box_radius / (static_cast<double>(points) + 1.0); }
  double node(std::size_t i) const { return static_cast<double>(i) * spacing(); }

  void check() const {
    if (!(box_radius > 0.0))
      throw DomainError("GridSpec: box radius must be positive");
    if (points < 3)
      throw DomainError("GridSpec: at least 3 interior points required");
  }

  /// Same box, spacing halved.
  GridSpec refined() const { return {box_radius, 2 * points + 1}; }
};

inline constexpr std::size_t max_grid_points = 200000;
inline constexpr std::size_t default_grid_points = 12000;

/// Box radius max(30/alpha, 20) with alpha the decay rate of the most diffuse
/// requested level n_max.
inline GridSpec default_grid(const RadialProblem &p, int n_max,
                             std::size_t points = default_grid_points) {
  const double alpha = quantized_decay(p, n_max);
  return {std::max(30.0 / alpha, 20.0), points};
}

/// Three-point stencil for -psi''/2 + V_eff psi on the grid, with an arbitrary
/// effective potential.
template <class Potential>
SymTridiagonal discretize(const GridSpec &grid, Potential &&v_eff) {
  grid.check();
  const double h = grid.spacing();
  const double kinetic = 1.0 / (h * h);
  SymTridiagonal t;
  t.diag.resize(grid.points);
  t.off.assign(grid.points - 1, -0.5 * kinetic);
  for (std::size_t i = 0; i < grid.points; ++i)
    t.diag[i] = kinetic + v_eff(grid.node(i + 1));
  return t;
}

inline SymTridiagonal discretize(const RadialProblem &p, const GridSpec &grid) {
  return discretize(grid, [&p](double r) { return effective_potential(p, r); });
}

/// Strict sign changes across the samples, ignoring entries whose magnitude is
/// below 1e-12 of the largest.
inline int count_nodes(const std::vector<double> &v) {
  double vmax = 0.0;
  for (double x : v)
    vmax = std::max(vmax, std::abs(x));
  const double floor = 1e-12 * vmax;
  int nodes = 0, last = 0;
  for (double x : v) {
    if (std::abs(x) < floor)
      continue;
    const int s = x > 0.0 ? 1 : -1;
    if (last != 0 && s != last)
      ++nodes;
    last = s;
  }
  return nodes;
}

struct OracleResult {
  std::vector<double> eigenvalues; ///< ascending
  std::vector<std::vector<double>> eigenvectors;
  std::vector<int> node_counts;
  std::vector<bool> vector_converged;
  GridSpec grid;
  bool extrapolated = false;
  /// Requested levels that came out >= 0 and were dropped as box artifacts.
  std::size_t dropped_nonnegative = 0;
};

/// The `count` lowest eigenvalues via Sturm bisection and, optionally, their
/// eigenvectors by inverse iteration.
inline OracleResult lowest_eigenpairs(const SymTridiagonal &t, std::size_t count,
                                      bool with_vectors = true) {
  OracleResult res;
  res.eigenvalues = lowest_eigenvalues(t, count);
  if (with_vectors) {
    for (double ev : res.eigenvalues) {
      auto vec = inverse_iteration(t, ev);
      res.node_counts.push_back(count_nodes(vec.values));
      res.vector_converged.push_back(vec.converged);
      res.eigenvectors.push_back(std::move(vec.values));
    }
  }
  return res;
}

/// Bound states of the discretized problem: only negative eigenvalues are
/// kept; non-negative ones are box artifacts and are counted as dropped.
inline OracleResult solve_on_grid(const RadialProblem &p, const GridSpec &grid,
                                  std::size_t count, bool with_vectors = true) {
  require_valid(p);
  if (grid.points > max_grid_points)
    throw DomainError("solve_on_grid: grid exceeds the point budget");
  auto res = lowest_eigenpairs(discretize(p, grid), count, with_vectors);
  res.grid = grid;
  std::size_t keep = 0;
  while (keep < res.eigenvalues.size() && res.eigenvalues[keep] < 0.0)
    ++keep;
  res.dropped_nonnegative = res.eigenvalues.size() - keep;
  res.eigenvalues.resize(keep);
  if (with_vectors) {
    res.eigenvectors.resize(keep);
    res.node_counts.resize(keep);
    res.vector_converged.resize(keep);
  }
  return res;
}

struct ExtrapolatedEnergy {
  double energy = 0.0;         ///< (4 E(h/2) - E(h)) / 3
  double error_estimate = 0.0; ///< |E(h/2) - E(h)| / 3
  double coarse = 0.0;         ///< E(h)
  double fine = 0.0;           ///< E(h/2)
  std::string warning;         ///< non-empty when the estimate exceeds 1e-4
  bool ok = true;              ///< false when the level is not bound on both grids
};

/// Richardson extrapolation of levels 0..count-1 from grids h and h/2, under
/// the O(h^2) error model of the three-point stencil.
inline std::vector<ExtrapolatedEnergy>
extrapolate_levels(const RadialProblem &p, std::size_t count,
                   const GridSpec &grid) {
  const GridSpec fine_grid = grid.refined();
  if (fine_grid.points > max_grid_points)
    throw DomainError("extrapolate: refined grid exceeds the point budget of " +
                      std::to_string(max_grid_points) + " points");
  const auto coarse = solve_on_grid(p, grid, count, false);
  const auto fine = solve_on_grid(p, fine_grid, count, false);
  std::vector<ExtrapolatedEnergy> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    auto &e = out[k];
    if (k >= coarse.eigenvalues.size() || k >= fine.eigenvalues.size()) {
      e.ok = false;
      e.warning = "level " + std::to_string(k) + " is not bound in the box";
      e.energy = std::nan("");
      continue;
    }
    e.coarse = coarse.eigenvalues[k];
    e.fine = fine.eigenvalues[k];
    e.energy = (4.0 * e.fine - e.coarse) / 3.0;
    e.error_estimate = std::abs(e.fine - e.coarse) / 3.0;
    if (e.error_estimate > 1e-4)
      e.warning = "accuracy warning: extrapolation error estimate " +
                  std::to_string(e.error_estimate) + " exceeds 1e-4";
  }
  return out;
}

inline ExtrapolatedEnergy extrapolate(const RadialProblem &p, int level,
                                      const GridSpec &grid) {
  if (level < 0)
    throw DomainError("extrapolate: level must be non-negative");
  return extrapolate_levels(p, static_cast<std::size_t>(level) + 1, grid).back();
}

/// Convenience: extrapolated energies of levels 0..n_max on the default grid.
inline std::vector<ExtrapolatedEnergy> oracle_energies(const RadialProblem &p,
                                                       int n_max) {
  return extrapolate_levels(p, static_cast<std::size_t>(n_max) + 1,
                            default_grid(p, n_max));
}

/// Positions where the sampled eigenvector changes sign, located by linear
/// interpolation between neighbouring grid nodes (same floor as count_nodes).
inline std::vector<double> node_positions(const std::vector<double> &v,
                                          const GridSpec &grid) {
  double vmax = 0.0;
  for (double x : v)
    vmax = std::max(vmax, std::abs(x));
  const double floor = 1e-12 * vmax;
  std::vector<double> nodes;
  std::size_t last = v.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) < floor)
      continue;
    if (last != v.size() && (v[i] > 0.0) != (v[last] > 0.0)) {
      const double r0 = grid.node(last + 1), r1 = grid.node(i + 1);
      const double f0 = v[last], f1 = v[i];
      nodes.push_back(r0 + (r1 - r0) * f0 / (f0 - f1));
    }
    last = i;
  }
  return nodes;
}

} // namespace kfspectra
