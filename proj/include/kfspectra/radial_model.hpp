#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace kfspectra {

/// Thrown when an input lies outside the domain of an operation. Carries the
/// offending boundary value when one exists (e.g. the regularity bound on B).
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string &what, double boundary = std::nan(""))
      : std::domain_error(what), boundary_(boundary) {}

  double boundary() const noexcept { return boundary_; }

private:
  double boundary_;
};

/// V(r) = -A/r + B/r^2.
///
/// All quantities are pure numbers in the rescaled convention where the
/// Schrodinger equation has been multiplied through by m/hbar^2, so energies
/// and potentials carry units of length^-2.
struct KratzerFuesPotential {
  double A = 1.0; ///< Coulomb-like strength, must be positive for bound states.
  double B = 0.0; ///< inverse-square strength; B > 0 is the physical regime.

  double operator()(double r) const { return -A / r + B / (r * r); }
};

/// Potential plus angular momentum; the object every solver consumes.
struct RadialProblem {
  KratzerFuesPotential potential;
  int l = 0;

  double A() const noexcept { return potential.A; }
  double B() const noexcept { return potential.B; }

  /// Coefficient of 1/r^2 in the effective potential: l(l+1)/2 + B.
  double inverse_square_coefficient() const noexcept {
    return 0.5 * l * (l + 1) + potential.B;
  }
};

/// Smallest B for which a solution regular at the origin exists: -(2l+1)^2/8.
inline double regularity_boundary(int l) {
  const double t = 2.0 * l + 1.0;
  return -t * t / 8.0;
}

/// 8B + 4l^2 + 4l + 1, the indicial discriminant.
inline double regularity_discriminant(const RadialProblem &p) {
  const double l = p.l;
  return 8.0 * p.B() + 4.0 * l * l + 4.0 * l + 1.0;
}

struct ValidityReport {
  bool l_nonnegative = false;
  bool attractive = false;     ///< A > 0
  bool regular = false;        ///< B >= -(2l+1)^2/8
  bool regular_at_equality = false;
  bool physical_regime = false; ///< B > 0, flagged only
  double boundary = 0.0;

  /// Every enforced invariant holds (physical_regime is informational).
  bool ok() const noexcept { return l_nonnegative && attractive && regular; }

  /// Human readable description of the first violated invariant, or "".
  std::string violation() const {
    if (!l_nonnegative)
      return "angular momentum l must be a non-negative integer";
    if (!attractive)
      return "A must be positive (attractive Coulomb tail required for bound "
             "states)";
    if (!regular)
    {
      std::ostringstream os;
      os << "regularity violated: B must satisfy B >= -(2l+1)^2/8 = "
         << boundary;
      return os.str();
    }
    return {};
  }

  bool operator==(const ValidityReport &) const = default;
};

inline ValidityReport validate(const RadialProblem &p) {
  ValidityReport rep;
  rep.l_nonnegative = p.l >= 0;
  rep.attractive = p.A() > 0.0;
  rep.boundary = regularity_boundary(p.l);
  rep.regular = rep.l_nonnegative && p.B() >= rep.boundary;
  rep.regular_at_equality = rep.l_nonnegative && p.B() == rep.boundary;
  rep.physical_regime = p.B() > 0.0;
  return rep;
}

/// Throws DomainError describing the first violated invariant.
inline void require_valid(const RadialProblem &p) {
  const auto rep = validate(p);
  if (!rep.ok())
    throw DomainError(rep.violation(), rep.boundary);
}

/// l(l+1)/(2r^2) + V(r).
inline double effective_potential(const RadialProblem &p, double r) {
  if (!(r > 0.0))
    throw DomainError("effective_potential: radius must be positive");
  return p.inverse_square_coefficient() / (r * r) - p.A() / r;
}

} // namespace kfspectra
