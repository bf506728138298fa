#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace kfspectra {

/// Coefficients in ascending powers: p(x) = sum_j c[j] x^j.
using Coefficients = std::vector<double>;

/// Value and first two derivatives at x, by Horner's scheme.
struct PolyValue {
  double p = 0.0, dp = 0.0, d2p = 0.0;
};

inline PolyValue poly_eval(std::span<const double> c, double x) {
  PolyValue v;
  for (std::size_t k = c.size(); k-- > 0;) {
    v.d2p = v.d2p * x + 2.0 * v.dp;
    v.dp = v.dp * x + v.p;
    v.p = v.p * x + c[k];
  }
  return v;
}

namespace detail {

inline Coefficients trimmed(Coefficients c, double rel_tol) {
  double scale = 0.0;
  for (double x : c)
    scale = std::max(scale, std::abs(x));
  while (!c.empty() && std::abs(c.back()) <= rel_tol * scale)
    c.pop_back();
  if (scale > 0.0)
    for (double &x : c)
      x /= scale;
  return c;
}

inline Coefficients derivative(std::span<const double> c) {
  Coefficients d;
  for (std::size_t k = 1; k < c.size(); ++k)
    d.push_back(static_cast<double>(k) * c[k]);
  return d;
}

// Remainder of a / b (b non-empty, leading coefficient non-zero).
inline Coefficients remainder(Coefficients a, std::span<const double> b) {
  const std::size_t nb = b.size();
  while (a.size() >= nb) {
    const double q = a.back() / b.back();
    const std::size_t shift = a.size() - nb;
    for (std::size_t k = 0; k < nb; ++k)
      a[shift + k] -= q * b[k];
    a.pop_back();
  }
  return a;
}

inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

} // namespace detail

/// Sturm sequence p0 = p, p1 = p', p_{k+1} = -rem(p_{k-1}, p_k).
class SturmSequence {
public:
  explicit SturmSequence(std::span<const double> c) {
    constexpr double tol = 1e-12;
    auto p0 = detail::trimmed(Coefficients(c.begin(), c.end()), tol);
    if (p0.empty())
      return;
    auto p1 = detail::trimmed(detail::derivative(p0), tol);
    seq_.push_back(p0);
    while (!p1.empty()) {
      seq_.push_back(p1);
      auto r = detail::remainder(p0, p1);
      for (double &x : r)
        x = -x;
      p0 = std::move(p1);
      p1 = detail::trimmed(std::move(r), tol);
    }
  }

  /// Sign changes of the sequence at x.
  int sign_changes(double x) const {
    int changes = 0, last = 0;
    for (const auto &p : seq_) {
      const int s = detail::sign_of(poly_eval(p, x).p);
      if (s == 0)
        continue;
      if (last != 0 && s != last)
        ++changes;
      last = s;
    }
    return changes;
  }

  /// Sign changes as x -> +infinity (signs of leading coefficients).
  int sign_changes_at_infinity() const {
    int changes = 0, last = 0;
    for (const auto &p : seq_) {
      const int s = detail::sign_of(p.back());
      if (last != 0 && s != last)
        ++changes;
      last = s;
    }
    return changes;
  }

  /// Number of distinct real roots in (a, b].
  int count_roots(double a, double b) const {
    return sign_changes(a) - sign_changes(b);
  }

  int count_positive_roots() const {
    return sign_changes(0.0) - sign_changes_at_infinity();
  }

  bool empty() const noexcept { return seq_.empty(); }

private:
  std::vector<Coefficients> seq_;
};

/// Cauchy bound: every root satisfies |x| < 1 + max_k |c_k / c_n|.
inline double cauchy_root_bound(std::span<const double> c) {
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < c.size(); ++k)
    m = std::max(m, std::abs(c[k] / c.back()));
  return 1.0 + m;
}

/// Distinct positive real roots in ascending order, isolated with Sturm counts
/// and refined by bisection on the sign of p.
inline std::vector<double> positive_roots(std::span<const double> c) {
  std::vector<double> roots;
  const SturmSequence sturm(c);
  if (sturm.empty() || c.size() < 2)
    return roots;

  std::vector<std::pair<double, double>> pending{{0.0, cauchy_root_bound(c)}};
  while (!pending.empty()) {
    auto [a, b] = pending.back();
    pending.pop_back();
    const int k = sturm.count_roots(a, b);
    if (k == 0)
      continue;
    if (k == 1 || b - a <= 4.0 * std::numeric_limits<double>::epsilon() * b) {
      double lo = a, hi = b;
      double flo = poly_eval(c, lo).p;
      for (int it = 0; it < 200 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = poly_eval(c, mid).p;
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm > 0.0) == (flo > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
      continue;
    }
    const double mid = 0.5 * (a + b);
    pending.emplace_back(a, mid);
    pending.emplace_back(mid, b);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

} // namespace kfspectra
