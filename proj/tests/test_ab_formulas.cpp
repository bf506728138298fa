#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "kfspectra/ab_formulas.hpp"

using namespace kfspectra;
using Catch::Approx;

TEST_CASE("parametrization", "[ab_formulas]") {
  const auto ab = ABParametrization::from_ab_alpha(-3.0, 2.0, 1.0, 0, 1);
  CHECK(ab.Z == -3.0);
  CHECK(ab.two_z_over_lambda() == -3.0);
  CHECK(ab.bound_regime());
  CHECK(ab.problem().A() == 3.0);
  CHECK(ab.problem().B() == 1.0);
  CHECK_FALSE(ABParametrization::from_ab_alpha(0.5, 2.0, 1.0, 0, 0).bound_regime());
  CHECK_THROWS_AS(ABParametrization::from_ab_alpha(-1.0, 0.0, 1.0, 0, 0), DomainError);

  const auto kf = ABParametrization::from_kratzer_fues({{1.5, 0.2}, 2}, 3.0, 1);
  CHECK(kf.Z == -1.5);
  CHECK(kf.beta == 0.2);
  CHECK(kf.ab_alpha * kf.lambda_scale / 2.0 == Approx(kf.Z));
}

TEST_CASE("PPS formula", "[ab_formulas]") {
  CHECK(pps_beta(0, 0, -2.0) == 2.0);
  CHECK(pps_beta(0, 0, 0.0) == 0.0);
  CHECK(pps_beta(1, 1, -3.0) == 0.0);

  SECTION("monic quadratic in k with the stated roots") {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> t(-6.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      const int l = i % 5;
      const double q = t(rng);
      // beta(k) treated as a polynomial in real k
      auto beta = [&](double k) { return (k + l + 1 + q) * (k - l + q); };
      CHECK(beta(-l - 1 - q) == Approx(0.0).margin(1e-12));
      CHECK(beta(l - q) == Approx(0.0).margin(1e-12));
      // second difference of a monic quadratic is 2
      CHECK(pps_beta(2, l, q) - 2 * pps_beta(1, l, q) + pps_beta(0, l, q) ==
            Approx(2.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("level bound", "[ab_formulas]") {
  CHECK(ab_level_bound(-2.0) == 1);
  CHECK(ab_level_bound(-0.5) == 0);
  CHECK_FALSE(ab_level_bound(0.0).has_value());
  CHECK_FALSE(ab_level_bound(-0.49).has_value());
  CHECK(ab_level_bound(-10.25) == 9);

  int prev = std::numeric_limits<int>::max();
  for (double q = -20.0; q <= 2.0; q += 0.01) {
    const int n = ab_level_bound(q).value_or(-1);
    CHECK(n <= prev);
    prev = n;
  }
}

TEST_CASE("energy formulas", "[ab_formulas]") {
  const double expected = -1.0 / (2.0 * std::pow(0.5 + std::sqrt(1.25), 2));
  CHECK(ab_energy(-1.0, 1.0, 0, 0, false) == Approx(expected).epsilon(1e-15));
  CHECK(ab_energy(-1.0, 1.0, 0, 0, false) == Approx(-0.190983).epsilon(1e-6));
  CHECK(ab_energy(-1.0, 1.0, 0, 0, true) == -0.125);
  CHECK(ab_energy(-1.0, 0.0, 0, 0, false) == -0.5);
  CHECK(ab_energy(-1.0, 0.0, 0, 0, true) == -0.5);
  CHECK_THROWS_AS(ab_energy(-1.0, -0.3, 0, 0, false), DomainError);
  CHECK_THROWS_AS(ab_energy(-1.0, -0.2, 0, 0, true), DomainError);
  CHECK_NOTHROW(ab_energy(-1.0, -0.2, 0, 0, false));

  SECTION("corrected formula equals the closed form") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> a(0.05, 10.0), u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const int l = i % 6, n = (i / 6) % 8;
      const double B = regularity_boundary(l) + 6.0 * u(rng);
      const RadialProblem p{{a(rng), B}, l};
      const double ab = ab_energy(-p.A(), B, l, n, true);
      const double cf = closed_form_energy(p, n);
      CHECK(std::abs(ab - cf) <= 2 * std::numeric_limits<double>::epsilon() * std::abs(cf));
    }
  }

  SECTION("uncorrected formula differs whenever B > 0") {
    for (double B : {1e-3, 0.1, 1.0, 5.0})
      for (int l = 0; l < 3; ++l)
        CHECK(ab_energy(-1.0, B, l, 1, false) != closed_form_energy({{1.0, B}, l}, 1));
    CHECK(std::abs(ab_energy(-1.0, 1.0, 0, 0, false) - closed_form_energy({{1.0, 1.0}, 0}, 0)) >
          0.06);
  }
}

TEST_CASE("discrepancy report", "[ab_formulas]") {
  SECTION("B = 1 ground state confirms the corrected formula") {
    const auto rep = build_discrepancy_report({{1.0, 1.0, 0, 0}});
    REQUIRE(rep.rows.size() == 1);
    const auto &r = rep.rows[0];
    CHECK(r.E_ab == Approx(-0.190983).epsilon(1e-5));
    CHECK(r.E_ab_corrected == -0.125);
    CHECK(std::abs(r.E_oracle + 0.125) < 1e-6);
    CHECK(std::abs(r.E_galerkin + 0.125) < 1e-8);
    CHECK(r.verdict == Verdict::ConfirmsCorrected);
    CHECK(r.E_frobenius == closed_form_energy({{1.0, 1.0}, 0}, 0));
    CHECK(r.ab_bound == 1);
    CHECK_FALSE(r.exceeds_ab_bound);
    CHECK(r.Z == -1.0);
    CHECK(r.lambda_level == Approx(1.0));
  }
  SECTION("Coulomb rows are degenerate") {
    const auto rep = build_discrepancy_report({{1.0, 0.0, 0, 0}});
    CHECK(rep.rows[0].E_ab == -0.5);
    CHECK(rep.rows[0].E_ab_corrected == -0.5);
    CHECK(rep.rows[0].verdict == Verdict::Degenerate);
  }
  SECTION("excited state with l = 1") {
    const auto rep = build_discrepancy_report({{2.0, 0.5, 1, 1}});
    CHECK(rep.rows[0].verdict == Verdict::ConfirmsCorrected);
    CHECK(rep.rows[0].E_ab_corrected == Approx(rep.rows[0].E_frobenius).epsilon(1e-15));
  }
  SECTION("rows beyond the bound are flagged") {
    std::vector<SweepPoint> sweep;
    for (int k = 0; k < 4; ++k)
      sweep.push_back({1.0, 1.0, 0, k});
    const auto rep = build_discrepancy_report(sweep);
    REQUIRE(rep.rows.size() == 4);
    for (int k = 0; k < 4; ++k) {
      CHECK(rep.rows[k].point.n == k); // input order
      CHECK(rep.rows[k].two_z_over_lambda == Approx(-2.0).epsilon(1e-14));
      CHECK(rep.rows[k].ab_bound == 1);
      CHECK(rep.rows[k].exceeds_ab_bound == (k > 1));
      CHECK(rep.rows[k].verdict == Verdict::ConfirmsCorrected);
    }
  }
  SECTION("failures stay in their row") {
    OracleSettings bad;
    bad.grid_points = 150000; // refinement exceeds the point budget
    const auto rep = build_discrepancy_report({{1.0, 1.0, 0, 0}, {1.0, -1.0, 0, 0}}, bad);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].verdict == Verdict::OracleFailed);
    CHECK_FALSE(rep.rows[0].message.empty());
    CHECK(std::isfinite(rep.rows[0].E_galerkin));
    CHECK(rep.rows[1].verdict == Verdict::Invalid);
  }
  SECTION("demo sweep") {
    const auto rep = build_discrepancy_report(demo_sweep());
    CHECK(rep.count(Verdict::ConfirmsCorrected) == 3);
    CHECK(rep.count(Verdict::Degenerate) == 1);
  }
  SECTION("classification rules") {
    CHECK(classify(1.0, -0.2, -0.125, -0.125, 1e-6) == Verdict::ConfirmsCorrected);
    CHECK(classify(1.0, -0.125, -0.2, -0.125, 1e-6) == Verdict::ConfirmsUncorrected);
    CHECK(classify(1.0, -0.125000001, -0.125, -0.125, 1e-6) == Verdict::Inconclusive);
    CHECK(classify(1.0, -0.2, -0.125, std::nan(""), 1e-6) == Verdict::OracleFailed);
    CHECK(classify(0.0, -0.5, -0.5, -0.5, 1e-6) == Verdict::Degenerate);
  }
}
