#include <catch_amalgamated.hpp>

#include <cmath>

#include "kfspectra/frobenius.hpp"
#include "kfspectra/laguerre_basis.hpp"

using namespace kfspectra;
using Catch::Approx;

namespace {

double binomial(double top, int k) {
  return std::tgamma(top + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(top - k + 1.0));
}

const BasisSpec specs[] = {
    {1.3, 1.7, 0.4, 10},
    {0.6, 1.0, 2.5, 10},
    {2.2, 3.0, -0.5, 10},
};

} // namespace

TEST_CASE("Laguerre polynomials", "[laguerre_basis]") {
  CHECK(laguerre_eval(0, 0.7, 3.1) == 1.0);
  CHECK(laguerre_eval(1, 0.0, 2.0) == -1.0);
  CHECK(laguerre_eval(2, 1.0, 0.0) == 3.0);
  // L_3^nu(x) closed form
  for (double nu : {0.0, 1.5})
    for (double x : {0.2, 1.0, 4.0}) {
      const double expected =
          ((nu + 1) * (nu + 2) * (nu + 3) / 6.0) - ((nu + 2) * (nu + 3) / 2.0) * x +
          ((nu + 3) / 2.0) * x * x - x * x * x / 6.0;
      CHECK(laguerre_eval(3, nu, x) == Approx(expected).epsilon(1e-13));
    }
  SECTION("value at the origin is a binomial coefficient") {
    for (double nu : {0.0, 0.5, 1.0, 2.5})
      for (int n = 0; n <= 15; ++n)
        CHECK(std::abs(laguerre_eval(n, nu, 0.0) / binomial(n + nu, n) - 1.0) < 1e-12);
  }
  SECTION("derivative identity against finite differences") {
    const double h = 1e-5;
    for (int n = 1; n < 8; ++n) {
      const double x = 1.7;
      const double fd = (laguerre_eval(n, 0.3, x + h) - laguerre_eval(n, 0.3, x - h)) / (2 * h);
      CHECK(laguerre_derivs(n, 0.3, x).d1 == Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("basis functions", "[laguerre_basis]") {
  CHECK(basis_function({1.0, 1.0, 0.0, 1}, 0, 2.0) ==
        Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(basis_function({1.0, 1.0, 0.0, 1}, 0, 2.0) == Approx(0.73576).epsilon(1e-5));
  CHECK(basis_function({2.0, 1.0, 1.0, 2}, 1, 1.0) == 0.0);
  for (const auto &s : specs)
    for (int n = 0; n < 5; ++n)
      CHECK(std::abs(basis_function(s, n, 1e-12)) < 1e-10);
  CHECK_THROWS_AS(basis_function(specs[0], 0, 0.0), DomainError);
  CHECK_THROWS_AS(basis_function({1.0, 0.5, 0.0, 1}, 0, 1.0), DomainError);
  CHECK_THROWS_AS(basis_function({1.0, 1.0, -1.0, 1}, 0, 1.0), DomainError);
  CHECK_THROWS_AS(basis_function({0.0, 1.0, 0.0, 1}, 0, 1.0), DomainError);
}

TEST_CASE("J-operator identity", "[laguerre_basis]") {
  const RadialProblem p{{1.0, 1.0}, 1}; // Z = -1, beta = 1
  for (const auto &s : specs) {
    const double energy = -s.lambda * s.lambda / 8.0;
    for (int n : {0, 3})
      for (int i = 0; i < 20; ++i) {
        const double r = 0.1 * std::pow(100.0, i / 19.0);
        CHECK(j_identity_residual(s, n, p, energy, r) < 1e-6);
      }
  }
  SECTION("removing the mu/x term breaks it") {
    CHECK(j_identity_residual(specs[0], 0, p, -0.2, 1.0, {true}) > 1e-2);
  }
  CHECK_THROWS_AS(j_identity_residual(specs[0], 0, p, -0.2, 0.0), DomainError);
}

TEST_CASE("Galerkin matrices", "[laguerre_basis]") {
  const RadialProblem p{{1.0, 1.0}, 0};
  for (const auto &s : specs) {
    const auto sys = build_galerkin(s, p);
    CHECK(sys.quadrature_order == 2 * s.size + 8);
    CHECK(sys.S(0, 0) == Approx(std::tgamma(2 * s.mu + 1) / s.lambda).epsilon(1e-12));
    const double hmax = sys.H.cwiseAbs().maxCoeff();
    CHECK((sys.H - sys.H.transpose()).cwiseAbs().maxCoeff() < 1e-12 * hmax);
    CHECK((sys.S - sys.S.transpose()).cwiseAbs().maxCoeff() <
          1e-12 * sys.S.cwiseAbs().maxCoeff());
  }

  SECTION("overlap by direct quadrature of the basis functions") {
    // Midpoint rule on a fine grid as an independent check of S_01 and H_11.
    const BasisSpec s = specs[1];
    const auto sys = build_galerkin(s, p);
    double s01 = 0.0, h11 = 0.0;
    const double dr = 1e-3;
    for (int i = 0; i < 150000; ++i) {
      const double r = (i + 0.5) * dr;
      const double f0 = basis_function(s, 0, r), f1 = basis_function(s, 1, r);
      const double g1 = (basis_function(s, 1, r + 1e-6) - basis_function(s, 1, r - 1e-6)) / 2e-6;
      s01 += f0 * f1 * dr;
      h11 += (0.5 * g1 * g1 + effective_potential(p, r) * f1 * f1) * dr;
    }
    CHECK(sys.S(0, 1) == Approx(s01).epsilon(1e-6));
    CHECK(sys.H(1, 1) == Approx(h11).epsilon(1e-6));
  }

  SECTION("length rescaling") {
    const BasisSpec s{0.8, 1.5, 1.0, 15};
    const auto e1 = galerkin_spectrum(build_galerkin(s, {{1.0, 0.5}, 1}), 4);
    const auto e2 = galerkin_spectrum(
        build_galerkin({2 * s.lambda, s.mu, s.nu, s.size}, {{2.0, 0.5}, 1}), 4);
    for (int k = 0; k < 4; ++k)
      CHECK(e2[k] == Approx(4.0 * e1[k]).epsilon(1e-10));
  }
}

TEST_CASE("Galerkin spectrum", "[laguerre_basis]") {
  SECTION("single function capturing the hydrogen ground state") {
    const auto e = galerkin_spectrum(build_galerkin({2.0, 1.0, 1.0, 1}, {{1.0, 0.0}, 0}), 1);
    CHECK(e[0] == Approx(-0.5).epsilon(1e-14));
  }
  SECTION("B = 1 ground state") {
    const auto e = galerkin_spectrum(build_galerkin({0.5, 2.0, 3.0, 30}, {{1.0, 1.0}, 0}), 1);
    CHECK(std::abs(e[0] + 0.125) < 1e-8);
  }
  SECTION("variational nesting") {
    const RadialProblem p{{1.0, 1.0}, 0};
    const double exact = closed_form_energy(p, 0);
    // lambda and mu off the exact values, so no finite basis holds the state
    const BasisSpec base{1.7, 1.3, 0.5, 10};
    double prev = 1e300;
    for (std::size_t nb : {10u, 20u, 40u}) {
      const auto e = galerkin_spectrum(build_galerkin({base.lambda, base.mu, base.nu, nb}, p), 3);
      CHECK(e[0] <= prev + 1e-12);
      for (int k = 0; k < 3; ++k)
        CHECK(e[k] >= closed_form_energy(p, k) - 1e-12);
      prev = e[0];
    }
    CHECK(prev - exact < 1e-4);
  }
  SECTION("default basis is exact for its target level") {
    for (double B : {0.0, 0.3, 2.0})
      for (int l : {0, 2})
        for (int n : {0, 2}) {
          const RadialProblem p{{1.3, B}, l};
          const auto e = galerkin_spectrum(build_galerkin(default_basis(p, n), p), n + 1);
          CHECK(std::abs(e[n] - closed_form_energy(p, n)) < 1e-10);
        }
  }
  SECTION("loss of positive definiteness is reported") {
    GalerkinSystem sys;
    sys.S = Eigen::MatrixXd::Identity(3, 3);
    sys.S(2, 2) = -1.0;
    sys.H = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(galerkin_spectrum(sys, 1), DomainError);
    sys.S(2, 2) = 1e-20;
    CHECK_THROWS_AS(galerkin_spectrum(sys, 1), DomainError);
  }
  SECTION("band profile diagnostic") {
    const RadialProblem p{{1.0, 1.0}, 0};
    const auto sys = build_galerkin(default_basis(p, 0, 8), p);
    const auto band = band_profile(sys, closed_form_energy(p, 0));
    REQUIRE(band.size() == 8);
    CHECK(*std::max_element(band.begin(), band.end()) == 1.0);
  }
}
