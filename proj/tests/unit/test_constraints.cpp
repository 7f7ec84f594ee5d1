#include <catch_amalgamated.hpp>

#include <numbers>

#include "test_support.hpp"
#include "tqw/constraints.hpp"

using namespace tqw;
using std::numbers::pi;

namespace {

const std::vector<double> eps_list{1e-2, 1e-3, 1e-4};

double sign_r(int r) { return r == 0 ? 1.0 : -1.0; }

/// Mixed-branch family: theta_alpha0 in pi Z (or phi_alpha in pi Z) and matched half angles.
GeneralCoinFamily mixed_family(std::mt19937_64& g, int r, bool pin_theta0) {
  GeneralCoinFamily f;
  f.alpha.delta = oracle::uniform(g, -pi, pi);
  f.beta.delta = pi / 2 - f.alpha.delta + pi * std::floor(oracle::uniform(g, -2, 2));
  if (pin_theta0) {
    f.alpha.theta0 = oracle::uniform(g, 0, 1) < 0.5 ? 0.0 : pi;
    f.alpha.phi = oracle::uniform(g, -pi, pi);
  } else {
    f.alpha.theta0 = oracle::uniform(g, -pi, pi);
    f.alpha.phi = oracle::uniform(g, 0, 1) < 0.5 ? 0.0 : pi;
  }
  f.alpha.zeta = oracle::uniform(g, -pi, pi);
  f.alpha.theta_half = oracle::uniform(g, -2, 2);
  f.beta.theta_half = sign_r(r) * f.alpha.theta_half;
  f.beta.theta0 = sign_r(r) * f.alpha.theta0 + pi;
  f.beta.zeta = f.alpha.phi + (r + 1) * pi;
  f.beta.phi = -f.alpha.zeta + (r + 1) * pi;
  f.twist = oracle::uniform(g, -pi, pi);
  return f;
}

/// Dirac-branch family; the twist is tied to theta_alpha0.
GeneralCoinFamily dirac_family(std::mt19937_64& g, int r, int twist_case) {
  GeneralCoinFamily f;
  f.alpha.delta = oracle::uniform(g, -pi, pi);
  f.beta.delta = -f.alpha.delta + pi * std::floor(oracle::uniform(g, -2, 2));
  f.alpha.zeta = oracle::uniform(g, -pi, pi);
  f.alpha.theta_half = oracle::uniform(g, -2, 2);
  switch (twist_case) {
    case 0:  // theta_alpha0 in pi Z, twist = theta_alpha0 + pi
      f.alpha.theta0 = oracle::uniform(g, 0, 1) < 0.5 ? 0.0 : pi;
      f.alpha.phi = oracle::uniform(g, -pi, pi);
      f.twist = f.alpha.theta0 + pi;
      break;
    case 1:  // phi_alpha even multiple of pi
      f.alpha.theta0 = oracle::uniform(g, -pi, pi);
      f.alpha.phi = 0.0;
      f.twist = f.alpha.theta0 + pi;
      break;
    default:  // phi_alpha odd multiple of pi
      f.alpha.theta0 = oracle::uniform(g, -pi, pi);
      f.alpha.phi = pi;
      f.twist = -f.alpha.theta0 + pi;
      break;
  }
  f.beta.theta_half = sign_r(r) * f.alpha.theta_half;
  f.beta.theta0 = sign_r(r) * f.alpha.theta0;
  f.beta.zeta = -f.alpha.phi + (r + 1) * pi;
  f.beta.phi = -f.alpha.zeta + (r + 1) * pi;
  return f;
}

void require_limit_converges(const GeneralCoinFamily& f) {
  for (double kappa : {-1.0, 0.6}) {
    const LimitCheck c = numeric_limit_check(f, eps_list, kappa);
    INFO("kappa " << kappa << " slope " << c.slope_generator);
    CHECK(c.converged);
    // Residuals shrink like sqrt(epsilon) with a kappa-dependent prefactor.
    CHECK(c.slope_generator > 0.4);
    CHECK(c.rows.back().generator_residual < 0.2 * c.rows.front().generator_residual);
  }
}

}  // namespace

TEST_CASE("YY coin family satisfies the constraints with H_c as generator", "[constraints]") {
  for (double theta : {0.0, 0.6, pi / 2, 2.5}) {
    const GeneralCoinFamily f = GeneralCoinFamily::yy(0.8, theta, 0.5);
    const ConstraintReport r = check_constraints(f);
    INFO("theta " << theta);
    REQUIRE(r.satisfied);
    CHECK(r.branch == LimitBranch::Mixed);
    CHECK(r.zeroth_order_residual < 1e-12);
    CHECK(r.half_order_residual < 1e-12);
    REQUIRE(r.hamiltonian.has_value());
    CHECK(std::abs(r.c1 + 1.6) < 1e-12);
    CHECK(std::abs(r.c2 - std::sin(theta)) < 1e-12);
    CHECK(std::abs(r.hamiltonian->h0[2] + 0.25) < 1e-12);  // -(m/2)
    const ContinuumModel hc = continuum_model(WalkSpec::yy(0.8, theta, 0.5, 0.01));
    for (double kappa : {-1.0, 0.3, 2.0}) {
      CHECK(max_abs_diff(r.hamiltonian->at(kappa), hc.hamiltonian(kappa)) < 1e-12);
    }
    require_limit_converges(f);
  }
}

TEST_CASE("leading-order XI coins satisfy the constraints", "[constraints]") {
  const ConstraintReport r = check_constraints(GeneralCoinFamily::xi(-0.4));
  REQUIRE(r.satisfied);
  CHECK(std::abs(r.c1 - 0.8) < 1e-12);
  CHECK(std::abs(r.c2) < 1e-12);
}

TEST_CASE("random mixed-branch families meet both routes and the printed generator", "[constraints]") {
  auto g = oracle::rng(404);
  for (int trial = 0; trial < 40; ++trial) {
    const int r = trial % 2;
    const GeneralCoinFamily f = mixed_family(g, r, (trial / 2) % 2 == 0);
    const ConstraintReport rep = check_constraints(f);
    INFO("trial " << trial);
    REQUIRE(rep.satisfied);
    CHECK(rep.branch == LimitBranch::Mixed);
    CHECK(rep.zeroth_order_residual < 1e-12);
    CHECK(rep.half_order_residual < 1e-12);
    const auto& a = f.alpha;
    const double c1 = -a.theta_half * std::cos(a.theta0) * std::sin(a.phi);
    const double c2 =
        -(std::cos(a.theta0) * std::sin(f.twist) - std::cos(f.twist) * std::sin(a.theta0) * std::cos(a.phi));
    CHECK(std::abs(rep.c1 - c1) < 1e-11);
    CHECK(std::abs(rep.c2 - c2) < 1e-11);
    if (trial < 8) require_limit_converges(f);
  }
}

TEST_CASE("mixed branch with phi_alpha = pi/2 leaves the beta half angle free", "[constraints]") {
  auto g = oracle::rng(405);
  for (int trial = 0; trial < 10; ++trial) {
    GeneralCoinFamily f = GeneralCoinFamily::yy(0.0, oracle::uniform(g, -pi, pi));
    f.alpha.theta_half = oracle::uniform(g, -2, 2);
    f.beta.theta_half = oracle::uniform(g, -2, 2);
    const ConstraintReport rep = check_constraints(f);
    REQUIRE(rep.satisfied);
    CHECK(rep.half_order_residual < 1e-12);
    const double ct = std::cos(f.twist);
    const double c1 = 0.5 * ((1 + ct) * f.alpha.theta_half + (1 - ct) * f.beta.theta_half);
    CHECK(std::abs(rep.c1 - c1) < 1e-11);
    if (trial < 3) require_limit_converges(f);
  }
}

TEST_CASE("random Dirac-branch families meet both routes and the printed generator", "[constraints]") {
  auto g = oracle::rng(406);
  for (int trial = 0; trial < 36; ++trial) {
    const int r = trial % 2;
    const GeneralCoinFamily f = dirac_family(g, r, (trial / 2) % 3);
    const ConstraintReport rep = check_constraints(f);
    INFO("trial " << trial);
    REQUIRE(rep.satisfied);
    CHECK(rep.branch == LimitBranch::Dirac);
    CHECK(rep.zeroth_order_residual < 1e-12);
    CHECK(rep.half_order_residual < 1e-12);
    const auto& a = f.alpha;
    const std::array<double, 3> axis{a.theta_half * std::cos(a.phi) * std::cos(a.theta0),
                                     -a.theta_half * std::sin(a.phi) * std::cos(a.theta0),
                                     a.theta_half * std::sin(a.theta0)};
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(rep.hamiltonian->h1[j] - axis[j]) < 1e-11);
      CHECK(std::abs(rep.hamiltonian->h2[j]) < 1e-11);
    }
    if (trial < 6) require_limit_converges(f);
  }
}

TEST_CASE("families off the constraint manifold are rejected and do not converge", "[constraints]") {
  auto g = oracle::rng(407);
  for (int trial = 0; trial < 10; ++trial) {
    GeneralCoinFamily f = trial % 2 == 0 ? mixed_family(g, 0, true) : dirac_family(g, 1, 1);
    f.beta.delta += 0.3;
    const ConstraintReport rep = check_constraints(f);
    CHECK_FALSE(rep.satisfied);
    CHECK_FALSE(rep.hamiltonian.has_value());
    CHECK(rep.worst_residual > 0.1);
    CHECK(rep.zeroth_order_residual > 0.1);
    const LimitCheck c = numeric_limit_check(f, eps_list, 0.5);
    CHECK_FALSE(c.converged);
  }
}

TEST_CASE("a half-angle mismatch breaks only the half-order route", "[constraints]") {
  auto g = oracle::rng(9);
  GeneralCoinFamily f = dirac_family(g, 0, 1);
  f.beta.theta_half += 0.5;
  const ConstraintReport rep = check_constraints(f);
  CHECK_FALSE(rep.satisfied);
  CHECK(rep.zeroth_order_residual < 1e-12);
  CHECK(rep.half_order_residual > 0.1);
}

TEST_CASE("residuals are distances to the nearest branch", "[constraints]") {
  CHECK(detail::branch_distance(3 * pi + 0.01, 0.0, pi) == Catch::Approx(0.01).margin(1e-12));
  CHECK(detail::branch_distance(-pi / 2, pi / 2, pi) == Catch::Approx(0.0).margin(1e-15));
  CHECK(detail::branch_distance(0.4, 0.0, 2 * pi) == Catch::Approx(0.4));
}

TEST_CASE("constraint residuals fall within tolerance only on the manifold", "[constraints]") {
  GeneralCoinFamily f = GeneralCoinFamily::yy(0.5, 1.0);
  f.beta.zeta += 1e-7;
  CHECK_FALSE(check_constraints(f, 1e-9).satisfied);
  CHECK(check_constraints(f, 1e-6).satisfied);
}
