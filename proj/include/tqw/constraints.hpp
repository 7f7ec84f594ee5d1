#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "tqw/coin_algebra.hpp"
#include "tqw/continuum.hpp"

namespace tqw {

/// Coin angles expanded in sqrt(eps): theta = theta0 + sqrt(eps) theta_half.
struct CoinLeg {
  double delta = 0.0;
  double theta0 = 0.0;
  double theta_half = 0.0;
  double phi = 0.0;
  double zeta = 0.0;

  [[nodiscard]] CoinParams at(double epsilon) const {
    return {delta, theta0 + std::sqrt(epsilon) * theta_half, phi, zeta};
  }
};

/// Two-coin family with one fixed twist T = R_y(twist):
/// G = T^-1 S T C_beta S C_alpha, one step U = M G^2.
struct GeneralCoinFamily {
  CoinLeg alpha;
  CoinLeg beta;
  double twist = 0.0;
  double mass = 0.0;

  /// Leading-order coins of the YY walk.
  static GeneralCoinFamily yy(double alpha1, double theta, double mass = 0.0) {
    using std::numbers::pi;
    return {{pi / 2, -pi, -2 * alpha1, pi / 2, -3 * pi / 2},
            {0.0, -2 * pi, -2 * alpha1, pi / 2, -pi / 2},
            theta,
            mass};
  }

  /// Leading-order structure of the XI walk: same coins, twist vanishing as sqrt(eps).
  static GeneralCoinFamily xi(double alpha1, double mass = 0.0) { return yy(alpha1, 0.0, mass); }
};

/// Exact one-step unitary of the family at continuum momentum kappa.
inline Mat2 family_unitary(const GeneralCoinFamily& f, double epsilon, double kappa) {
  const Mat2 s = shift_at_k(kappa * std::sqrt(epsilon));
  const Mat2 t = rotation(Axis::y, f.twist);
  const Mat2 g = t.adjoint() * s * t * coin(f.beta.at(epsilon)) * s * coin(f.alpha.at(epsilon));
  return mass_phase(f.mass * epsilon) * g * g;
}

namespace detail {

/// Matrix power series in s = sqrt(eps), truncated after s^2.
struct Series2 {
  Mat2 c0 = Mat2::identity();
  Mat2 c1 = Mat2::zero();
  Mat2 c2 = Mat2::zero();

  friend Series2 operator*(const Series2& x, const Series2& y) {
    return {x.c0 * y.c0, x.c0 * y.c1 + x.c1 * y.c0, x.c0 * y.c2 + x.c1 * y.c1 + x.c2 * y.c0};
  }
};

inline Series2 constant_series(const Mat2& m) { return {m, Mat2::zero(), Mat2::zero()}; }

inline Series2 coin_series(const CoinLeg& leg) {
  const Mat2 left = std::polar(1.0, leg.delta) *
                    (rotation(Axis::z, leg.zeta) * rotation(Axis::y, leg.theta0));
  const Mat2 right = rotation(Axis::z, leg.phi);
  const double h = leg.theta_half;
  return {left * right, left * (cplx{0.0, -0.5 * h} * pauli::y) * right,
          left * (cplx{-h * h / 8.0} * right)};
}

inline Series2 shift_series(double kappa) {
  return {Mat2::identity(), cplx{0.0, kappa} * pauli::z, cplx{-0.5 * kappa * kappa} * Mat2::identity()};
}

inline Series2 step_series(const GeneralCoinFamily& f, double kappa) {
  const Mat2 t = rotation(Axis::y, f.twist);
  const Series2 s = shift_series(kappa);
  const Series2 g = constant_series(t.adjoint()) * s * constant_series(t) * coin_series(f.beta) *
                    s * coin_series(f.alpha);
  const Series2 m{Mat2::identity(), Mat2::zero(), cplx{0.0, f.mass} * pauli::z};
  return m * g * g;
}

/// Distance from value to offset + n period for the nearest |n| <= 4.
inline double branch_distance(double value, double offset, double period) {
  double best = std::numeric_limits<double>::infinity();
  for (int n = -4; n <= 4; ++n) best = std::min(best, std::abs(value - offset - n * period));
  return best;
}

}  // namespace detail

/// Order-eps generator H(kappa) = i U^(1)(kappa) / 2 of the family, where
/// U = I + sqrt(eps) U^(1/2) + eps U^(1) + ... Meaningful when U^(0) = I and U^(1/2) = 0.
inline Mat2 series_generator(const GeneralCoinFamily& f, double kappa) {
  return cplx{0.0, 0.5} * detail::step_series(f, kappa).c2;
}

enum class LimitBranch { Dirac, Mixed };

inline const char* to_string(LimitBranch b) { return b == LimitBranch::Dirac ? "dirac" : "mixed"; }

struct ConstraintCheck {
  std::string name;
  double residual = 0.0;
  bool satisfied = false;
};

struct ConstraintReport {
  /// Dirac: delta_alpha + delta_beta in pi Z. Mixed: in pi/2 + pi Z.
  LimitBranch branch = LimitBranch::Mixed;
  int r = 0;
  std::vector<ConstraintCheck> checks;
  double worst_residual = 0.0;
  double tolerance = 1e-9;
  bool satisfied = false;
  /// Matrix-level conditions ||(G0)^2 - I|| and ||{G0, G_half}|| (max over kappa in {0,1}).
  double zeroth_order_residual = 0.0;
  double half_order_residual = 0.0;
  /// Filled only when satisfied.
  std::optional<QuadraticHamiltonian> hamiltonian;
  std::array<double, 3> dirac_axis{};
  double c1 = 0.0;
  double c2 = 0.0;
};

namespace detail {

inline std::vector<ConstraintCheck> mixed_checks(const GeneralCoinFamily& f, int r) {
  using std::numbers::pi;
  const auto& a = f.alpha;
  const auto& b = f.beta;
  const double sign = r == 0 ? 1.0 : -1.0;
  const double rp1 = (r + 1) * pi;
  return {
      {"delta_sum", branch_distance(a.delta + b.delta, pi / 2, pi), false},
      {"phi_alpha_or_theta_alpha0",
       std::min(branch_distance(a.phi, 0.0, pi), branch_distance(a.theta0, 0.0, pi)), false},
      {"theta_half_or_phi_alpha",
       std::min(std::abs(a.theta_half - sign * b.theta_half), branch_distance(a.phi, pi / 2, pi)),
       false},
      {"theta_beta0", branch_distance(b.theta0, sign * a.theta0 + pi, 2 * pi), false},
      {"zeta_beta", branch_distance(b.zeta, a.phi + rp1, 2 * pi), false},
      {"phi_beta", branch_distance(b.phi, -a.zeta + rp1, 2 * pi), false},
  };
}

inline std::vector<ConstraintCheck> dirac_checks(const GeneralCoinFamily& f, int r) {
  using std::numbers::pi;
  const auto& a = f.alpha;
  const auto& b = f.beta;
  const double sign = r == 0 ? 1.0 : -1.0;
  const double rp1 = (r + 1) * pi;
  // Twist: theta_alpha0 in pi Z with theta = theta_alpha0 + pi, or
  // phi_alpha = n pi with theta = (-1)^n theta_alpha0 + pi (all mod 2 pi).
  const double via_theta0 = std::max(branch_distance(a.theta0, 0.0, pi),
                                     branch_distance(f.twist, a.theta0 + pi, 2 * pi));
  const double via_phi_even = std::max(branch_distance(a.phi, 0.0, 2 * pi),
                                       branch_distance(f.twist, a.theta0 + pi, 2 * pi));
  const double via_phi_odd = std::max(branch_distance(a.phi, pi, 2 * pi),
                                      branch_distance(f.twist, -a.theta0 + pi, 2 * pi));
  return {
      {"delta_sum", branch_distance(a.delta + b.delta, 0.0, pi), false},
      {"theta_half", std::abs(b.theta_half - sign * a.theta_half), false},
      {"zeta_beta", branch_distance(b.zeta, -a.phi + rp1, 2 * pi), false},
      {"theta_beta0", branch_distance(b.theta0, sign * a.theta0, 2 * pi), false},
      {"phi_beta", branch_distance(b.phi, -a.zeta + rp1, 2 * pi), false},
      {"twist", std::min({via_theta0, via_phi_even, via_phi_odd}), false},
  };
}

inline double worst(const std::vector<ConstraintCheck>& checks) {
  double w = 0.0;
  for (const auto& c : checks) w = std::max(w, c.residual);
  return w;
}

inline std::array<double, 3> pauli_vector(const Mat2& h) {
  const PauliCoeffs p = pauli_decompose(h);
  return {p.d1.real(), p.d2.real(), p.d3.real()};
}

}  // namespace detail

/// Tests the continuous-limit existence conditions as residuals against the nearest
/// integer branch, choosing the delta branch and r that fit best.
inline ConstraintReport check_constraints(const GeneralCoinFamily& f, double tol = 1e-9) {
  ConstraintReport best;
  best.worst_residual = std::numeric_limits<double>::infinity();
  for (LimitBranch branch : {LimitBranch::Mixed, LimitBranch::Dirac}) {
    for (int r : {0, 1}) {
      auto checks = branch == LimitBranch::Mixed ? detail::mixed_checks(f, r)
                                                 : detail::dirac_checks(f, r);
      const double w = detail::worst(checks);
      if (w < best.worst_residual) {
        best.branch = branch;
        best.r = r;
        best.checks = std::move(checks);
        best.worst_residual = w;
      }
    }
  }
  best.tolerance = tol;
  for (auto& c : best.checks) c.satisfied = c.residual <= tol;
  best.satisfied = best.worst_residual <= tol;

  const detail::Series2 at0 = detail::step_series(f, 0.0);
  const detail::Series2 at1 = detail::step_series(f, 1.0);
  best.zeroth_order_residual = frobenius_norm(at0.c0 - Mat2::identity());
  best.half_order_residual = std::max(frobenius_norm(at0.c1), frobenius_norm(at1.c1));

  if (best.satisfied) {
    const auto h0 = detail::pauli_vector(series_generator(f, 0.0));
    const auto hp = detail::pauli_vector(series_generator(f, 1.0));
    const auto hm = detail::pauli_vector(series_generator(f, -1.0));
    QuadraticHamiltonian q;
    for (std::size_t j = 0; j < 3; ++j) {
      q.h0[j] = h0[j];
      q.h1[j] = 0.5 * (hp[j] - hm[j]);
      q.h2[j] = 0.5 * (hp[j] + hm[j]) - h0[j];
    }
    best.hamiltonian = q;
    best.dirac_axis = q.h1;
    best.c1 = q.h1[1];
    best.c2 = q.h2[1];
  }
  return best;
}

/// Residuals of the family against its own predicted order-eps generator.
/// For families violating the constraints the generator residual diverges.
inline LimitCheck numeric_limit_check(const GeneralCoinFamily& f,
                                      const std::vector<double>& eps_list, double kappa) {
  return limit_check([&](double eps) { return family_unitary(f, eps, kappa); },
                     series_generator(f, kappa), eps_list, kappa);
}

}  // namespace tqw
