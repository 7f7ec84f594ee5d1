#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <ostream>
#include <utility>
#include <vector>

#include "tqw/coin_algebra.hpp"
#include "tqw/csv.hpp"
#include "tqw/errors.hpp"
#include "tqw/fft.hpp"
#include "tqw/lattice_walk.hpp"
#include "tqw/momentum_analysis.hpp"
#include "tqw/parallel.hpp"
#include "tqw/walk_spec.hpp"

namespace tqw {

/// H(kappa) = sum_j (h0_j + kappa h1_j + kappa^2 h2_j) sigma_j, j over (x, y, z).
struct QuadraticHamiltonian {
  std::array<double, 3> h0{};
  std::array<double, 3> h1{};
  std::array<double, 3> h2{};

  [[nodiscard]] std::array<double, 3> vector_at(double kappa) const {
    std::array<double, 3> v{};
    for (std::size_t j = 0; j < 3; ++j) v[j] = h0[j] + kappa * (h1[j] + kappa * h2[j]);
    return v;
  }
  [[nodiscard]] Mat2 at(double kappa) const {
    const auto v = vector_at(kappa);
    return reconstruct({cplx{}, cplx{v[0]}, cplx{v[1]}, cplx{v[2]}});
  }
};

/// H_c(kappa) = -(m/2) sigma_z + (c1 kappa + c2 kappa^2) sigma_y.
struct ContinuumModel {
  double mass = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  [[nodiscard]] QuadraticHamiltonian quadratic() const {
    return {{0.0, 0.0, -0.5 * mass}, {0.0, c1, 0.0}, {0.0, c2, 0.0}};
  }
  [[nodiscard]] Mat2 hamiltonian(double kappa) const { return quadratic().at(kappa); }
};

/// YY: c1 = -2 alpha1, c2 = sin theta. XI: c1 = -(2 alpha1 + theta1/2), c2 = 0.
inline ContinuumModel continuum_model(const WalkSpec& spec) {
  switch (spec.variant) {
    case Variant::YY: return {spec.mass(), -2.0 * spec.alpha1(), std::sin(spec.theta)};
    case Variant::XI: return {spec.mass(), -(2.0 * spec.alpha1() + 0.5 * spec.theta1()), 0.0};
    case Variant::General: break;
  }
  throw PreconditionError("general walks have no built-in continuum model; use check_constraints");
}

/// Eigenvalues of H_c(kappa), larger first.
inline std::pair<double, double> continuum_spectrum(const ContinuumModel& model, double kappa) {
  const double off = model.c1 * kappa + model.c2 * kappa * kappa;
  const double lam = std::sqrt(0.25 * model.mass * model.mass + off * off);
  return {lam, -lam};
}

/// exp(-i t H) for traceless H = v . sigma.
inline Mat2 propagator(const std::array<double, 3>& v, double t) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (n == 0.0) return Mat2::identity();
  const double s = std::sin(n * t) / n;
  return reconstruct({cplx{std::cos(n * t)}, cplx{0.0, -s * v[0]}, cplx{0.0, -s * v[1]},
                      cplx{0.0, -s * v[2]}});
}

/// Angular wavenumber of DFT mode j on an n-site lattice of spacing dx.
inline double mode_wavenumber(std::size_t j, std::size_t n, double dx) {
  const auto jj = static_cast<double>(j);
  const auto nn = static_cast<double>(n);
  const double wrapped = j <= n / 2 ? jj : jj - nn;
  return 2.0 * std::numbers::pi * wrapped / (nn * dx);
}

/// Exact evolution under i d/dt Psi = H Psi on the lattice's discrete Fourier dual.
inline SpinorField evolve_continuum(const SpinorField& initial, const QuadraticHamiltonian& h,
                                    double t) {
  if (!(t >= 0.0)) throw PreconditionError("continuum time must be >= 0");
  SpinorField out = initial;
  if (t == 0.0) return out;
  const std::size_t n = initial.size();
  FftPair fft(n);
  auto& p = out.plus();
  auto& q = out.minus();
  fft.forward(p);
  fft.forward(q);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Mat2 u = propagator(h.vector_at(mode_wavenumber(j, n, initial.dx())), t);
    const Spinor v = u * Spinor{p[j], q[j]};
    p[j] = v.plus * inv_n;
    q[j] = v.minus * inv_n;
  }
  fft.backward(p);
  fft.backward(q);
  return out;
}

inline SpinorField evolve_continuum(const SpinorField& initial, const ContinuumModel& model,
                                    double t) {
  return evolve_continuum(initial, model.quadratic(), t);
}

/// The same walk re-discretized at another epsilon with its scaled coefficients held.
inline WalkSpec rescaled(const WalkSpec& base, double epsilon) {
  switch (base.variant) {
    case Variant::YY: return WalkSpec::yy(base.alpha1(), base.theta, base.mass(), epsilon);
    case Variant::XI:
      return WalkSpec::xi(base.alpha1(), base.theta1(), base.mass(), epsilon, base.twist_scaled);
    case Variant::General: break;
  }
  throw PreconditionError("general walks carry no scaling law; use a GeneralCoinFamily");
}

struct LimitResidual {
  double epsilon = 0.0;
  double unitary_residual = 0.0;    // ||U(eps) - I||
  double generator_residual = 0.0;  // ||(U(eps) - I)/eps + 2i H||
};

struct LimitCheck {
  double kappa = 0.0;
  std::vector<LimitResidual> rows;
  double slope_unitary = 0.0;
  double slope_generator = 0.0;
  bool converged = false;
};

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(std::max(y[i], std::numeric_limits<double>::min()));
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(std::max(y[i], std::numeric_limits<double>::min())) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

/// Residuals below this are treated as exact zeros.
inline constexpr double limit_noise_floor = 1e-12;

template <class UnitaryAtEps>
LimitCheck limit_check(UnitaryAtEps&& unitary_at_eps, const Mat2& hc,
                       const std::vector<double>& eps_list, double kappa) {
  if (eps_list.size() < 2) throw PreconditionError("need at least two epsilon values");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0) || (i > 0 && !(eps_list[i] < eps_list[i - 1]))) {
      throw PreconditionError("epsilon list must be positive and strictly decreasing");
    }
  }
  LimitCheck out;
  out.kappa = kappa;
  std::vector<double> r1, r2;
  const Mat2 two_i_h = cplx{0.0, 2.0} * hc;
  for (double eps : eps_list) {
    const Mat2 du = unitary_at_eps(eps) - Mat2::identity();
    const double a = frobenius_norm(du);
    const double b = frobenius_norm(cplx{1.0 / eps} * du + two_i_h);
    out.rows.push_back({eps, a, b});
    r1.push_back(a);
    r2.push_back(b);
  }
  out.slope_unitary = loglog_slope(eps_list, r1);
  out.slope_generator = loglog_slope(eps_list, r2);
  const bool negligible =
      std::all_of(r2.begin(), r2.end(), [](double r) { return r <= limit_noise_floor; });
  bool decreasing = true;
  for (std::size_t i = 1; i < r2.size(); ++i) decreasing = decreasing && r2[i] < r2[i - 1];
  out.converged = negligible || (decreasing && out.slope_generator > 0.0);
  return out;
}

/// Residuals of the YY/XI walk at continuum momentum kappa (lattice k = kappa sqrt(eps))
/// against the built-in continuum model.
inline LimitCheck numeric_limit_check(const WalkSpec& base, const std::vector<double>& eps_list,
                                      double kappa) {
  const Mat2 hc = continuum_model(base).hamiltonian(kappa);
  return limit_check(
      [&](double eps) { return unitary_at_k(rescaled(base, eps), kappa * std::sqrt(eps)); }, hc,
      eps_list, kappa);
}

struct InitialPacket {
  double mu_x = 0.0;
  double sigma2 = 1.0;
  Spinor spinor{cplx{1.0}, cplx{}};
};

struct ConvergenceRow {
  double epsilon = 0.0;
  std::size_t n_steps = 0;
  double t = 0.0;
  std::size_t n_sites = 0;
  double l2_error = 0.0;
  bool wrapped = false;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  bool strictly_decreasing = false;
  bool any_wrapped = false;
};

/// Walk vs continuum density error at one epsilon. The walk runs ceil(t_final/step_time)
/// steps; the continuum is evaluated at the walk's own elapsed time.
inline ConvergenceRow convergence_point(const WalkSpec& base, double epsilon, double t_final,
                                        const InitialPacket& init) {
  const WalkSpec spec = rescaled(base, epsilon);
  const double steps = t_final / spec.step_time();
  const auto n_steps = static_cast<std::size_t>(std::ceil(steps - 1e-9));
  const double sigma = std::sqrt(init.sigma2);
  const std::size_t n_sites = required_sites(n_steps, sigma, spec.dx(), substeps(spec).size());
  const SpinorField start = gaussian_init(n_sites, spec.dx(), init.mu_x, init.sigma2, init.spinor);
  const Trajectory walk = evolve(start, spec, n_steps);
  const double t = static_cast<double>(n_steps) * spec.step_time();
  const SpinorField cont = evolve_continuum(start, continuum_model(spec), t);
  double acc = 0.0;
  for (std::size_t l = 0; l < n_sites; ++l) {
    const double d = walk.final_state.probability(l) - cont.probability(l);
    acc += d * d;
  }
  return {epsilon, n_steps, t, n_sites, std::sqrt(acc / spec.dx()), walk.wrapped};
}

inline ConvergenceTable convergence_study(const WalkSpec& base, const std::vector<double>& eps_list,
                                          double t_final, const InitialPacket& init,
                                          unsigned threads = 1) {
  if (!(t_final >= 0.0)) throw PreconditionError("t_final must be >= 0");
  ConvergenceTable out;
  out.rows.resize(eps_list.size());
  parallel_for(eps_list.size(), threads, [&](std::size_t i) {
    out.rows[i] = convergence_point(base, eps_list[i], t_final, init);
  });
  out.strictly_decreasing = true;
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    out.any_wrapped = out.any_wrapped || out.rows[i].wrapped;
    if (i > 0 && !(out.rows[i].l2_error < out.rows[i - 1].l2_error)) out.strictly_decreasing = false;
  }
  return out;
}

inline void write_csv(std::ostream& os, const ConvergenceTable& table) {
  csv::Writer w(os, {"epsilon", "n_steps", "t", "n_sites", "l2_error", "wrapped"});
  for (const auto& r : table.rows) {
    w.row_text({csv::format(r.epsilon), csv::format(static_cast<long long>(r.n_steps)),
                csv::format(r.t), csv::format(static_cast<long long>(r.n_sites)),
                csv::format(r.l2_error), r.wrapped ? "1" : "0"});
  }
}

}  // namespace tqw
