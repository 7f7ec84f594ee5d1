#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tqw/coin_algebra.hpp"
#include "tqw/csv.hpp"
#include "tqw/errors.hpp"
#include "tqw/lattice_walk.hpp"
#include "tqw/walk_spec.hpp"

namespace tqw {

struct DensityProfile {
  std::vector<double> x;
  std::vector<double> rho;
};

inline DensityProfile density(const SpinorField& s) {
  DensityProfile p;
  p.x.resize(s.size());
  p.rho.resize(s.size());
  for (std::size_t l = 0; l < s.size(); ++l) {
    p.x[l] = s.position(l);
    p.rho[l] = s.probability(l);
  }
  return p;
}

struct Moments {
  double m1 = 0.0;
  double m2 = 0.0;
  double variance = 0.0;
};

/// First and second moments; the variance is accumulated about m1 so it stays >= 0.
inline Moments moments(const DensityProfile& p) {
  Moments m;
  for (std::size_t l = 0; l < p.x.size(); ++l) {
    m.m1 += p.rho[l] * p.x[l];
    m.m2 += p.rho[l] * p.x[l] * p.x[l];
  }
  for (std::size_t l = 0; l < p.x.size(); ++l) {
    const double d = p.x[l] - m.m1;
    m.variance += p.rho[l] * d * d;
  }
  return m;
}

inline Moments moments(const SpinorField& s) { return moments(density(s)); }

/// Im[psi+ conj(psi-)] of the normalized spinor.
inline double spin_coherence_im(const Spinor& v) {
  const Spinor u = v.normalized();
  return (u.plus * std::conj(u.minus)).imag();
}

inline double theory_m1_yy(double t, double mu_x, double alpha1, const Spinor& spinor) {
  return mu_x + 4.0 * t * alpha1 * spin_coherence_im(spinor);
}

inline double theory_variance_yy(double t, double sigma2, double alpha1, double theta,
                                 const Spinor& spinor) {
  if (!(sigma2 > 0.0)) throw PreconditionError("sigma2 must be > 0");
  const double im = spin_coherence_im(spinor);
  const double s = std::sin(theta);
  return sigma2 + s * s / sigma2 * t * t + 4.0 * alpha1 * alpha1 * (1.0 - 4.0 * im * im) * t * t;
}

namespace detail {

inline constexpr double eigen_slack = 1e-10;

inline double binary_entropy_of(double lam_plus, double lam_minus) {
  for (double l : {lam_plus, lam_minus}) {
    if (!(l >= -eigen_slack && l <= 1.0 + eigen_slack)) {
      throw NumericalError("reduced density eigenvalue out of range: " + std::to_string(l));
    }
  }
  double s = 0.0;
  for (double l : {lam_plus, lam_minus}) {
    const double p = std::clamp(l, 0.0, 1.0);
    if (p > 0.0) s -= p * std::log2(p);
  }
  return s;
}

/// lambda = (1 +- sqrt(radicand)) / 2 with the radicand checked and clamped to [0, 1].
inline double entropy_from_radicand(double radicand) {
  constexpr double tol = 1e-12;
  if (radicand < -tol || radicand > 1.0 + tol || !std::isfinite(radicand)) {
    throw NumericalError("entropy radicand out of range: " + std::to_string(radicand));
  }
  const double root = std::sqrt(std::clamp(radicand, 0.0, 1.0));
  return binary_entropy_of(0.5 * (1.0 + root), 0.5 * (1.0 - root));
}

}  // namespace detail

/// Von Neumann entropy (bits) of the coin state after tracing out position.
inline double entanglement_entropy(const SpinorField& s) {
  double a = 0.0;
  double d = 0.0;
  cplx b{};
  const auto& p = s.plus();
  const auto& q = s.minus();
  for (std::size_t l = 0; l < s.size(); ++l) {
    a += std::norm(p[l]);
    d += std::norm(q[l]);
    b += p[l] * std::conj(q[l]);
  }
  const double mean = 0.5 * (a + d);
  const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
  return detail::binary_entropy_of(mean + half_gap, mean - half_gap);
}

/// Continuum YY entropy. The closed form carries no packet width (unit width implied).
inline double continuum_entropy_yy(double t, double alpha1, double theta, const Spinor& spinor) {
  const Spinor u = spinor.normalized();
  const double w = std::norm(u.plus) * std::norm(u.minus);
  const double st = std::sin(theta);
  const double g = 1.0 + t * t * st * st;
  const double decay = std::exp(-4.0 * alpha1 * alpha1 * t * t / g) / std::sqrt(g);
  return detail::entropy_from_radicand(1.0 + 4.0 * w * (decay - 1.0));
}

/// Continuum XI entropy; the radicand is <sigma_y>^2 + e^{-t^2 beta^2/sigma^2}(<sigma_x>^2 + <sigma_z>^2)
/// written in the amplitudes of the initial spinor.
inline double continuum_entropy_xi(double t, double beta, double sigma, const Spinor& spinor) {
  if (!(sigma > 0.0)) throw PreconditionError("sigma must be > 0");
  const Spinor u = spinor.normalized();
  const cplx c = u.plus * std::conj(u.minus);
  const double p2 = std::norm(u.plus);
  const double decay = std::exp(-t * t * beta * beta / (sigma * sigma));
  const double radicand = 4.0 * c.imag() * c.imag() +
                          decay * (1.0 + 4.0 * p2 * p2 - 4.0 * p2 + 4.0 * c.real() * c.real());
  return detail::entropy_from_radicand(radicand);
}

struct BlochAngles {
  double theta_b = 0.0;
  double phi_b = 0.0;

  [[nodiscard]] Spinor spinor() const {
    if (!(theta_b >= 0.0 && theta_b <= std::numbers::pi) ||
        !(phi_b >= 0.0 && phi_b < 2.0 * std::numbers::pi)) {
      throw PreconditionError("Bloch angles must satisfy 0<=theta_B<=pi, 0<=phi_B<2pi");
    }
    return {cplx{std::cos(0.5 * theta_b)}, std::polar(std::sin(0.5 * theta_b), phi_b)};
  }
};

struct ObservableSeries {
  std::vector<double> t;
  std::vector<double> m1;
  std::vector<double> m1_theory;
  std::vector<double> variance;
  std::vector<double> variance_theory;
  std::vector<double> entropy;
};

/// Closed-form comparators for a walk: YY directly, XI through alpha1 -> beta/2, theta -> 0.
struct TheoryInputs {
  double mu_x = 0.0;
  double sigma2 = 1.0;
  Spinor spinor{cplx{1.0}, cplx{}};
};

inline std::pair<double, double> theory_point(const WalkSpec& spec, const TheoryInputs& in,
                                              double t) {
  switch (spec.variant) {
    case Variant::YY:
      return {theory_m1_yy(t, in.mu_x, spec.alpha1(), in.spinor),
              theory_variance_yy(t, in.sigma2, spec.alpha1(), spec.theta, in.spinor)};
    case Variant::XI: {
      const double half_beta = spec.alpha1() + 0.25 * spec.theta1();
      return {theory_m1_yy(t, in.mu_x, half_beta, in.spinor),
              theory_variance_yy(t, in.sigma2, half_beta, 0.0, in.spinor)};
    }
    case Variant::General: break;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {nan, nan};
}

/// Evolves and samples observables every `stride` steps (and at the final step).
inline ObservableSeries observe(const SpinorField& initial, const WalkSpec& spec,
                                std::size_t n_steps, const TheoryInputs& theory,
                                std::size_t stride = 1, bool* wrapped = nullptr) {
  if (stride == 0) stride = 1;
  ObservableSeries out;
  auto sample = [&](std::size_t n, const SpinorField& s) {
    if (n % stride != 0 && n != n_steps) return;
    const double t = static_cast<double>(n) * spec.step_time();
    const Moments m = moments(s);
    const auto [m1_th, v_th] = theory_point(spec, theory, t);
    out.t.push_back(t);
    out.m1.push_back(m.m1);
    out.m1_theory.push_back(m1_th);
    out.variance.push_back(m.variance);
    out.variance_theory.push_back(v_th);
    out.entropy.push_back(entanglement_entropy(s));
  };
  const Trajectory tr = evolve(initial, spec, n_steps, 0, sample);
  if (wrapped) *wrapped = tr.wrapped;
  return out;
}

inline void write_csv(std::ostream& os, const ObservableSeries& s) {
  csv::Writer w(os, {"t", "m1", "m1_theory", "V", "V_theory", "S"});
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    w.row({s.t[i], s.m1[i], s.m1_theory[i], s.variance[i], s.variance_theory[i], s.entropy[i]});
  }
}

struct Diagnostics {
  double tau_5pct = 0.0;
  std::size_t n_extrema = 0;
  std::size_t n_maxima = 0;
  double s_infinity = 0.0;
};

inline constexpr double extrema_hysteresis = 1e-3;

/// S_inf: mean of the final 10% of samples. tau_5%: time of the last sample outside
/// max(0.05 |S_inf|, 1e-3) of S_inf. Extrema: zigzag turning points with hysteresis.
inline Diagnostics convergence_diagnostics(const std::vector<double>& t,
                                           const std::vector<double>& s) {
  if (t.size() != s.size()) throw PreconditionError("time and value series differ in length");
  if (s.size() < 10) throw PreconditionError("series needs at least 10 samples");
  Diagnostics d;
  const std::size_t tail = std::max<std::size_t>(1, s.size() / 10);
  double acc = 0.0;
  for (std::size_t i = s.size() - tail; i < s.size(); ++i) acc += s[i];
  d.s_infinity = acc / static_cast<double>(tail);

  const double band = std::max(0.05 * std::abs(d.s_infinity), 1e-3);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(s[i] - d.s_infinity) >= band) d.tau_5pct = t[i];
  }

  int dir = 0;
  double lo = s[0];
  double hi = s[0];
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double v = s[i];
    if (dir == 0) {
      hi = std::max(hi, v);
      lo = std::min(lo, v);
      if (hi - s[0] > extrema_hysteresis) {
        dir = 1;
      } else if (s[0] - lo > extrema_hysteresis) {
        dir = -1;
      }
      continue;
    }
    if (dir == 1) {
      if (v > hi) {
        hi = v;
      } else if (hi - v > extrema_hysteresis) {
        ++d.n_extrema;
        ++d.n_maxima;
        dir = -1;
        lo = v;
      }
    } else {
      if (v < lo) {
        lo = v;
      } else if (v - lo > extrema_hysteresis) {
        ++d.n_extrema;
        dir = 1;
        hi = v;
      }
    }
  }
  return d;
}

inline Diagnostics convergence_diagnostics(const ObservableSeries& series) {
  return convergence_diagnostics(series.t, series.entropy);
}

}  // namespace tqw
