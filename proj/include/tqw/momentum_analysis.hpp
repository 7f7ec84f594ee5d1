#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tqw/coin_algebra.hpp"
#include "tqw/csv.hpp"
#include "tqw/errors.hpp"
#include "tqw/walk_spec.hpp"

namespace tqw {

/// One-step Bloch unitary at lattice quasi-momentum k (radians per site).
inline Mat2 unitary_at_k(const WalkSpec& spec, double k) {
  const Mat2 s = shift_at_k(k);
  Mat2 u = Mat2::identity();
  for (const Substep& sub : substeps(spec)) {
    const Mat2 t = sub.twist_matrix();
    u = t.adjoint() * s * t * sub.coin_matrix() * u;
  }
  return mass_phase(spec.mu) * u;
}

/// Half trace of the massless YY Bloch unitary, A = cos 4a, B = sin theta.
/// The k-odd term carries sin 4a with its sign.
inline double d0_yy(double alpha, double theta, double k) {
  const double A = std::cos(4 * alpha);
  const double B = std::sin(theta);
  const double sk = std::sin(k);
  const double ck = std::cos(k);
  const double sk2 = sk * sk;
  return (11 - A) / 16 + std::cos(2 * k) * (1 + A) / 4 + std::cos(4 * k) * (1 - 3 * A) / 16 +
         sk2 * sk2 * (1 + A) / 2 * (1 - 2 * B * B) +
         sk2 * sk * ck * 2 * B * std::sin(4 * alpha);
}

/// Half trace of the massless XI Bloch unitary, A = sin 2a.
inline double d0_xi(double alpha, double theta, double k) {
  const double A = std::sin(2 * alpha);
  const double c = std::cos(theta);
  return A * (A + std::sin(theta)) / 4 * (std::cos(4 * k) - 1) + (1 - c) / 2 * std::cos(2 * k) +
         (1 + c) / 2;
}

struct SpectrumSample {
  double k = 0.0;
  double d0 = 1.0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
};

struct SpectrumTable {
  WalkSpec spec;
  double epsilon = 1.0;
  std::vector<SpectrumSample> samples;
  /// Samples whose |d0| exceeded 1 by more than the silent 1e-9 margin before clamping.
  std::size_t clamped_count = 0;
};

/// Uniform endpoint-inclusive grid on [-pi/2, pi/2], exactly symmetric about 0.
inline std::vector<double> bz_grid(std::size_t n = 1001) {
  if (n < 2) throw PreconditionError("k grid needs at least 2 points");
  std::vector<double> k(n);
  const double denom = 2.0 * static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = 2.0 * static_cast<double>(i) - static_cast<double>(n - 1);
    k[i] = m * std::numbers::pi / denom;
  }
  return k;
}

namespace detail {

inline constexpr double d0_soft_clamp = 1e-9;
inline constexpr double d0_hard_limit = 1e-6;

inline double clamp_d0(double d0) {
  if (std::abs(d0) > 1.0 + d0_hard_limit || !std::isfinite(d0)) {
    throw NumericalError("|d0| exceeds 1 beyond tolerance: " + std::to_string(d0));
  }
  return std::clamp(d0, -1.0, 1.0);
}

/// d0 of U with its global U(1) phase removed.
inline double d0_from_trace(const Mat2& u) {
  const cplx phase = std::polar(1.0, -0.5 * std::arg(u.det()));
  return (0.5 * phase * u.trace()).real();
}

}  // namespace detail

/// d0 used for spectra: the closed forms for massless YY/XI, the trace otherwise.
inline double spectrum_d0(const WalkSpec& spec, double k) {
  if (spec.mu == 0.0) {
    if (spec.variant == Variant::YY) return d0_yy(spec.alpha, spec.theta, k);
    if (spec.variant == Variant::XI) return d0_xi(spec.alpha, spec.theta, k);
  }
  return detail::d0_from_trace(unitary_at_k(spec, k));
}

/// lambda = +-arccos(d0) / (period_in_dt * dt); the global phase is dropped.
inline SpectrumTable effective_spectrum(const WalkSpec& spec, const std::vector<double>& k_grid) {
  SpectrumTable table{spec, spec.epsilon, {}, 0};
  table.samples.reserve(k_grid.size());
  const double denom = spec.step_time();
  const double bound = std::numbers::pi / 2 + 1e-12;
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    const double k = k_grid[i];
    if (std::abs(k) > bound) throw PreconditionError("k outside the Brillouin zone");
    if (i > 0 && !(k > k_grid[i - 1])) throw PreconditionError("k grid must be strictly increasing");
    const double raw = spectrum_d0(spec, k);
    if (std::abs(raw) > 1.0 + detail::d0_soft_clamp) ++table.clamped_count;
    const double d0 = detail::clamp_d0(raw);
    const double lam = std::acos(d0) / denom;
    table.samples.push_back({k, d0, lam, -lam});
  }
  return table;
}

/// Principal effective Hamiltonian i log(U) / step_time at lattice momentum k.
inline Mat2 effective_hamiltonian(const WalkSpec& spec, double k) {
  const Generator g = principal_generator(unitary_at_k(spec, k));
  return cplx{1.0 / spec.step_time()} * g.matrix();
}

struct DoublingReport {
  /// Quasi-momenta where the bands touch zero (one entry per contiguous run).
  std::vector<double> zeros;
  /// lambda_plus - lambda_minus at k = +pi/2 and k = -pi/2.
  double edge_gap = 0.0;
  double edge_gap_lower = 0.0;
  /// Edge gap under the 2 theta1 convention, XI only.
  std::optional<double> edge_gap_claimed;
};

inline DoublingReport doubling_scan(const SpectrumTable& table, double zero_tol = 1e-6) {
  const auto& s = table.samples;
  const double edge = std::numbers::pi / 2;
  if (s.size() < 2 || std::abs(s.front().k + edge) > 1e-12 || std::abs(s.back().k - edge) > 1e-12) {
    throw PreconditionError("spectrum table must include both Brillouin-zone endpoints");
  }
  DoublingReport r;
  std::size_t i = 0;
  while (i < s.size()) {
    if (std::abs(s[i].lambda_plus) >= zero_tol) {
      ++i;
      continue;
    }
    std::size_t best = i;
    while (i < s.size() && std::abs(s[i].lambda_plus) < zero_tol) {
      if (std::abs(s[i].lambda_plus) < std::abs(s[best].lambda_plus)) best = i;
      ++i;
    }
    r.zeros.push_back(s[best].k);
  }
  r.edge_gap = s.back().lambda_plus - s.back().lambda_minus;
  r.edge_gap_lower = s.front().lambda_plus - s.front().lambda_minus;
  if (table.spec.variant == Variant::XI) r.edge_gap_claimed = 2.0 * std::abs(table.spec.theta1());
  return r;
}

inline void write_csv(std::ostream& os, const SpectrumTable& table) {
  csv::Writer w(os, {"k", "d0", "lambda_plus", "lambda_minus"});
  for (const auto& x : table.samples) w.row({x.k, x.d0, x.lambda_plus, x.lambda_minus});
}

}  // namespace tqw
