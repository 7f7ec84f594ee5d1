#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tqw/coin_algebra.hpp"
#include "tqw/errors.hpp"
#include "tqw/walk_spec.hpp"

namespace tqw {

/// Walker state on a periodic lattice of even length; stored as two component arrays.
/// Site l sits at x_l = (l - n/2) dx.
class SpinorField {
 public:
  SpinorField() = default;

  SpinorField(std::size_t n_sites, double dx) : plus_(n_sites), minus_(n_sites), dx_(dx) {
    if (n_sites == 0 || n_sites % 2 != 0) {
      throw PreconditionError("n_sites must be a positive even number, got " +
                              std::to_string(n_sites));
    }
    if (!(dx > 0.0)) throw PreconditionError("dx must be > 0");
  }

  [[nodiscard]] std::size_t size() const { return plus_.size(); }
  [[nodiscard]] double dx() const { return dx_; }
  [[nodiscard]] double position(std::size_t l) const {
    return (static_cast<double>(l) - static_cast<double>(size() / 2)) * dx_;
  }

  [[nodiscard]] Spinor at(std::size_t l) const { return {plus_[l], minus_[l]}; }
  void set(std::size_t l, const Spinor& v) {
    plus_[l] = v.plus;
    minus_[l] = v.minus;
  }

  std::vector<cplx>& plus() { return plus_; }
  std::vector<cplx>& minus() { return minus_; }
  [[nodiscard]] const std::vector<cplx>& plus() const { return plus_; }
  [[nodiscard]] const std::vector<cplx>& minus() const { return minus_; }

  [[nodiscard]] double probability(std::size_t l) const {
    return std::norm(plus_[l]) + std::norm(minus_[l]);
  }

  [[nodiscard]] double norm2() const {
    double s = 0.0;
    for (std::size_t l = 0; l < size(); ++l) s += probability(l);
    return s;
  }

  void normalize() {
    const double n2 = norm2();
    if (!(n2 > 0.0)) throw PreconditionError("cannot normalize the zero state");
    const double inv = 1.0 / std::sqrt(n2);
    for (std::size_t l = 0; l < size(); ++l) {
      plus_[l] *= inv;
      minus_[l] *= inv;
    }
  }

 private:
  std::vector<cplx> plus_;
  std::vector<cplx> minus_;
  double dx_ = 1.0;
};

namespace detail {

inline void multiply_sites(SpinorField& s, const Mat2& m) {
  auto& p = s.plus();
  auto& q = s.minus();
  for (std::size_t l = 0; l < p.size(); ++l) {
    const cplx u = p[l];
    const cplx v = q[l];
    p[l] = m.a * u + m.b * v;
    q[l] = m.c * u + m.d * v;
  }
}

inline void shift_in_place(SpinorField& s) {
  auto& p = s.plus();
  auto& q = s.minus();
  std::rotate(p.begin(), p.begin() + 1, p.end());
  std::rotate(q.begin(), q.end() - 1, q.end());
}

/// Per-step matrices resolved once per evolution.
struct StepPlan {
  struct Leg {
    Mat2 pre;   // twist * coin
    Mat2 post;  // twist^-1
    bool has_post = false;
  };
  std::vector<Leg> legs;
  Mat2 mass;
  bool has_mass = false;

  explicit StepPlan(const WalkSpec& spec) {
    for (const Substep& sub : substeps(spec)) {
      const Mat2 t = sub.twist_matrix();
      legs.push_back({t * sub.coin_matrix(), t.adjoint(), sub.twisted()});
    }
    has_mass = spec.mu != 0.0;
    mass = mass_phase(spec.mu);
  }

  void apply(SpinorField& s) const {
    for (const Leg& leg : legs) {
      multiply_sites(s, leg.pre);
      shift_in_place(s);
      if (leg.has_post) multiply_sites(s, leg.post);
    }
    if (has_mass) multiply_sites(s, mass);
  }
};

inline void require_variant(const WalkSpec& spec, Variant v) {
  if (spec.variant != v) {
    throw PreconditionError("step_" + std::string(to_string(v)) + " called with a " +
                            std::string(to_string(spec.variant)) + " walk");
  }
}

}  // namespace detail

/// Coin-conditioned translation: psi+ moves to site l-1, psi- to site l+1, periodic.
/// This direction makes plane waves e^{ikl} pick up exp(i k sigma_z).
inline SpinorField shift(SpinorField s) {
  detail::shift_in_place(s);
  return s;
}

/// Multiplies every site spinor by c; rejects c with ||c^dagger c - I|| > 1e-8.
inline SpinorField apply_coin(SpinorField s, const Mat2& c) {
  if (unitarity_defect(c) > 1e-8) throw PreconditionError("coin matrix is not unitary");
  detail::multiply_sites(s, c);
  return s;
}

inline SpinorField step(SpinorField s, const WalkSpec& spec) {
  detail::StepPlan(spec).apply(s);
  return s;
}

/// M G^2 with G = W_beta W_alpha; no single-G step is exposed.
inline SpinorField step_yy(SpinorField s, const WalkSpec& spec) {
  detail::require_variant(spec, Variant::YY);
  return step(std::move(s), spec);
}

/// M W_beta2 W_alpha W_beta1 W_alpha.
inline SpinorField step_xi(SpinorField s, const WalkSpec& spec) {
  detail::require_variant(spec, Variant::XI);
  return step(std::move(s), spec);
}

inline SpinorField step_general(SpinorField s, const WalkSpec& spec) {
  detail::require_variant(spec, Variant::General);
  return step(std::move(s), spec);
}

/// Samples sqrt(rho0) of a normal density N(mu_x, sigma2) at site centres, tensored
/// with the normalized spinor, then renormalized on the lattice.
inline SpinorField gaussian_init(std::size_t n_sites, double dx, double mu_x, double sigma2,
                                 const Spinor& spinor) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw PreconditionError("sigma2 must be finite and > 0");
  }
  if (!(spinor.norm2() > 0.0)) throw PreconditionError("initial spinor must be nonzero");
  const Spinor chi = spinor.normalized();
  SpinorField s(n_sites, dx);
  for (std::size_t l = 0; l < n_sites; ++l) {
    const double u = s.position(l) - mu_x;
    const double amp = std::exp(-u * u / (4.0 * sigma2));
    s.set(l, {amp * chi.plus, amp * chi.minus});
  }
  if (!(s.norm2() > 0.0)) {
    // Width far below the lattice spacing: collapse onto the nearest site.
    const double idx = std::round(mu_x / dx) + static_cast<double>(n_sites / 2);
    const auto l = static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(n_sites - 1)));
    s.set(l, chi);
  }
  s.normalize();
  return s;
}

inline SpinorField localized(std::size_t n_sites, double dx, std::size_t site,
                             const Spinor& spinor) {
  if (site >= n_sites) throw PreconditionError("site index outside the lattice");
  if (!(spinor.norm2() > 0.0)) throw PreconditionError("initial spinor must be nonzero");
  SpinorField s(n_sites, dx);
  s.set(site, spinor.normalized());
  return s;
}

/// Smallest even lattice that holds the light cone of n_steps plus a 10 sigma packet.
inline std::size_t required_sites(std::size_t n_steps, double sigma, double dx,
                                  std::size_t shifts_per_step = 4) {
  auto n = 2 * shifts_per_step * n_steps +
           static_cast<std::size_t>(std::ceil(10.0 * sigma / dx));
  n = std::max<std::size_t>(n, 2);
  return n + (n % 2);
}

/// Sites whose probability exceeds this fraction of the peak count as occupied.
inline constexpr double support_threshold = 1e-5;

/// True if the light cone of the initial support would meet itself within n_steps.
inline bool wavefront_wraps(const SpinorField& initial, std::size_t shifts_per_step,
                            std::size_t n_steps) {
  double peak = 0.0;
  for (std::size_t l = 0; l < initial.size(); ++l) peak = std::max(peak, initial.probability(l));
  if (peak == 0.0) return false;
  std::size_t first = initial.size();
  std::size_t last = 0;
  for (std::size_t l = 0; l < initial.size(); ++l) {
    if (initial.probability(l) >= support_threshold * peak) {
      first = std::min(first, l);
      last = l;
    }
  }
  const std::size_t width = last - first + 1;
  return width + 2 * shifts_per_step * n_steps > initial.size();
}

struct Trajectory {
  SpinorField final_state;
  std::vector<std::size_t> snapshot_steps;
  std::vector<SpinorField> snapshots;
  bool wrapped = false;
};

struct NoObserver {
  void operator()(std::size_t, const SpinorField&) const {}
};

/// Applies n_steps steps. The observer sees the state after every step including
/// step 0 (the input); full snapshots are kept every `stride` steps when stride > 0.
template <class Observer = NoObserver>
Trajectory evolve(SpinorField state, const WalkSpec& spec, std::size_t n_steps,
                  std::size_t stride = 0, Observer&& observer = {}) {
  const detail::StepPlan plan(spec);
  Trajectory out;
  out.wrapped = wavefront_wraps(state, plan.legs.size(), n_steps);
  auto record = [&](std::size_t n) {
    observer(n, static_cast<const SpinorField&>(state));
    if (stride > 0 && n % stride == 0) {
      out.snapshot_steps.push_back(n);
      out.snapshots.push_back(state);
    }
  };
  record(0);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    plan.apply(state);
    record(n);
  }
  out.final_state = std::move(state);
  return out;
}

}  // namespace tqw
