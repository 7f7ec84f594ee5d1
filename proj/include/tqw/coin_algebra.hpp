#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace tqw {

using cplx = std::complex<double>;

inline constexpr cplx I_unit{0.0, 1.0};

/// Two-component coin spinor (plus, minus).
struct Spinor {
  cplx plus{};
  cplx minus{};

  [[nodiscard]] double norm2() const { return std::norm(plus) + std::norm(minus); }

  [[nodiscard]] Spinor normalized() const {
    const double n = std::sqrt(norm2());
    return {plus / n, minus / n};
  }
};

/// Dense 2x2 complex matrix, row-major entries (a, b; c, d).
/// Most producers in this library return unitary values; is_unitary() checks it.
struct Mat2 {
  cplx a{1.0}, b{}, c{}, d{1.0};

  static constexpr Mat2 identity() { return {}; }
  static constexpr Mat2 zero() { return {cplx{}, cplx{}, cplx{}, cplx{}}; }
  static constexpr Mat2 diag(cplx x, cplx y) { return {x, cplx{}, cplx{}, y}; }

  [[nodiscard]] Mat2 adjoint() const {
    return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
  }
  [[nodiscard]] cplx trace() const { return a + d; }
  [[nodiscard]] cplx det() const { return a * d - b * c; }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend Mat2 operator+(const Mat2& x, const Mat2& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  friend Mat2 operator-(const Mat2& x, const Mat2& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }
  friend Mat2 operator*(cplx s, const Mat2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }
  friend Mat2 operator*(const Mat2& x, cplx s) { return s * x; }
  friend Spinor operator*(const Mat2& m, const Spinor& v) {
    return {m.a * v.plus + m.b * v.minus, m.c * v.plus + m.d * v.minus};
  }
};

/// Largest entrywise modulus of x - y.
inline double max_abs_diff(const Mat2& x, const Mat2& y) {
  return std::max({std::abs(x.a - y.a), std::abs(x.b - y.b), std::abs(x.c - y.c),
                   std::abs(x.d - y.d)});
}

inline double frobenius_norm(const Mat2& x) {
  return std::sqrt(std::norm(x.a) + std::norm(x.b) + std::norm(x.c) + std::norm(x.d));
}

inline double unitarity_defect(const Mat2& u) {
  return max_abs_diff(u.adjoint() * u, Mat2::identity());
}

inline bool is_unitary(const Mat2& u, double tol = 1e-12) {
  return unitarity_defect(u) <= tol && std::abs(std::abs(u.det()) - 1.0) <= tol;
}

namespace pauli {
inline constexpr Mat2 s0 = Mat2::identity();
inline constexpr Mat2 x{cplx{}, cplx{1.0}, cplx{1.0}, cplx{}};
inline constexpr Mat2 y{cplx{}, cplx{0.0, -1.0}, cplx{0.0, 1.0}, cplx{}};
inline constexpr Mat2 z{cplx{1.0}, cplx{}, cplx{}, cplx{-1.0}};
}  // namespace pauli

enum class Axis { x, y, z };

inline const Mat2& pauli_matrix(Axis axis) {
  switch (axis) {
    case Axis::x: return pauli::x;
    case Axis::y: return pauli::y;
    case Axis::z: break;
  }
  return pauli::z;
}

/// R_axis(angle) = exp(-i angle sigma_axis / 2).
inline Mat2 rotation(Axis axis, double angle) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  return cplx{c} * Mat2::identity() + cplx{0.0, -s} * pauli_matrix(axis);
}

struct CoinParams {
  double delta = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double zeta = 0.0;
};

/// C(delta, theta, phi, zeta) = e^{i delta} R_z(zeta) R_y(theta) R_z(phi).
inline Mat2 coin(const CoinParams& p) {
  return std::polar(1.0, p.delta) *
         (rotation(Axis::z, p.zeta) * rotation(Axis::y, p.theta) * rotation(Axis::z, p.phi));
}

/// Coin whose action is the lattice walk's C_alpha: sigma_y R_x(-2 alpha).
inline CoinParams coin_alpha_params(double alpha) {
  using std::numbers::pi;
  return {pi / 2, -pi - 2 * alpha, pi / 2, -3 * pi / 2};
}

/// Coin whose action is -R_x(-2 alpha).
inline CoinParams coin_beta_params(double alpha) {
  using std::numbers::pi;
  return {0.0, -2 * pi - 2 * alpha, pi / 2, -pi / 2};
}

/// exp(i mu sigma_z).
inline Mat2 mass_phase(double mu) { return Mat2::diag(std::polar(1.0, mu), std::polar(1.0, -mu)); }

/// Bloch form of the coin-conditioned shift at quasi-momentum k: exp(i k sigma_z).
inline Mat2 shift_at_k(double k) { return Mat2::diag(std::polar(1.0, k), std::polar(1.0, -k)); }

/// Coefficients of M = d0 s0 + d1 sx + d2 sy + d3 sz.
struct PauliCoeffs {
  cplx d0{}, d1{}, d2{}, d3{};
};

inline PauliCoeffs pauli_decompose(const Mat2& m) {
  return {0.5 * (m.a + m.d), 0.5 * (m.b + m.c), 0.5 * I_unit * (m.b - m.c), 0.5 * (m.a - m.d)};
}

inline Mat2 reconstruct(const PauliCoeffs& p) {
  return {p.d0 + p.d3, p.d1 - I_unit * p.d2, p.d1 + I_unit * p.d2, p.d0 - p.d3};
}

/// Real generator h of a unitary, U = exp(-i (h0 s0 + h . sigma)), principal branch.
/// The SU(2) part is written cos(phi) - i sin(phi) n.sigma with phi in [0, pi].
struct Generator {
  double h0 = 0.0;
  std::array<double, 3> h{};

  [[nodiscard]] Mat2 matrix() const {
    return reconstruct({cplx{h0}, cplx{h[0]}, cplx{h[1]}, cplx{h[2]}});
  }
};

inline Generator principal_generator(const Mat2& u) {
  const double gamma = 0.5 * std::arg(u.det());
  const Mat2 v = std::polar(1.0, -gamma) * u;
  const PauliCoeffs p = pauli_decompose(v);
  const std::array<double, 3> s{-p.d1.imag(), -p.d2.imag(), -p.d3.imag()};
  const double sin_phi = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
  const double phi = std::atan2(sin_phi, p.d0.real());
  Generator g;
  g.h0 = -gamma;
  if (sin_phi > 0.0) {
    for (std::size_t j = 0; j < 3; ++j) g.h[j] = phi * s[j] / sin_phi;
  }
  return g;
}

}  // namespace tqw
