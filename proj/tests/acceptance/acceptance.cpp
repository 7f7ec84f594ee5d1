// Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "tqw/constraints.hpp"
#include "tqw/continuum.hpp"
#include "tqw/lattice_walk.hpp"
#include "tqw/momentum_analysis.hpp"
#include "tqw/observables.hpp"

using namespace tqw;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

double half_trace(const Mat2& u) { return detail::d0_from_trace(u); }

Outcome closed_form_oracle() {
  std::mt19937_64 g(1);
  double worst_yy = 0, worst_xi = 0;
  for (int i = 0; i < 1000; ++i) {
    const double a = uniform(g, -pi, pi), t = uniform(g, -pi, pi), k = uniform(g, -pi / 2, pi / 2);
    worst_yy = std::max(worst_yy, std::abs(d0_yy(a, t, k) - half_trace(unitary_at_k(WalkSpec::bare(Variant::YY, a, t), k))));
  }
  for (int i = 0; i < 1000; ++i) {
    const double a = uniform(g, -pi, pi), t = uniform(g, -pi, pi), k = uniform(g, -pi / 2, pi / 2);
    worst_xi = std::max(worst_xi, std::abs(d0_xi(a, t, k) - half_trace(unitary_at_k(WalkSpec::bare(Variant::XI, a, t), k))));
  }
  return {worst_yy < 1e-12 && worst_xi < 1e-12,
          "max |d0 - Tr/2| yy=" + fmt("%.2e", worst_yy) + " xi=" + fmt("%.2e", worst_xi)};
}

double asymmetry(const WalkSpec& spec, const std::vector<double>& grid) {
  const SpectrumTable t = effective_spectrum(spec, grid);
  double worst = 0;
  const std::size_t n = t.samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    worst = std::max(worst, std::abs(t.samples[i].lambda_plus - t.samples[n - 1 - i].lambda_plus));
  }
  return worst;
}

Outcome spectrum_symmetry() {
  const auto grid = bz_grid(1001);
  std::mt19937_64 g(2);
  bool ok = true;
  double worst_sym = 0, least_asym = 1e9;
  for (int i = 0; i < 60; ++i) {
    double a = uniform(g, -pi, pi), t = uniform(g, -pi, pi);
    // A third of the cases sit on sin 4a = 0, a third on sin theta = 0.
    if (i % 3 == 0) a = (std::floor(uniform(g, -4, 4))) * pi / 4;
    if (i % 3 == 1) t = (std::floor(uniform(g, -2, 2))) * pi;
    const double asym = asymmetry(WalkSpec::bare(Variant::YY, a, t), grid);
    const bool symmetric_expected = std::abs(std::sin(4 * a) * std::sin(t)) < 1e-12;
    if (symmetric_expected) {
      worst_sym = std::max(worst_sym, asym);
      ok = ok && asym < 1e-12;
    } else {
      least_asym = std::min(least_asym, asym);
      ok = ok && asym >= 1e-12;
    }
  }
  double worst_xi = 0;
  for (int i = 0; i < 40; ++i) {
    worst_xi = std::max(worst_xi, asymmetry(WalkSpec::bare(Variant::XI, uniform(g, -pi, pi), uniform(g, -pi, pi)), grid));
  }
  const double fig = asymmetry(WalkSpec::bare(Variant::YY, pi / 3, pi / 5), grid);
  ok = ok && worst_xi < 1e-12 && fig > 1e-3;
  return {ok, "sym-case max=" + fmt("%.2e", worst_sym) + " asym-case min=" + fmt("%.2e", least_asym) +
                  " xi max=" + fmt("%.2e", worst_xi) + " (pi/3,pi/5) asym=" + fmt("%.3f", fig)};
}

Outcome doubling() {
  const auto grid = bz_grid(1001);
  const DoublingReport flat = doubling_scan(effective_spectrum(WalkSpec::xi(0.5, 0.0, 0.0, 1.0), grid));
  auto has = [&](double k) {
    return std::any_of(flat.zeros.begin(), flat.zeros.end(), [&](double z) { return std::abs(z - k) < 1e-12; });
  };
  bool ok = has(0.0) && has(pi / 2) && has(-pi / 2);
  std::vector<double> gaps;
  for (double th1 : {0.05, 0.1, 0.2}) {
    gaps.push_back(doubling_scan(effective_spectrum(WalkSpec::xi(0.5, th1, 0.0, 1.0), grid)).edge_gap);
  }
  ok = ok && gaps[0] > 0 && gaps[1] > gaps[0] && gaps[2] > gaps[1];
  const double r1 = gaps[1] / gaps[0], r2 = gaps[2] / gaps[1];
  ok = ok && std::abs(r1 - 2) < 0.02 && std::abs(r2 - 2) < 0.02;
  return {ok, "zeros=" + std::to_string(flat.zeros.size()) + " gaps=" + fmt("%.4f", gaps[0]) + "," +
                  fmt("%.4f", gaps[1]) + "," + fmt("%.4f", gaps[2]) + " ratios=" + fmt("%.4f", r1) + "," +
                  fmt("%.4f", r2)};
}

Outcome continuum_residuals() {
  const WalkSpec base = WalkSpec::yy(1.0, pi / 6, 0.0, 0.01);
  std::mt19937_64 g(4);
  bool ok = true;
  double lo = 1e9, hi = -1e9;
  for (int i = 0; i < 10; ++i) {
    const LimitCheck c = numeric_limit_check(base, {1e-2, 1e-3, 1e-4}, uniform(g, -2, 2));
    bool decreasing = true;
    for (std::size_t j = 1; j < c.rows.size(); ++j) {
      decreasing = decreasing && c.rows[j].generator_residual < c.rows[j - 1].generator_residual;
    }
    ok = ok && decreasing && c.slope_generator >= 0.5;
    lo = std::min(lo, c.slope_generator);
    hi = std::max(hi, c.slope_generator);
  }
  return {ok, "log-log slopes in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "], required >= 0.5"};
}

Outcome variance_reproduction() {
  struct Set {
    double alpha1, theta, sigma2;
    Spinor spinor;
  };
  const std::vector<Set> sets{{0.0, pi / 2, 0.1, {cplx{1.0}, cplx{0.0, 1.0}}},
                              {0.9, 0.0, 3.0, {cplx{1.0}, cplx{}}},
                              {1.1, 2.0, 0.3, {cplx{1.0}, cplx{1.0, 1.0}}}};
  bool ok = true;
  std::string detail;
  for (const Set& s : sets) {
    const WalkSpec spec = WalkSpec::yy(s.alpha1, s.theta, 0.0, 0.01);
    const std::size_t steps = 300;
    const SpinorField start = gaussian_init(required_sites(steps, std::sqrt(s.sigma2), spec.dx()), spec.dx(),
                                            0.0, s.sigma2, s.spinor);
    bool wrapped = false;
    const ObservableSeries o = observe(start, spec, steps, {0.0, s.sigma2, s.spinor}, steps, &wrapped);
    const double v = o.variance.back(), vt = o.variance_theory.back();
    const double m = o.m1.back(), mt = o.m1_theory.back();
    const double v_err = std::abs(v - vt) / vt;
    const bool m_ok = mt == 0.0 ? std::abs(m) <= 0.1 * std::sqrt(vt) : std::abs(m - mt) <= 0.1 * std::abs(mt);
    ok = ok && !wrapped && v_err <= 0.10 && m_ok;
    detail += "V err=" + fmt("%.1f%%", 100 * v_err) + " m1=" + fmt("%.3f", m) + "/" + fmt("%.3f", mt) + "; ";
  }
  return {ok, detail};
}

GeneralCoinFamily random_on_manifold(std::mt19937_64& g, bool dirac) {
  GeneralCoinFamily f;
  const int r = uniform(g, 0, 1) < 0.5 ? 0 : 1;
  const double sr = r == 0 ? 1.0 : -1.0;
  f.alpha = {uniform(g, -pi, pi), uniform(g, -pi, pi), uniform(g, -2, 2), uniform(g, -pi, pi), uniform(g, -pi, pi)};
  f.beta.theta_half = sr * f.alpha.theta_half;
  f.beta.phi = -f.alpha.zeta + (r + 1) * pi;
  if (dirac) {
    f.alpha.phi = 0.0;
    f.twist = f.alpha.theta0 + pi;
    f.beta.delta = -f.alpha.delta;
    f.beta.theta0 = sr * f.alpha.theta0;
    f.beta.zeta = -f.alpha.phi + (r + 1) * pi;
  } else {
    f.alpha.theta0 = pi;
    f.twist = uniform(g, -pi, pi);
    f.beta.delta = pi / 2 - f.alpha.delta;
    f.beta.theta0 = sr * f.alpha.theta0 + pi;
    f.beta.zeta = f.alpha.phi + (r + 1) * pi;
  }
  return f;
}

Outcome constraint_checker() {
  const bool yy = check_constraints(GeneralCoinFamily::yy(1.0, pi / 6)).satisfied;
  const bool xi = check_constraints(GeneralCoinFamily::xi(1.0)).satisfied;
  std::mt19937_64 g(6);
  int failures_detected = 0, base_ok = 0;
  double least = 1e9;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    GeneralCoinFamily f = random_on_manifold(g, i % 2 == 1);
    if (check_constraints(f).satisfied) ++base_ok;
    const double amount = uniform(g, 0.05, 1.0) * (uniform(g, 0, 1) < 0.5 ? -1.0 : 1.0);
    switch (i % 5) {
      case 0: f.beta.delta += amount; break;
      case 1: f.beta.theta0 += amount; break;
      case 2: f.beta.zeta += amount; break;
      case 3: f.beta.phi += amount; break;
      default:
        if (i % 2 == 1) {
          f.twist += amount;
        } else {
          f.beta.delta += amount;
        }
    }
    const ConstraintReport rep = check_constraints(f);
    least = std::min(least, rep.worst_residual);
    if (!rep.satisfied && rep.worst_residual >= 0.04) ++failures_detected;
  }
  return {yy && xi && base_ok == trials && failures_detected == trials,
          std::string("yy=") + (yy ? "pass" : "fail") + " xi=" + (xi ? "pass" : "fail") +
              " on-manifold=" + std::to_string(base_ok) + "/" + std::to_string(trials) +
              " perturbed rejected=" + std::to_string(failures_detected) + "/" + std::to_string(trials) +
              " min residual=" + fmt("%.4f", least)};
}

Outcome entropy_properties() {
  std::mt19937_64 g(7);
  bool ok = true;
  double lo = 1, hi = 0;
  for (int i = 0; i < 6; ++i) {
    const Spinor chi{cplx{uniform(g, -1, 1), uniform(g, -1, 1)}, cplx{uniform(g, -1, 1), uniform(g, -1, 1)}};
    const WalkSpec spec = i % 2 == 0 ? WalkSpec::yy(uniform(g, -2, 2), uniform(g, -pi, pi), 0.0, 0.01)
                                     : WalkSpec::xi(uniform(g, -1, 1), uniform(g, -2, 2), 0.0, 0.01);
    const SpinorField s = gaussian_init(required_sites(200, 0.3, spec.dx()), spec.dx(), 0.0, 0.09, chi);
    const ObservableSeries o = observe(s, spec, 200, {0.0, 0.09, chi});
    for (double e : o.entropy) {
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
  }
  ok = ok && lo >= 0.0 && hi <= 1.0;
  double product = 0;
  for (int i = 0; i < 10; ++i) {
    const Spinor chi{cplx{uniform(g, -1, 1), uniform(g, -1, 1)}, cplx{uniform(g, -1, 1), uniform(g, -1, 1)}};
    product = std::max(product, entanglement_entropy(gaussian_init(256, 0.1, 0.0, 0.5, chi)));
  }
  ok = ok && product < 1e-10;
  bool monotone = true;
  constexpr double rounding_slack = 1e-14;
  for (int i = 0; i < 20; ++i) {
    const Spinor chi{cplx{uniform(g, -1, 1), uniform(g, -1, 1)}, cplx{uniform(g, -1, 1), uniform(g, -1, 1)}};
    const double a1 = uniform(g, -2, 2), th = uniform(g, -pi, pi), beta = uniform(g, -2, 2);
    double prev_yy = -1, prev_xi = -1;
    for (int j = 0; j < 1000; ++j) {
      const double t = 10.0 * j / 999.0;
      const double syy = continuum_entropy_yy(t, a1, th, chi);
      const double sxi = continuum_entropy_xi(t, beta, 0.7, chi);
      // Near S = 1 the entropy is flat and successive values may differ by one rounding unit.
      monotone = monotone && syy >= prev_yy - rounding_slack && sxi >= prev_xi - rounding_slack;
      prev_yy = syy;
      prev_xi = sxi;
    }
  }
  ok = ok && monotone;
  double eig = 0;
  const Spinor e{cplx{std::sqrt(0.5)}, cplx{0.0, std::sqrt(0.5)}};
  for (int j = 0; j < 1000; ++j) eig = std::max(eig, continuum_entropy_xi(10.0 * j / 999.0, 1.0, 0.7, e));
  ok = ok && eig <= 1e-12;
  return {ok, "discrete S in [" + fmt("%.3g", lo) + ", " + fmt("%.3g", hi) + "] product max=" + fmt("%.1e", product) +
                  " monotone(1e-14)=" + (monotone ? "yes" : "no") + " xi eigenspinor max=" + fmt("%.1e", eig)};
}

Outcome convergence() {
  const InitialPacket init{0.0, 0.7, {cplx{1.0}, cplx{0.0, 1.0}}};
  const ConvergenceTable t = convergence_study(WalkSpec::yy(1.0, pi / 2, 0.0, 0.01), {0.04, 0.01, 0.0025}, 1.0, init);
  std::string detail = "L2 errors";
  for (const auto& r : t.rows) detail += " " + fmt("%.4e", r.l2_error);
  return {t.strictly_decreasing && !t.any_wrapped, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "closed-form d0 equals Bloch trace", 1.0, closed_form_oracle},
      {2, "spectrum symmetry criterion", 60.0, spectrum_symmetry},
      {3, "doubling regularized by twist gap", 1.0, doubling},
      {4, "continuum-limit residual slope >= 0.5", 5.0, continuum_residuals},
      {5, "moment/variance reproduction", 60.0, variance_reproduction},
      {6, "constraint checker", 5.0, constraint_checker},
      {7, "entropy properties", 60.0, entropy_properties},
      {8, "convergence study", 120.0, convergence},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s [%d] %s: %s (%.2fs%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
