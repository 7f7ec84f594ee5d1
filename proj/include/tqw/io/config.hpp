#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tqw/coin_algebra.hpp"
#include "tqw/constraints.hpp"
#include "tqw/errors.hpp"
#include "tqw/lattice_walk.hpp"
#include "tqw/observables.hpp"
#include "tqw/walk_spec.hpp"

namespace tqw::io {

using json = nlohmann::json;

enum class ExperimentKind { Simulate, Spectrum, Constraints, Converge, EntropyScan };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Simulate: return "simulate";
    case ExperimentKind::Spectrum: return "spectrum";
    case ExperimentKind::Constraints: return "constraints";
    case ExperimentKind::Converge: return "converge";
    case ExperimentKind::EntropyScan: break;
  }
  return "entropy-scan";
}

inline std::optional<ExperimentKind> parse_kind(const std::string& s) {
  for (auto k : {ExperimentKind::Simulate, ExperimentKind::Spectrum, ExperimentKind::Constraints,
                 ExperimentKind::Converge, ExperimentKind::EntropyScan}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

struct Diagnostic {
  enum class Kind { Schema, Physics, Warning };
  Kind kind = Kind::Schema;
  std::string field;
  std::string message;
};

inline const char* to_string(Diagnostic::Kind k) {
  switch (k) {
    case Diagnostic::Kind::Schema: return "schema";
    case Diagnostic::Kind::Physics: return "physics";
    case Diagnostic::Kind::Warning: break;
  }
  return "warning";
}

struct WalkConfig {
  Variant variant = Variant::YY;
  bool bare = false;  // angles given per substep instead of scaled coefficients
  double epsilon = 0.01;
  double alpha1 = 0.0;
  double theta = 0.0;   // YY twist, or bare twist
  double theta1 = 0.0;  // XI scaled twist coefficient
  double mass = 0.0;
  double alpha = 0.0;  // bare
  double mu = 0.0;     // bare
  bool scale_twist = true;

  [[nodiscard]] WalkSpec to_spec() const {
    if (bare) return WalkSpec::bare(variant, alpha, theta, mu, epsilon);
    if (variant == Variant::XI) return WalkSpec::xi(alpha1, theta1, mass, epsilon, scale_twist);
    return WalkSpec::yy(alpha1, theta, mass, epsilon);
  }
};

struct InitialConfig {
  double mu_x = 0.0;
  double sigma2 = 0.7;
  Spinor spinor{cplx{1.0}, cplx{}};
  std::optional<BlochAngles> bloch;

  [[nodiscard]] Spinor resolved_spinor() const { return bloch ? bloch->spinor() : spinor; }
};

struct SpectrumConfig {
  std::size_t k_points = 1001;
  double zero_tol = 1e-6;
  double kappa_min = -3.0;
  double kappa_max = 3.0;
  std::size_t kappa_points = 601;
};

struct ConstraintsConfig {
  std::optional<GeneralCoinFamily> family;  // absent: derived from the walk block
  double tolerance = 1e-9;
  std::vector<double> eps_list{1e-2, 1e-3, 1e-4};
  std::vector<double> kappa;
  std::size_t random_kappa = 10;
};

struct ConvergeConfig {
  std::vector<double> eps_list{0.04, 0.01, 0.0025};
  double t_final = 1.0;
};

struct EntropyScanConfig {
  std::vector<double> alpha1;
  std::vector<double> theta;  // theta for YY, theta1 for XI
  std::size_t bloch_n_theta = 0;
  std::size_t bloch_n_phi = 0;
  std::size_t random_count = 0;
  std::pair<double, double> random_alpha1{-2.0, 2.0};
  std::pair<double, double> random_theta{-2.0, 2.0};
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Simulate;
  WalkConfig walk;
  InitialConfig initial;
  std::size_t n_sites = 0;  // 0: sized automatically
  std::size_t steps = 0;
  std::size_t sample_stride = 1;
  std::size_t density_stride = 0;
  SpectrumConfig spectrum;
  ConstraintsConfig constraints;
  ConvergeConfig converge;
  EntropyScanConfig entropy_scan;
  std::uint64_t seed = 0;
};

namespace detail {

/// Walks a JSON document, collecting diagnostics instead of throwing.
class Reader {
 public:
  explicit Reader(std::vector<Diagnostic>& out) : out_(out) {}

  void schema(const std::string& field, const std::string& msg) {
    out_.push_back({Diagnostic::Kind::Schema, field, msg});
  }
  void physics(const std::string& field, const std::string& msg) {
    out_.push_back({Diagnostic::Kind::Physics, field, msg});
  }
  void warning(const std::string& field, const std::string& msg) {
    out_.push_back({Diagnostic::Kind::Warning, field, msg});
  }

  bool object(const json& j, const std::string& path, std::set<std::string> allowed) {
    if (!j.is_object()) {
      schema(path.empty() ? "$" : path, "must be an object");
      return false;
    }
    for (const auto& [key, value] : j.items()) {
      (void)value;
      if (!allowed.count(key)) schema(join(path, key), "unknown field");
    }
    return true;
  }

  void number(const json& j, const std::string& path, const std::string& key, double& dst,
              bool required = false) {
    if (!j.contains(key)) {
      if (required) schema(join(path, key), "required number is missing");
      return;
    }
    const json& v = j.at(key);
    if (!v.is_number()) {
      schema(join(path, key), "must be a number");
      return;
    }
    dst = v.get<double>();
    if (!std::isfinite(dst)) physics(join(path, key), "must be finite");
  }

  void count(const json& j, const std::string& path, const std::string& key, std::size_t& dst,
             bool required = false) {
    if (!j.contains(key)) {
      if (required) schema(join(path, key), "required integer is missing");
      return;
    }
    const json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      schema(join(path, key), "must be a non-negative integer");
      return;
    }
    dst = v.get<std::size_t>();
  }

  void boolean(const json& j, const std::string& path, const std::string& key, bool& dst) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_boolean()) {
      schema(join(path, key), "must be a boolean");
      return;
    }
    dst = j.at(key).get<bool>();
  }

  /// Either a list of numbers or {"from", "to", "count"} (endpoint-inclusive).
  void axis(const json& j, const std::string& path, const std::string& key,
            std::vector<double>& dst) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    const std::string p = join(path, key);
    if (v.is_array()) {
      dst.clear();
      for (const auto& x : v) {
        if (!x.is_number()) {
          schema(p, "list entries must be numbers");
          return;
        }
        dst.push_back(x.get<double>());
      }
      return;
    }
    if (v.is_object()) {
      if (!object(v, p, {"from", "to", "count"})) return;
      double from = 0, to = 0;
      std::size_t n = 0;
      number(v, p, "from", from, true);
      number(v, p, "to", to, true);
      count(v, p, "count", n, true);
      if (n < 1) {
        physics(join(p, "count"), "must be >= 1");
        return;
      }
      dst.clear();
      for (std::size_t i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        dst.push_back(from + (to - from) * f);
      }
      return;
    }
    schema(p, "must be a list of numbers or a {from, to, count} range");
  }

  void pair(const json& j, const std::string& path, const std::string& key,
            std::pair<double, double>& dst) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      schema(join(path, key), "must be a [low, high] pair of numbers");
      return;
    }
    dst = {v[0].get<double>(), v[1].get<double>()};
    if (!(dst.first <= dst.second)) physics(join(path, key), "low must not exceed high");
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::vector<Diagnostic>& out_;
};

inline bool strictly_decreasing_positive(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || (i > 0 && !(v[i] < v[i - 1]))) return false;
  }
  return true;
}

inline void read_walk(Reader& r, const json& j, WalkConfig& w) {
  const std::string p = "walk";
  if (!r.object(j, p, {"variant", "parameterization", "epsilon", "alpha1", "theta", "theta1",
                       "mass", "alpha", "mu", "scale_twist"})) {
    return;
  }
  if (!j.contains("variant") || !j.at("variant").is_string()) {
    r.schema("walk.variant", "required string \"YY\" or \"XI\"");
  } else {
    const auto v = j.at("variant").get<std::string>();
    if (v == "YY") {
      w.variant = Variant::YY;
    } else if (v == "XI") {
      w.variant = Variant::XI;
    } else {
      r.schema("walk.variant", "must be \"YY\" or \"XI\"");
    }
  }
  if (j.contains("parameterization")) {
    const json& v = j.at("parameterization");
    if (!v.is_string() || (v != "scaled" && v != "bare")) {
      r.schema("walk.parameterization", "must be \"scaled\" or \"bare\"");
    } else {
      w.bare = v == "bare";
    }
  }
  r.number(j, p, "epsilon", w.epsilon, true);
  r.number(j, p, "theta", w.theta);
  r.number(j, p, "mass", w.mass);
  r.boolean(j, p, "scale_twist", w.scale_twist);
  if (w.bare) {
    r.number(j, p, "alpha", w.alpha, true);
    r.number(j, p, "mu", w.mu);
    for (const char* k : {"alpha1", "theta1", "mass", "scale_twist"}) {
      if (j.contains(k)) r.schema(Reader::join(p, k), "not used with bare parameterization");
    }
  } else {
    r.number(j, p, "alpha1", w.alpha1, true);
    for (const char* k : {"alpha", "mu"}) {
      if (j.contains(k)) r.schema(Reader::join(p, k), "only used with bare parameterization");
    }
    if (w.variant == Variant::XI) {
      r.number(j, p, "theta1", w.theta1);
      if (j.contains("theta")) r.schema("walk.theta", "XI walks take theta1");
    } else {
      if (j.contains("theta1")) r.schema("walk.theta1", "theta1 is an XI parameter");
      if (j.contains("scale_twist")) r.schema("walk.scale_twist", "scale_twist is an XI parameter");
    }
  }
  if (!(w.epsilon > 0.0)) r.physics("walk.epsilon", "must be > 0");
  if (w.variant == Variant::XI && !w.bare && !w.scale_twist) {
    r.warning("walk.scale_twist",
              "XI twist is not scaled as sqrt(epsilon)*theta1; the continuous limit requires "
              "that scaling and residuals will diverge");
  }
}

inline void read_spinor(Reader& r, const json& j, const std::string& p, Spinor& out) {
  if (!r.object(j, p, {"plus", "minus"})) return;
  auto comp = [&](const char* key, cplx& dst) {
    if (!j.contains(key)) {
      r.schema(Reader::join(p, key), "required [re, im] pair is missing");
      return;
    }
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      r.schema(Reader::join(p, key), "must be a [re, im] pair of numbers");
      return;
    }
    dst = {v[0].get<double>(), v[1].get<double>()};
  };
  comp("plus", out.plus);
  comp("minus", out.minus);
  if (!(out.norm2() > 0.0)) r.physics(p, "spinor must be nonzero");
}

inline void read_initial(Reader& r, const json& j, InitialConfig& in) {
  const std::string p = "initial";
  if (!r.object(j, p, {"mu_x", "sigma2", "spinor", "bloch"})) return;
  r.number(j, p, "mu_x", in.mu_x);
  r.number(j, p, "sigma2", in.sigma2);
  if (!(in.sigma2 > 0.0)) r.physics("initial.sigma2", "must be > 0");
  if (j.contains("spinor") && j.contains("bloch")) {
    r.schema(p, "give either spinor or bloch, not both");
  }
  if (j.contains("spinor")) read_spinor(r, j.at("spinor"), "initial.spinor", in.spinor);
  if (j.contains("bloch")) {
    const json& b = j.at("bloch");
    if (r.object(b, "initial.bloch", {"theta_b", "phi_b"})) {
      BlochAngles a;
      r.number(b, "initial.bloch", "theta_b", a.theta_b, true);
      r.number(b, "initial.bloch", "phi_b", a.phi_b, true);
      if (!(a.theta_b >= 0.0 && a.theta_b <= std::numbers::pi)) {
        r.physics("initial.bloch.theta_b", "must lie in [0, pi]");
      }
      if (!(a.phi_b >= 0.0 && a.phi_b < 2 * std::numbers::pi)) {
        r.physics("initial.bloch.phi_b", "must lie in [0, 2pi)");
      }
      in.bloch = a;
    }
  }
}

inline void read_leg(Reader& r, const json& j, const std::string& p, CoinLeg& leg) {
  if (!r.object(j, p, {"delta", "theta0", "theta_half", "phi", "zeta"})) return;
  r.number(j, p, "delta", leg.delta, true);
  r.number(j, p, "theta0", leg.theta0, true);
  r.number(j, p, "theta_half", leg.theta_half, true);
  r.number(j, p, "phi", leg.phi, true);
  r.number(j, p, "zeta", leg.zeta, true);
}

inline void read_constraints(Reader& r, const json& j, ConstraintsConfig& c) {
  const std::string p = "constraints";
  if (!r.object(j, p, {"family", "tolerance", "eps_list", "kappa", "random_kappa"})) return;
  if (j.contains("family")) {
    const json& f = j.at("family");
    const std::string fp = "constraints.family";
    if (r.object(f, fp, {"alpha", "beta", "twist", "mass"})) {
      GeneralCoinFamily fam;
      if (f.contains("alpha")) {
        read_leg(r, f.at("alpha"), fp + ".alpha", fam.alpha);
      } else {
        r.schema(fp + ".alpha", "required coin leg is missing");
      }
      if (f.contains("beta")) {
        read_leg(r, f.at("beta"), fp + ".beta", fam.beta);
      } else {
        r.schema(fp + ".beta", "required coin leg is missing");
      }
      r.number(f, fp, "twist", fam.twist);
      r.number(f, fp, "mass", fam.mass);
      c.family = fam;
    }
  }
  r.number(j, p, "tolerance", c.tolerance);
  if (!(c.tolerance > 0.0)) r.physics("constraints.tolerance", "must be > 0");
  r.axis(j, p, "eps_list", c.eps_list);
  if (c.eps_list.size() < 2 || !strictly_decreasing_positive(c.eps_list)) {
    r.physics("constraints.eps_list", "needs >= 2 positive, strictly decreasing values");
  }
  r.axis(j, p, "kappa", c.kappa);
  r.count(j, p, "random_kappa", c.random_kappa);
}

inline void read_converge(Reader& r, const json& j, ConvergeConfig& c) {
  const std::string p = "converge";
  if (!r.object(j, p, {"eps_list", "t_final"})) return;
  r.axis(j, p, "eps_list", c.eps_list);
  r.number(j, p, "t_final", c.t_final);
  if (c.eps_list.empty() || !strictly_decreasing_positive(c.eps_list)) {
    r.physics("converge.eps_list", "needs positive, strictly decreasing values");
  }
  if (!(c.t_final >= 0.0)) r.physics("converge.t_final", "must be >= 0");
}

inline void read_spectrum(Reader& r, const json& j, SpectrumConfig& s) {
  const std::string p = "spectrum";
  if (!r.object(j, p, {"k_points", "zero_tol", "kappa_min", "kappa_max", "kappa_points"})) return;
  r.count(j, p, "k_points", s.k_points);
  r.number(j, p, "zero_tol", s.zero_tol);
  r.number(j, p, "kappa_min", s.kappa_min);
  r.number(j, p, "kappa_max", s.kappa_max);
  r.count(j, p, "kappa_points", s.kappa_points);
  if (s.k_points < 3) r.physics("spectrum.k_points", "must be >= 3");
  if (s.k_points % 2 == 0) r.warning("spectrum.k_points", "even count does not sample k = 0");
  if (!(s.zero_tol > 0.0)) r.physics("spectrum.zero_tol", "must be > 0");
  if (s.kappa_points < 2) r.physics("spectrum.kappa_points", "must be >= 2");
  if (!(s.kappa_min < s.kappa_max)) r.physics("spectrum.kappa_min", "must be below kappa_max");
}

inline void read_entropy_scan(Reader& r, const json& j, EntropyScanConfig& e) {
  const std::string p = "entropy_scan";
  if (!r.object(j, p, {"alpha1", "theta", "bloch_grid", "random"})) return;
  r.axis(j, p, "alpha1", e.alpha1);
  r.axis(j, p, "theta", e.theta);
  if (j.contains("bloch_grid")) {
    const json& b = j.at("bloch_grid");
    if (r.object(b, "entropy_scan.bloch_grid", {"n_theta", "n_phi"})) {
      r.count(b, "entropy_scan.bloch_grid", "n_theta", e.bloch_n_theta, true);
      r.count(b, "entropy_scan.bloch_grid", "n_phi", e.bloch_n_phi, true);
      if (e.bloch_n_theta < 2 || e.bloch_n_phi < 1) {
        r.physics("entropy_scan.bloch_grid", "needs n_theta >= 2 and n_phi >= 1");
      }
    }
  }
  if (j.contains("random")) {
    const json& x = j.at("random");
    if (r.object(x, "entropy_scan.random", {"count", "alpha1", "theta"})) {
      r.count(x, "entropy_scan.random", "count", e.random_count, true);
      r.pair(x, "entropy_scan.random", "alpha1", e.random_alpha1);
      r.pair(x, "entropy_scan.random", "theta", e.random_theta);
    }
  }
}

}  // namespace detail

struct ParsedConfig {
  ExperimentConfig config;
  std::vector<Diagnostic> diagnostics;

  [[nodiscard]] bool ok() const {
    for (const auto& d : diagnostics) {
      if (d.kind != Diagnostic::Kind::Warning) return false;
    }
    return true;
  }
  [[nodiscard]] bool has(Diagnostic::Kind k) const {
    for (const auto& d : diagnostics) {
      if (d.kind == k) return true;
    }
    return false;
  }
};

/// Parses and checks a config document. Diagnostics of kind Schema or Physics block a run.
inline ParsedConfig parse_config(const json& doc) {
  ParsedConfig out;
  detail::Reader r(out.diagnostics);
  ExperimentConfig& c = out.config;
  if (!r.object(doc, "", {"experiment", "walk", "initial", "lattice", "steps", "sample_stride",
                          "density_stride", "spectrum", "constraints", "converge",
                          "entropy_scan", "seed"})) {
    return out;
  }
  if (!doc.contains("experiment") || !doc.at("experiment").is_string() ||
      !parse_kind(doc.at("experiment").get<std::string>())) {
    r.schema("experiment",
             "required; one of simulate, spectrum, constraints, converge, entropy-scan");
  } else {
    c.kind = *parse_kind(doc.at("experiment").get<std::string>());
  }
  if (doc.contains("walk")) {
    detail::read_walk(r, doc.at("walk"), c.walk);
  } else {
    r.schema("walk", "required object is missing");
  }
  if (doc.contains("initial")) detail::read_initial(r, doc.at("initial"), c.initial);
  if (doc.contains("lattice")) {
    const json& l = doc.at("lattice");
    if (r.object(l, "lattice", {"n_sites"})) r.count(l, "lattice", "n_sites", c.n_sites);
    if (c.n_sites % 2 != 0) r.physics("lattice.n_sites", "must be even (0 selects automatic sizing)");
  }
  r.count(doc, "", "steps", c.steps);
  r.count(doc, "", "sample_stride", c.sample_stride);
  r.count(doc, "", "density_stride", c.density_stride);
  if (c.sample_stride == 0) r.physics("sample_stride", "must be >= 1");
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) {
      r.schema("seed", "must be a non-negative integer");
    } else {
      c.seed = doc.at("seed").get<std::uint64_t>();
    }
  }
  if (doc.contains("spectrum")) detail::read_spectrum(r, doc.at("spectrum"), c.spectrum);
  if (doc.contains("constraints")) {
    detail::read_constraints(r, doc.at("constraints"), c.constraints);
  }
  if (doc.contains("converge")) detail::read_converge(r, doc.at("converge"), c.converge);
  if (doc.contains("entropy_scan")) {
    detail::read_entropy_scan(r, doc.at("entropy_scan"), c.entropy_scan);
  }

  const bool needs_scaled = c.kind == ExperimentKind::Converge ||
                            c.kind == ExperimentKind::EntropyScan ||
                            (c.kind == ExperimentKind::Constraints && !c.constraints.family);
  if (needs_scaled && c.walk.bare) {
    r.schema("walk.parameterization", std::string(to_string(c.kind)) +
                                          " needs the scaled parameterization");
  }
  if (c.kind == ExperimentKind::EntropyScan && c.entropy_scan.alpha1.empty() &&
      c.entropy_scan.theta.empty() && c.entropy_scan.bloch_n_theta == 0 &&
      c.entropy_scan.random_count == 0) {
    r.warning("entropy_scan", "no axes given; the scan evaluates the walk block alone");
  }
  if (c.kind == ExperimentKind::Simulate && c.n_sites != 0 && out.ok()) {
    try {
      const WalkSpec spec = c.walk.to_spec();
      const SpinorField s = gaussian_init(c.n_sites, spec.dx(), c.initial.mu_x, c.initial.sigma2,
                                          c.initial.resolved_spinor());
      if (wavefront_wraps(s, substeps(spec).size(), c.steps)) {
        r.warning("lattice.n_sites", "lattice too small: the wavefront wraps within the run");
      }
    } catch (const PreconditionError& e) {
      r.physics("walk", e.what());
    }
  }
  return out;
}

inline std::vector<Diagnostic> validate(const json& doc) { return parse_config(doc).diagnostics; }

/// Normalized echo of a parsed config; it re-validates to the same config.
inline json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = to_string(c.kind);
  json w;
  w["variant"] = std::string(to_string(c.walk.variant));
  w["parameterization"] = c.walk.bare ? "bare" : "scaled";
  w["epsilon"] = c.walk.epsilon;
  if (c.walk.bare) {
    w["alpha"] = c.walk.alpha;
    w["theta"] = c.walk.theta;
    w["mu"] = c.walk.mu;
  } else {
    w["alpha1"] = c.walk.alpha1;
    w["mass"] = c.walk.mass;
    if (c.walk.variant == Variant::XI) {
      w["theta1"] = c.walk.theta1;
      w["scale_twist"] = c.walk.scale_twist;
    } else {
      w["theta"] = c.walk.theta;
    }
  }
  j["walk"] = w;
  json in;
  in["mu_x"] = c.initial.mu_x;
  in["sigma2"] = c.initial.sigma2;
  if (c.initial.bloch) {
    in["bloch"] = {{"theta_b", c.initial.bloch->theta_b}, {"phi_b", c.initial.bloch->phi_b}};
  } else {
    in["spinor"] = {{"plus", {c.initial.spinor.plus.real(), c.initial.spinor.plus.imag()}},
                    {"minus", {c.initial.spinor.minus.real(), c.initial.spinor.minus.imag()}}};
  }
  j["initial"] = in;
  j["lattice"] = {{"n_sites", c.n_sites}};
  j["steps"] = c.steps;
  j["sample_stride"] = c.sample_stride;
  j["density_stride"] = c.density_stride;
  j["seed"] = c.seed;
  j["spectrum"] = {{"k_points", c.spectrum.k_points},
                   {"zero_tol", c.spectrum.zero_tol},
                   {"kappa_min", c.spectrum.kappa_min},
                   {"kappa_max", c.spectrum.kappa_max},
                   {"kappa_points", c.spectrum.kappa_points}};
  json cons = {{"tolerance", c.constraints.tolerance},
               {"eps_list", c.constraints.eps_list},
               {"kappa", c.constraints.kappa},
               {"random_kappa", c.constraints.random_kappa}};
  if (c.constraints.family) {
    auto leg = [](const CoinLeg& l) {
      return json{{"delta", l.delta}, {"theta0", l.theta0}, {"theta_half", l.theta_half},
                  {"phi", l.phi}, {"zeta", l.zeta}};
    };
    const auto& f = *c.constraints.family;
    cons["family"] = {{"alpha", leg(f.alpha)}, {"beta", leg(f.beta)}, {"twist", f.twist},
                      {"mass", f.mass}};
  }
  j["constraints"] = cons;
  j["converge"] = {{"eps_list", c.converge.eps_list}, {"t_final", c.converge.t_final}};
  const auto& e = c.entropy_scan;
  json scan = {{"alpha1", e.alpha1}, {"theta", e.theta}};
  if (e.bloch_n_theta > 0) scan["bloch_grid"] = {{"n_theta", e.bloch_n_theta}, {"n_phi", e.bloch_n_phi}};
  if (e.random_count > 0) {
    scan["random"] = {{"count", e.random_count},
                      {"alpha1", {e.random_alpha1.first, e.random_alpha1.second}},
                      {"theta", {e.random_theta.first, e.random_theta.second}}};
  }
  j["entropy_scan"] = scan;
  return j;
}

}  // namespace tqw::io
