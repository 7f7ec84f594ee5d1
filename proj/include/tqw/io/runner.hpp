#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "tqw/constraints.hpp"
#include "tqw/continuum.hpp"
#include "tqw/csv.hpp"
#include "tqw/errors.hpp"
#include "tqw/io/config.hpp"
#include "tqw/lattice_walk.hpp"
#include "tqw/momentum_analysis.hpp"
#include "tqw/observables.hpp"
#include "tqw/parallel.hpp"
#include "tqw/version.hpp"

namespace tqw::io {

inline std::string sha256_hex(const std::string& data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Hash of the config as parsed (key order and whitespace do not matter).
inline std::string config_hash(const json& doc) { return sha256_hex(doc.dump()); }

struct RunOptions {
  std::filesystem::path out_dir = "out";
  bool strict = false;
  unsigned threads = 1;
};

struct OutputFile {
  std::string path;
  std::uintmax_t bytes = 0;
  std::string sha256;
};

struct RunResult {
  ExperimentKind kind = ExperimentKind::Simulate;
  std::vector<OutputFile> outputs;
  std::vector<std::string> warnings;
  json manifest;
};

namespace detail {

class OutputSink {
 public:
  OutputSink(std::filesystem::path dir, std::vector<OutputFile>& files)
      : dir_(std::move(dir)), files_(files) {
    std::filesystem::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << content;
    os.close();
    if (!os) throw std::runtime_error("write failed: " + path.string());
    files_.push_back({name, content.size(), sha256_hex(content)});
  }

 private:
  std::filesystem::path dir_;
  std::vector<OutputFile>& files_;
};

struct Context {
  const ExperimentConfig& config;
  const RunOptions& options;
  OutputSink& sink;
  std::vector<std::string>& warnings;

  void warn(const std::string& msg) const {
    if (options.strict) throw PreconditionError("strict mode: " + msg);
    warnings.push_back(msg);
  }
};

inline std::size_t lattice_size(const ExperimentConfig& c, const WalkSpec& spec) {
  if (c.n_sites != 0) return c.n_sites;
  return required_sites(c.steps, std::sqrt(c.initial.sigma2), spec.dx(), substeps(spec).size());
}

inline json vec3(const std::array<double, 3>& v) { return json::array({v[0], v[1], v[2]}); }

inline void run_simulate(const Context& ctx) {
  const auto& c = ctx.config;
  const WalkSpec spec = c.walk.to_spec();
  const Spinor chi = c.initial.resolved_spinor();
  const std::size_t n_sites = lattice_size(c, spec);
  const SpinorField start = gaussian_init(n_sites, spec.dx(), c.initial.mu_x, c.initial.sigma2, chi);
  if (wavefront_wraps(start, substeps(spec).size(), c.steps)) {
    ctx.warn("wavefront wraps around the periodic lattice before the final step");
  }

  const TheoryInputs theory{c.initial.mu_x, c.initial.sigma2, chi};
  ObservableSeries series;
  std::ostringstream density_csv;
  csv::Writer density_out(density_csv, {"step", "t", "x", "rho"});
  auto observer = [&](std::size_t n, const SpinorField& s) {
    const double t = static_cast<double>(n) * spec.step_time();
    if (n % c.sample_stride == 0 || n == c.steps) {
      const Moments m = moments(s);
      const auto [m1_th, v_th] = theory_point(spec, theory, t);
      series.t.push_back(t);
      series.m1.push_back(m.m1);
      series.m1_theory.push_back(m1_th);
      series.variance.push_back(m.variance);
      series.variance_theory.push_back(v_th);
      series.entropy.push_back(entanglement_entropy(s));
    }
    if (c.density_stride > 0 && (n % c.density_stride == 0 || n == c.steps)) {
      for (std::size_t l = 0; l < s.size(); ++l) {
        density_out.row_text({csv::format(static_cast<long long>(n)), csv::format(t),
                              csv::format(s.position(l)), csv::format(s.probability(l))});
      }
    }
  };
  const Trajectory tr = evolve(start, spec, c.steps, 0, observer);

  std::ostringstream series_csv;
  write_csv(series_csv, series);
  ctx.sink.write("series.csv", series_csv.str());
  if (c.density_stride > 0) ctx.sink.write("density.csv", density_csv.str());

  json summary;
  summary["variant"] = std::string(to_string(spec.variant));
  summary["n_sites"] = n_sites;
  summary["steps"] = c.steps;
  summary["step_time"] = spec.step_time();
  summary["t_final"] = static_cast<double>(c.steps) * spec.step_time();
  summary["norm_drift"] = std::abs(tr.final_state.norm2() - 1.0);
  summary["wrapped"] = tr.wrapped;
  summary["m1"] = series.m1.back();
  summary["m1_theory"] = series.m1_theory.back();
  summary["variance"] = series.variance.back();
  summary["variance_theory"] = series.variance_theory.back();
  summary["entropy"] = series.entropy.back();
  if (series.t.size() >= 10) {
    const Diagnostics d = convergence_diagnostics(series);
    summary["s_infinity"] = d.s_infinity;
    summary["tau_5pct"] = d.tau_5pct;
    summary["n_extrema"] = d.n_extrema;
    summary["n_maxima"] = d.n_maxima;
  }
  ctx.sink.write("summary.json", summary.dump(2) + "\n");
}

inline void run_spectrum(const Context& ctx) {
  const auto& c = ctx.config;
  const WalkSpec spec = c.walk.to_spec();
  const SpectrumTable table = effective_spectrum(spec, bz_grid(c.spectrum.k_points));
  if (table.clamped_count > 0) {
    ctx.warn(std::to_string(table.clamped_count) + " samples had |d0| slightly above 1 and were clamped");
  }
  std::ostringstream os;
  write_csv(os, table);
  ctx.sink.write("spectrum.csv", os.str());

  const ContinuumModel model = continuum_model(spec);
  std::ostringstream cs;
  csv::Writer w(cs, {"kappa", "lambda_plus", "lambda_minus"});
  const auto& s = c.spectrum;
  for (std::size_t i = 0; i < s.kappa_points; ++i) {
    const double kappa = s.kappa_min + (s.kappa_max - s.kappa_min) * static_cast<double>(i) /
                                           static_cast<double>(s.kappa_points - 1);
    const auto [lp, lm] = continuum_spectrum(model, kappa);
    w.row({kappa, lp, lm});
  }
  ctx.sink.write("continuum_spectrum.csv", cs.str());

  const DoublingReport d = doubling_scan(table, s.zero_tol);
  json j;
  j["zeros"] = d.zeros;
  j["n_zeros"] = d.zeros.size();
  j["edge_gap"] = d.edge_gap;
  j["edge_gap_lower"] = d.edge_gap_lower;
  j["edge_gap_claimed"] = d.edge_gap_claimed ? json(*d.edge_gap_claimed) : json(nullptr);
  j["clamped_count"] = table.clamped_count;
  j["continuum"] = {{"mass", model.mass}, {"c1", model.c1}, {"c2", model.c2}};
  ctx.sink.write("doubling.json", j.dump(2) + "\n");
}

inline json report_json(const ConstraintReport& r) {
  json j;
  j["branch"] = to_string(r.branch);
  j["r"] = r.r;
  j["tolerance"] = r.tolerance;
  j["worst_residual"] = r.worst_residual;
  j["satisfied"] = r.satisfied;
  j["zeroth_order_residual"] = r.zeroth_order_residual;
  j["half_order_residual"] = r.half_order_residual;
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"residual", c.residual}, {"satisfied", c.satisfied}});
  }
  j["checks"] = checks;
  if (r.hamiltonian) {
    j["hamiltonian"] = {{"h0", vec3(r.hamiltonian->h0)},
                        {"h1", vec3(r.hamiltonian->h1)},
                        {"h2", vec3(r.hamiltonian->h2)}};
    j["dirac_axis"] = vec3(r.dirac_axis);
    j["c1"] = r.c1;
    j["c2"] = r.c2;
  } else {
    j["hamiltonian"] = nullptr;
  }
  return j;
}

inline void run_constraints(const Context& ctx) {
  const auto& c = ctx.config;
  const bool from_walk = !c.constraints.family.has_value();
  GeneralCoinFamily family;
  if (from_walk) {
    family = c.walk.variant == Variant::XI
                 ? GeneralCoinFamily::xi(c.walk.alpha1, c.walk.mass)
                 : GeneralCoinFamily::yy(c.walk.alpha1, c.walk.theta, c.walk.mass);
  } else {
    family = *c.constraints.family;
  }
  const ConstraintReport report = check_constraints(family, c.constraints.tolerance);

  std::vector<double> kappas = c.constraints.kappa;
  if (kappas.empty()) {
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> pick(-2.0, 2.0);
    for (std::size_t i = 0; i < c.constraints.random_kappa; ++i) kappas.push_back(pick(rng));
  }

  std::ostringstream os;
  csv::Writer w(os, {"source", "kappa", "epsilon", "unitary_residual", "generator_residual"});
  json limits = json::array();
  auto record = [&](const char* source, const LimitCheck& lc) {
    for (const auto& row : lc.rows) {
      w.row_text({source, csv::format(lc.kappa), csv::format(row.epsilon),
                  csv::format(row.unitary_residual), csv::format(row.generator_residual)});
    }
    limits.push_back({{"source", source},
                      {"kappa", lc.kappa},
                      {"slope_unitary", lc.slope_unitary},
                      {"slope_generator", lc.slope_generator},
                      {"converged", lc.converged}});
  };
  for (double kappa : kappas) {
    record("family", numeric_limit_check(family, c.constraints.eps_list, kappa));
  }
  if (from_walk) {
    const WalkSpec spec = c.walk.to_spec();
    for (double kappa : kappas) {
      record("walk", numeric_limit_check(spec, c.constraints.eps_list, kappa));
    }
  }
  ctx.sink.write("limit.csv", os.str());

  json j = report_json(report);
  j["family_source"] = from_walk ? "walk" : "config";
  j["limit_checks"] = limits;
  ctx.sink.write("constraints.json", j.dump(2) + "\n");
}

inline void run_converge(const Context& ctx) {
  const auto& c = ctx.config;
  const WalkSpec base = c.walk.to_spec();
  const InitialPacket init{c.initial.mu_x, c.initial.sigma2, c.initial.resolved_spinor()};
  const ConvergenceTable table =
      convergence_study(base, c.converge.eps_list, c.converge.t_final, init, ctx.options.threads);
  if (table.any_wrapped) ctx.warn("a convergence run wrapped around the periodic lattice");
  if (!table.strictly_decreasing) ctx.warnings.push_back("L2 error is not strictly decreasing in epsilon");
  std::ostringstream os;
  write_csv(os, table);
  ctx.sink.write("convergence.csv", os.str());
}

struct ScanPoint {
  double alpha1 = 0.0;
  double theta = 0.0;
  Spinor spinor{cplx{1.0}, cplx{}};
};

struct ScanResult {
  double theta_b = 0.0;
  double phi_b = 0.0;
  double s_final = 0.0;
  double s_continuum = 0.0;
  Diagnostics diag;
  bool wrapped = false;
};

inline std::pair<double, double> bloch_angles_of(const Spinor& v) {
  const Spinor u = v.normalized();
  const double theta_b = 2.0 * std::acos(std::clamp(std::abs(u.plus), 0.0, 1.0));
  if (std::abs(u.plus) == 0.0 || std::abs(u.minus) == 0.0) return {theta_b, 0.0};
  double phi = std::arg(u.minus) - std::arg(u.plus);
  phi = std::fmod(phi, 2 * std::numbers::pi);
  if (phi < 0) phi += 2 * std::numbers::pi;
  return {theta_b, phi};
}

inline std::vector<ScanPoint> scan_points(const ExperimentConfig& c) {
  const auto& e = c.entropy_scan;
  const bool xi = c.walk.variant == Variant::XI;
  const double theta_default = xi ? c.walk.theta1 : c.walk.theta;
  const std::vector<double> a_axis = e.alpha1.empty() ? std::vector<double>{c.walk.alpha1} : e.alpha1;
  const std::vector<double> t_axis = e.theta.empty() ? std::vector<double>{theta_default} : e.theta;
  std::vector<Spinor> spinors;
  if (e.bloch_n_theta > 0) {
    for (std::size_t i = 0; i < e.bloch_n_theta; ++i) {
      for (std::size_t j = 0; j < e.bloch_n_phi; ++j) {
        const BlochAngles b{std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(e.bloch_n_theta - 1),
                            2 * std::numbers::pi * static_cast<double>(j) /
                                static_cast<double>(e.bloch_n_phi)};
        spinors.push_back(b.spinor());
      }
    }
  } else {
    spinors.push_back(c.initial.resolved_spinor());
  }
  std::vector<ScanPoint> pts;
  for (double a : a_axis) {
    for (double t : t_axis) {
      for (const Spinor& s : spinors) pts.push_back({a, t, s});
    }
  }
  if (e.random_count > 0) {
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> ua(e.random_alpha1.first, e.random_alpha1.second);
    std::uniform_real_distribution<double> ut(e.random_theta.first, e.random_theta.second);
    std::uniform_real_distribution<double> ub(0.0, std::numbers::pi);
    std::uniform_real_distribution<double> up(0.0, 2 * std::numbers::pi);
    for (std::size_t i = 0; i < e.random_count; ++i) {
      const double a = ua(rng);
      const double t = ut(rng);
      const double tb = ub(rng);
      const double pb = up(rng);
      pts.push_back({a, t, BlochAngles{tb, pb}.spinor()});
    }
  }
  return pts;
}

inline void run_entropy_scan(const Context& ctx) {
  const auto& c = ctx.config;
  const std::vector<ScanPoint> pts = scan_points(c);
  std::vector<ScanResult> results(pts.size());
  parallel_for(pts.size(), ctx.options.threads, [&](std::size_t i) {
    const ScanPoint& p = pts[i];
    const WalkSpec spec =
        c.walk.variant == Variant::XI
            ? WalkSpec::xi(p.alpha1, p.theta, c.walk.mass, c.walk.epsilon, c.walk.scale_twist)
            : WalkSpec::yy(p.alpha1, p.theta, c.walk.mass, c.walk.epsilon);
    const std::size_t n_sites = lattice_size(c, spec);
    const SpinorField start =
        gaussian_init(n_sites, spec.dx(), c.initial.mu_x, c.initial.sigma2, p.spinor);
    ScanResult& r = results[i];
    const ObservableSeries s =
        observe(start, spec, c.steps, {c.initial.mu_x, c.initial.sigma2, p.spinor},
                c.sample_stride, &r.wrapped);
    std::tie(r.theta_b, r.phi_b) = bloch_angles_of(p.spinor);
    r.s_final = s.entropy.back();
    const double t = s.t.back();
    r.s_continuum = c.walk.variant == Variant::XI
                        ? continuum_entropy_xi(t, 2.0 * p.alpha1 + 0.5 * p.theta,
                                               std::sqrt(c.initial.sigma2), p.spinor)
                        : continuum_entropy_yy(t, p.alpha1, p.theta, p.spinor);
    r.diag = convergence_diagnostics(s);
  });

  std::ostringstream os;
  csv::Writer w(os, {"alpha1", "theta", "theta_b", "phi_b", "s_final", "s_continuum_final",
                     "s_infinity", "tau_5pct", "n_extrema", "n_maxima", "wrapped"});
  bool any_wrapped = false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const ScanResult& r = results[i];
    any_wrapped = any_wrapped || r.wrapped;
    w.row_text({csv::format(pts[i].alpha1), csv::format(pts[i].theta), csv::format(r.theta_b),
                csv::format(r.phi_b), csv::format(r.s_final), csv::format(r.s_continuum),
                csv::format(r.diag.s_infinity), csv::format(r.diag.tau_5pct),
                csv::format(static_cast<long long>(r.diag.n_extrema)),
                csv::format(static_cast<long long>(r.diag.n_maxima)), r.wrapped ? "1" : "0"});
  }
  if (any_wrapped) ctx.warn("at least one scan point wrapped around the periodic lattice");
  ctx.sink.write("entropy_scan.csv", os.str());
}

inline std::string join_diagnostics(const std::vector<Diagnostic>& ds, Diagnostic::Kind kind) {
  std::string msg;
  for (const auto& d : ds) {
    if (d.kind != kind) continue;
    if (!msg.empty()) msg += "; ";
    msg += d.field + ": " + d.message;
  }
  return msg;
}

}  // namespace detail

/// Validates, runs one experiment, writes its outputs and manifest.json into out_dir.
/// Throws SchemaError for malformed configs and PreconditionError for physically invalid ones.
inline RunResult run(const json& doc, const RunOptions& options) {
  const std::string started = utc_timestamp();
  const ParsedConfig parsed = parse_config(doc);
  if (parsed.has(Diagnostic::Kind::Schema)) {
    throw SchemaError(detail::join_diagnostics(parsed.diagnostics, Diagnostic::Kind::Schema));
  }
  if (parsed.has(Diagnostic::Kind::Physics)) {
    throw PreconditionError(detail::join_diagnostics(parsed.diagnostics, Diagnostic::Kind::Physics));
  }
  if (options.threads == 0) throw PreconditionError("threads must be >= 1");

  RunResult result;
  result.kind = parsed.config.kind;
  detail::OutputSink sink(options.out_dir, result.outputs);
  const detail::Context ctx{parsed.config, options, sink, result.warnings};
  for (const auto& d : parsed.diagnostics) {
    if (d.kind == Diagnostic::Kind::Warning) ctx.warn(d.field + ": " + d.message);
  }

  sink.write("config.json", to_json(parsed.config).dump(2) + "\n");
  switch (parsed.config.kind) {
    case ExperimentKind::Simulate: detail::run_simulate(ctx); break;
    case ExperimentKind::Spectrum: detail::run_spectrum(ctx); break;
    case ExperimentKind::Constraints: detail::run_constraints(ctx); break;
    case ExperimentKind::Converge: detail::run_converge(ctx); break;
    case ExperimentKind::EntropyScan: detail::run_entropy_scan(ctx); break;
  }

  json m;
  m["tool_version"] = version;
  m["experiment"] = to_string(result.kind);
  m["config_sha256"] = config_hash(doc);
  m["started_utc"] = started;
  m["finished_utc"] = utc_timestamp();
  m["threads"] = options.threads;
  m["strict"] = options.strict;
  json files = json::array();
  for (const auto& f : result.outputs) {
    files.push_back({{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  }
  m["outputs"] = files;
  m["warnings"] = result.warnings;
  std::ofstream os(options.out_dir / "manifest.json", std::ios::trunc);
  os << m.dump(2) << "\n";
  if (!os) throw std::runtime_error("cannot write manifest.json");
  result.manifest = std::move(m);
  return result;
}

}  // namespace tqw::io
