#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tqw/errors.hpp"
#include "tqw/io/config.hpp"
#include "tqw/io/runner.hpp"
#include "tqw/version.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_schema = 2;
constexpr int exit_physics = 3;

struct Options {
  std::string config;
  std::string out = "out";
  bool strict = false;
  unsigned threads = 1;
};

tqw::io::json load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw tqw::SchemaError("cannot read config file " + path);
  try {
    return tqw::io::json::parse(is);
  } catch (const tqw::io::json::parse_error& e) {
    throw tqw::SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
}

int run_experiment(const std::string& expected, const Options& opt) {
  tqw::io::json doc = load(opt.config);
  if (doc.is_object() && doc.contains("experiment") && doc["experiment"] != expected) {
    throw tqw::SchemaError("config declares experiment " + doc["experiment"].dump() +
                           " but the subcommand is " + expected);
  }
  const auto result = tqw::io::run(doc, {opt.out, opt.strict, opt.threads});
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "wrote " << result.outputs.size() + 1 << " files to " << opt.out << "\n";
  return exit_ok;
}

int run_validate(const Options& opt) {
  const tqw::io::json doc = load(opt.config);
  const auto parsed = tqw::io::parse_config(doc);
  for (const auto& d : parsed.diagnostics) {
    std::cout << tqw::io::to_string(d.kind) << "\t" << d.field << "\t" << d.message << "\n";
  }
  if (parsed.has(tqw::io::Diagnostic::Kind::Schema)) return exit_schema;
  if (parsed.has(tqw::io::Diagnostic::Kind::Physics)) return exit_physics;
  if (opt.strict && parsed.has(tqw::io::Diagnostic::Kind::Warning)) return exit_physics;
  std::cout << "ok\n";
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twisted quantum walk simulator"};
  app.set_version_flag("--version", std::string(tqw::version));
  app.require_subcommand(1);

  Options opt;
  const char* kinds[] = {"simulate", "spectrum", "constraints", "converge", "entropy-scan"};
  const char* blurbs[] = {"evolve a packet and record moments and entropy",
                          "effective spectrum and doubling scan",
                          "continuous-limit constraint check",
                          "walk vs continuum L2 error over epsilon",
                          "entropy diagnostics over a parameter grid"};
  for (int i = 0; i < 5; ++i) {
    auto* sub = app.add_subcommand(kinds[i], blurbs[i]);
    sub->add_option("--config", opt.config, "experiment config (JSON)")->required();
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_flag("--strict", opt.strict, "treat warnings and lattice wraps as errors");
    sub->add_option("--threads", opt.threads, "worker threads")
        ->capture_default_str()
        ->check(CLI::Range(1u, 1024u));
  }
  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("--config", opt.config, "experiment config (JSON)")->required();
  validate->add_flag("--strict", opt.strict, "fail on warnings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_schema;
  }

  try {
    if (validate->parsed()) return run_validate(opt);
    for (const char* k : kinds) {
      if (app.got_subcommand(k)) return run_experiment(k, opt);
    }
  } catch (const tqw::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return exit_schema;
  } catch (const tqw::PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return exit_physics;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
  return exit_failure;
}
