// Command-line front end: verify, identities, horizons, construct.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gravaudit/harness/harness.hpp"

namespace {

using namespace gva::harness;

gva::ParamMap parse_params(const std::vector<std::string>& items) {
  gva::ParamMap out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects name=value, got '" + item + "'");
    const std::string name = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0') throw ConfigError("--param " + name + ": '" + text + "' is not a number");
    out[name] = v;
  }
  return out;
}

void write(const Artifact& a) {
  if (a.path.empty()) {
    std::cout << a.bytes;
    return;
  }
  std::ofstream f(a.path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + a.path + "'");
  f << a.bytes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit engine for closed-form Lorentzian metrics"};
  app.require_subcommand(1);

  AuditConfig cfg;
  std::vector<std::string> params;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--metric", cfg.metric, "catalog name or .gmet path");
    sub->add_option("--param", params, "parameter override name=value (repeatable)");
    sub->add_option("--lambda", cfg.lambda, "cosmological constant");
    sub->add_option("--samples", cfg.samples, "sample count (r-samples per branch for horizons)");
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--tol", cfg.tol, "tolerance of the main asserted check");
    sub->add_option("--out", cfg.out, "output path (default stdout)");
    sub->add_option("--format", cfg.format, "json | csv | svg");
    sub->add_option("--jobs", cfg.jobs, "worker threads; output does not depend on it")->check(CLI::PositiveNumber);
  };

  auto* verify = app.add_subcommand("verify", "calibration, curvature audit and claim verdicts");
  auto* identities = app.add_subcommand("identities", "helper-scalar identities, g00 bound, periodicity");
  identities->add_option("--q-scale", cfg.q_scale, "scale Q in the identities (negative control)");
  auto* horizons = app.add_subcommand("horizons", "trace horizon candidate branches");
  horizons->add_option("--kmin", cfg.kmin, "first period index");
  horizons->add_option("--kmax", cfg.kmax, "last period index");
  horizons->add_option("--cases", cfg.cases, "I and/or II")->delimiter(',');
  horizons->add_option("--arcs", cfg.arcs, "principal and/or conjugate")->delimiter(',');
  auto* construct = app.add_subcommand("construct", "quadrature for v and field-equation cascade");
  construct->add_option("--ansatz", cfg.ansatz, "f(t, x) of the ansatz");
  construct->add_option("--template", cfg.template_path, "Type-I .gmet with v omitted");
  construct->add_option("--x-lo", cfg.x_lo, "quadrature interval start");
  construct->add_option("--x-hi", cfg.x_hi, "quadrature interval end");
  for (auto* sub : {verify, identities, horizons, construct}) common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    cfg.overrides = parse_params(params);
    RunResult r;
    if (verify->parsed()) r = run_verify(cfg);
    else if (identities->parsed()) r = run_identities(cfg);
    else if (horizons->parsed()) r = run_horizons(cfg);
    else r = run_construct(cfg);
    for (const auto& a : r.artifacts) write(a);
    if (!r.message.empty()) std::cerr << r.message << '\n';
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const gva::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomainError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomainError;
  }
}
