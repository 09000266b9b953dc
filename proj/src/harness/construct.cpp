#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "gravaudit/geometry/parallel.hpp"
#include "gravaudit/constructor/constructor.hpp"

namespace gva::harness {

using namespace detail;

namespace {

// Fixed (t, y, z) at which the x-quadrature runs.
constexpr Point4 kBase{0.5, 0.0, 0.25, 0.75};
constexpr std::size_t kGrid = 20;

json quadrature_block(const AuditConfig& config, double tol, bool& ok) {
  constructor::AnsatzSpec a;
  try {
    a = constructor::simple_ansatz(config.ansatz);
  } catch (const ParseError& e) {
    throw ConfigError("ansatz: " + std::string(e.what()));
  }
  const auto tpl = constructor::template_from_ansatz(a);
  Point4 start = kBase;
  start[1] = config.x_lo;
  const double v0 = constructor::v_from_ansatz(a, {}, start);
  const auto vs = constructor::solve_v(tpl, {}, kBase, config.x_lo, config.x_hi, config.x_lo, v0, kGrid);
  json rows = json::array();
  double worst = 0.0;
  for (const auto& s : vs) {
    Point4 p = kBase;
    p[1] = s.x;
    const double closed = constructor::v_from_ansatz(a, {}, p);
    const double rel = std::fabs(s.v - closed) / std::max(std::fabs(closed), 1e-300);
    worst = std::max(worst, rel);
    rows.push_back(json(std::vector<double>{s.x, s.v, closed, rel}));
  }
  ok = worst <= tol;
  return {{"ansatz_f", config.ansatz},
          {"rho_tilde", -1.0},
          {"sigma_tilde", -1.0},
          {"v0", 1.0},
          {"base_point", point_json(kBase)},
          {"columns", json::array({"x", "v_quadrature", "v_closed_form", "relative_error"})},
          {"rows", rows},
          {"max_relative_error", worst},
          {"tol", tol},
          {"pass", ok}};
}

json template_block(const AuditConfig& config) {
  MetricSpec spec;
  try {
    spec = parse_metric_document(read_file(config.template_path));
  } catch (const ParseError& e) {
    throw ConfigError(config.template_path + ": " + e.what());
  }
  constructor::TypeITemplate tpl;
  try {
    tpl = constructor::template_from_spec(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(config.template_path + ": " + e.what());
  }
  const ParamMap params = spec.bind(config.overrides);
  const auto vs = constructor::solve_v(tpl, params, kBase, config.x_lo, config.x_hi, config.x_lo, 1.0, kGrid);
  json rows = json::array();
  for (const auto& s : vs) rows.push_back(json(std::vector<double>{s.x, s.v}));
  return {{"template", config.template_path},
          {"v_at_x_lo", 1.0},
          {"columns", json::array({"x", "v"})},
          {"rows", rows}};
}

}  // namespace

RunResult run_construct(const AuditConfig& config) {
  const double tol = config.tol > 0 ? config.tol : 1e-6;
  bool quad_ok = true;
  json report = json::object();
  report["engine"] = kEngineVersion;
  report["command"] = "construct";
  const std::string source = config.metric.empty() ? "time-periodic-tilde" : config.metric;
  const LoadedMetric m = resolve(source, config.overrides);
  const std::size_t n = config.samples ? config.samples : 10;
  report["config"] = {{"metric", source}, {"params", params_json(m.params)}, {"lambda", config.lambda},
                      {"samples", n}, {"seed", config.seed}, {"tol", tol},
                      {"x_interval", json::array({config.x_lo, config.x_hi})}};

  report["quadrature"] = quadrature_block(config, tol, quad_ok);
  if (!config.template_path.empty()) report["template"] = template_block(config);

  const auto points = sample_points(m, n, config.seed);
  const auto cascade = constructor::cascade_residual_report(m.spec, m.params, config.lambda, points, config.jobs);
  // Same normalization as verify: per point, the gap over 1 + the larger of
  // |G| and the curvature term scale.
  const auto term = parallel_map(
      points.size(),
      [&](std::size_t i) { return geometry::curvature_term_scale(geometry::christoffel_at(m.spec, m.params, points[i])); },
      config.jobs);
  double rel = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double scale = term[i], gap = 0.0;
    for (const auto& row : cascade.rows) {
      scale = std::max(scale, std::fabs(row.jet[i]));
      gap = std::max(gap, std::fabs(row.jet[i] - row.oracle[i]));
    }
    rel = std::max(rel, gap / (1.0 + scale));
  }
  json rows = json::array();
  for (const auto& row : cascade.rows) {
    double mj = 0.0, mo = 0.0;
    for (double v : row.jet) mj = std::max(mj, std::fabs(v));
    for (double v : row.oracle) mo = std::max(mo, std::fabs(v));
    rows.push_back({{"equation", row.label}, {"max_abs_jet", mj}, {"max_abs_oracle", mo},
                    {"jet", row.jet}, {"oracle", row.oracle}});
  }
  json points_j = json::array();
  for (const auto& p : points) points_j.push_back(point_json(p));
  json casc = {{"metric", source}, {"lambda", config.lambda}, {"points", points_j}, {"equations", rows},
               {"pipeline_agreement", {{"max_relative", rel}, {"tol", tol}, {"pass", rel <= tol}}}};

  // Closed-form G11 against the engine when the metric is Type I with known v.
  try {
    const auto tpl = constructor::template_from_spec(m.spec);
    if (tpl.v) {
      double worst = 0.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const double closed = constructor::g11_closed_form(tpl, m.params, points[i]);
        const double engine = cascade.rows.front().jet[i];
        worst = std::max(worst, std::fabs(closed - engine) / (1.0 + std::fabs(engine)));
      }
      casc["g11_closed_form"] = {{"max_relative_difference", worst}, {"tol", 1e-8}, {"pass", worst <= 1e-8}};
      quad_ok = quad_ok && worst <= 1e-8;
    }
  } catch (const std::invalid_argument&) {
    casc["g11_closed_form"] = {{"applicable", false}};
  }
  report["cascade"] = casc;

  const bool ok = quad_ok && rel <= tol;
  report["asserted"] = {{"pass", ok}};
  RunResult res;
  res.exit_code = ok ? kPass : kInvariantFailure;
  res.artifacts.push_back({config.out, dump_json(report)});
  res.message = ok ? "construct: all asserted checks pass" : "construct: asserted check failed";
  return res;
}

}  // namespace gva::harness
