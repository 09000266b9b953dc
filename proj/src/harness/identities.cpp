#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "gravaudit/geometry/parallel.hpp"

namespace gva::harness {

using namespace detail;

RunResult run_identities(const AuditConfig& config) {
  const std::string source = config.metric.empty() ? "time-periodic" : config.metric;
  const LoadedMetric m = resolve(source, config.overrides);
  if (m.kind != MetricKind::Polar) {
    throw ConfigError("identities apply to the polar time-periodic metric, not '" + source + "'");
  }
  const auto tp = catalog::TimePeriodicParams::from_map(m.params);
  const std::size_t n = config.samples ? config.samples : 1000;
  const double tol = config.tol > 0 ? config.tol : 1e-10;

  const auto points = catalog::sample_polar(tp, n, config.seed);
  const auto per_point = parallel_map(
      points.size(), [&](std::size_t i) { return catalog::property1_residuals(tp, points[i], config.q_scale); },
      config.jobs);

  json failures = json::array();
  json ids = json::array();
  const std::size_t count = per_point.empty() ? 0 : per_point.front().size();
  std::size_t passed = 0;
  for (std::size_t k = 0; k < count; ++k) {
    double worst = 0.0;
    std::size_t where = 0;
    for (std::size_t i = 0; i < per_point.size(); ++i) {
      const double r = std::fabs(per_point[i][k].residual);
      if (!(r <= worst)) {
        worst = r;
        where = i;
      }
    }
    const bool ok = worst <= tol;
    passed += ok;
    const std::string& name = per_point.front()[k].name;
    ids.push_back({{"identity", name}, {"max_abs_residual", worst}, {"worst_point", point_json(points[where])},
                   {"pass", ok}});
    if (!ok) failures.push_back("identity: " + name);
  }

  const double g_min = catalog::g00_bound_check(tp, n, config.seed);
  const double bound = 1.0 - 8.0 * std::fabs(tp.eps);
  const bool g_ok = g_min >= bound - 1e-12;
  if (!g_ok) failures.push_back("g00 lower bound");

  double period = 0.0;
  for (const auto& p : points) period = std::max(period, catalog::periodicity_check(tp, p));
  const bool p_ok = period <= 1e-12;
  if (!p_ok) failures.push_back("time periodicity");

  json report = json::object();
  report["engine"] = kEngineVersion;
  report["command"] = "identities";
  report["config"] = {{"metric", source}, {"params", params_json(m.params)}, {"samples", n},
                      {"seed", config.seed}, {"tol", tol}, {"q_scale", config.q_scale}};
  report["identities"] = ids;
  report["identities_passed"] = std::to_string(passed) + "/" + std::to_string(count);
  report["g00_bound"] = {{"min_g00", g_min}, {"bound", bound}, {"pass", g_ok}};
  report["periodicity"] = {{"shift", 2.0 * std::numbers::pi}, {"max_abs_discrepancy", period}, {"pass", p_ok}};
  report["asserted"] = {{"pass", failures.empty()}, {"failures", failures}};

  RunResult res;
  res.exit_code = failures.empty() ? kPass : kInvariantFailure;
  res.artifacts.push_back({config.out, dump_json(report)});
  res.message = "identities: " + std::to_string(passed) + "/" + std::to_string(count) + " pass";
  for (const auto& f : failures) res.message += "\n  FAILED " + f.get<std::string>();
  return res;
}

}  // namespace gva::harness
