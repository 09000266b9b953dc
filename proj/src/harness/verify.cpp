#include <algorithm>
#include <cmath>
#include <numbers>

#include "common.hpp"
#include "gravaudit/geometry/parallel.hpp"

namespace gva::harness {

using namespace detail;
using geometry::CurvatureBundle;
using geometry::Mat4;

namespace {

constexpr double kCalibrationFlat = 1e-12;
constexpr double kCalibrationRicci = 1e-9;
constexpr double kCalibrationKretschmann = 1e-8;
constexpr double kSymmetryTol = 1e-9;
constexpr double kRecomputeTol = 1e-12;
constexpr double kConvergenceLo = 3.5, kConvergenceHi = 4.5;

double max_abs(const Mat4& m) {
  double w = 0.0;
  for (const auto& row : m) {
    for (double v : row) w = std::max(w, std::fabs(v));
  }
  return w;
}

double max_riemann(const CurvatureBundle& b) {
  double w = 0.0;
  for (double v : b.riemann_low) w = std::max(w, std::fabs(v));
  return w;
}

struct Failures {
  json list = json::array();
  void check(bool ok, const std::string& what) {
    if (!ok) list.push_back(what);
  }
};

json calibration(Failures& fail) {
  json out = json::object();
  const MetricSpec mink = catalog::minkowski();
  double flat = 0.0;
  for (const Point4& p : {Point4{0, 0, 0, 0}, Point4{1.5, -2, 3, 0.25}}) {
    const auto b = geometry::curvature_at(mink, {}, p);
    flat = std::max({flat, b.max_abs(), std::fabs(b.kretschmann)});
  }
  out["minkowski"] = {{"max_abs_curvature", flat}, {"tol", kCalibrationFlat}, {"pass", flat <= kCalibrationFlat}};
  fail.check(flat <= kCalibrationFlat, "calibration: minkowski curvature");

  const MetricSpec schw = catalog::schwarzschild(1.0);
  const ParamMap params = schw.defaults();
  json rows = json::array();
  for (double r : {3.0, 5.0, 10.0}) {
    const auto b = geometry::curvature_at(schw, params, {0.0, r, std::numbers::pi / 2, 0.0});
    const double expected = 48.0 / std::pow(r, 6);
    const double rel = std::fabs(b.kretschmann - expected) / expected;
    const double ricci = max_abs(b.ricci);
    const bool ok = ricci <= kCalibrationRicci && rel <= kCalibrationKretschmann;
    rows.push_back({{"r", r}, {"max_abs_ricci", ricci}, {"kretschmann", b.kretschmann},
                    {"expected", expected}, {"relative_error", rel}, {"pass", ok}});
    fail.check(ok, "calibration: schwarzschild r=" + format_number(r));
  }
  out["schwarzschild"] = {{"mu", 1.0}, {"points", rows}};
  return out;
}

struct PointAudit {
  CurvatureBundle jet, oracle;
  double discrepancy = 0;
  double gamma_sq = 0;
  double residual_jet = 0, residual_oracle = 0;
  double symmetry = 0;
  double recompute = 0;
};

PointAudit audit_point(const LoadedMetric& m, const Point4& p, double lambda) {
  PointAudit a;
  const auto mv = geometry::metric_at(m.spec, m.params, p);
  const auto conn = geometry::christoffel_at(m.spec, m.params, p);
  a.jet = geometry::assemble_curvature(mv.g, mv.g_inv, conn);
  a.oracle = geometry::fd_curvature_oracle(m.spec, m.params, p);
  a.discrepancy = geometry::bundle_discrepancy(a.jet, a.oracle, geometry::curvature_term_scale(conn));
  a.gamma_sq = conn.max_abs_gamma() * conn.max_abs_gamma();
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = 0; j < kDim; ++j) {
      a.residual_jet = std::max(a.residual_jet, std::fabs(a.jet.einstein[i][j] + lambda * mv.g[i][j]));
      a.residual_oracle = std::max(a.residual_oracle, std::fabs(a.oracle.einstein[i][j] + lambda * mv.g[i][j]));
      const double g = a.jet.ricci[i][j] - 0.5 * mv.g[i][j] * a.jet.scalar;
      a.recompute = std::max(a.recompute, std::fabs(g - a.jet.einstein[i][j]));
    }
  }
  const auto s = geometry::riemann_symmetry_residuals(a.jet);
  a.symmetry = std::max({s.antisym_first, s.antisym_second, s.pair_exchange, s.first_bianchi});
  return a;
}

struct PipelineStats {
  double residual_max = 0, residual_sum = 0;
  double riemann = 0, ricci = 0, kretschmann = 0;
};

json stats_json(const PipelineStats& s, std::size_t n) {
  return {{"max_abs_field_residual", s.residual_max},
          {"mean_abs_field_residual", n ? s.residual_sum / static_cast<double>(n) : 0.0},
          {"max_abs_riemann", s.riemann},
          {"max_abs_ricci", s.ricci},
          {"max_abs_kretschmann", s.kretschmann}};
}

json verdict(double jet, double oracle, double scale, double tol) {
  const auto v = [&](double x) { return x <= tol * scale ? "AGREES_WITH_CLAIM" : "DISAGREES"; };
  return {{"jet_max", jet}, {"oracle_max", oracle}, {"scale", scale}, {"verdict", v(jet)},
          {"pipelines_agree_on_verdict", std::string(v(jet)) == v(oracle)}};
}

json pullback_block(const LoadedMetric& m, std::uint64_t seed) {
  const auto tp = catalog::TimePeriodicParams::from_map(m.params);
  if (!(tp.m > 0.0)) return {{"verdict", "NOT_APPLICABLE"}, {"reason", "transformation needs m > 0"}};
  const auto pts = catalog::sample_tilde(tp, 20, seed);
  Mat4 worst{};
  double scale = 0.0;
  std::size_t used = 0;
  json first;
  for (const auto& p : pts) {
    Mat4 d;
    try {
      d = catalog::pullback_audit(tp, p);
      scale = std::max(scale, max_abs(geometry::metric_values(catalog::time_periodic_tilde(tp), m.params, p)));
    } catch (const DomainError&) {
      continue;
    }
    if (used++ == 0) first = {{"tilde_point", point_json(p)}, {"discrepancy", matrix_json(d)}};
    for (std::size_t i = 0; i < kDim; ++i) {
      for (std::size_t j = 0; j < kDim; ++j) worst[i][j] = std::max(worst[i][j], std::fabs(d[i][j]));
    }
  }
  const double top = max_abs(worst);
  const bool agrees = used > 0 && top <= 1e-9 * (1.0 + scale);
  return {{"points", used},
          {"max_abs_discrepancy", matrix_json(worst)},
          {"example", first},
          {"verdict", used == 0 ? "NOT_APPLICABLE" : (agrees ? "AGREES_WITH_CLAIM" : "DISAGREES")}};
}

}  // namespace

RunResult run_verify(const AuditConfig& config) {
  const std::string source = config.metric.empty() ? "time-periodic" : config.metric;
  const LoadedMetric m = resolve(source, config.overrides);
  const std::size_t n = config.samples ? config.samples : 100;
  const double tol = config.tol > 0 ? config.tol : 1e-6;

  Failures fail;
  json report = json::object();
  report["engine"] = kEngineVersion;
  report["command"] = "verify";
  report["config"] = {{"metric", source}, {"params", params_json(m.params)}, {"lambda", config.lambda},
                      {"samples", n}, {"seed", config.seed}, {"tol", tol}};
  report["calibration"] = calibration(fail);

  const auto points = sample_points(m, n, config.seed);
  const auto audits = parallel_map(
      points.size(), [&](std::size_t i) { return audit_point(m, points[i], config.lambda); }, config.jobs);

  PipelineStats js, os;
  double disc = 0, sym = 0, rec = 0, gamma_sq = 0;
  for (const auto& a : audits) {
    disc = std::max(disc, a.discrepancy);
    sym = std::max(sym, a.symmetry);
    rec = std::max(rec, a.recompute);
    gamma_sq = std::max(gamma_sq, a.gamma_sq);
    for (auto [s, b, res] : {std::tuple{&js, &a.jet, a.residual_jet}, std::tuple{&os, &a.oracle, a.residual_oracle}}) {
      s->residual_max = std::max(s->residual_max, res);
      s->residual_sum += res;
      s->riemann = std::max(s->riemann, max_riemann(*b));
      s->ricci = std::max(s->ricci, max_abs(b->ricci));
      s->kretschmann = std::max(s->kretschmann, std::fabs(b->kretschmann));
    }
  }

  // Convergence order of the plain central-difference oracle, measured at the
  // first points whose truncation error is resolvable.
  json ratios = json::array();
  std::vector<double> measured;
  for (std::size_t i = 0; i < points.size() && measured.size() < 5; ++i) {
    const auto exact = audits[i].jet;
    const auto coarse = geometry::fd_curvature_oracle(m.spec, m.params, points[i], {1e-3, false});
    double err = 0;
    for (std::size_t k = 0; k < 256; ++k) err = std::max(err, std::fabs(coarse.riemann_low[k] - exact.riemann_low[k]));
    if (err < 1e-8 * (1.0 + max_riemann(exact))) continue;
    const double ratio = geometry::fd_convergence_ratio(m.spec, m.params, points[i], 1e-3);
    measured.push_back(ratio);
    ratios.push_back(ratio);
  }
  json conv = {{"step", 1e-3}, {"ratios", ratios}};
  if (measured.empty()) {
    conv["median"] = nullptr;
    conv["pass"] = true;
    conv["note"] = "finite differences exact to rounding; order not measurable";
  } else {
    std::sort(measured.begin(), measured.end());
    const double med = measured[measured.size() / 2];
    const bool ok = med >= kConvergenceLo && med <= kConvergenceHi;
    conv["median"] = med;
    conv["pass"] = ok;
    fail.check(ok, "oracle convergence order");
  }

  json target = json::object();
  target["points"] = points.size();
  target["oracle_agreement"] = {{"max_relative", disc}, {"tol", tol}, {"pass", disc <= tol}};
  fail.check(disc <= tol, "jet vs oracle agreement");
  target["oracle_convergence"] = conv;
  target["riemann_symmetries"] = {{"max_normalized", sym}, {"tol", kSymmetryTol}, {"pass", sym <= kSymmetryTol}};
  fail.check(sym <= kSymmetryTol, "riemann symmetries");
  target["einstein_recompute"] = {{"max_abs", rec}, {"tol", kRecomputeTol}, {"pass", rec <= kRecomputeTol}};
  fail.check(rec <= kRecomputeTol, "einstein recompute");
  target["statistics"] = {{"jet", stats_json(js, points.size())}, {"oracle", stats_json(os, points.size())}};

  const double scale = 1.0 + gamma_sq;
  json claims = json::object();
  const bool claimed = m.kind == MetricKind::Polar || m.kind == MetricKind::Tilde || m.kind == MetricKind::Minkowski;
  if (claimed) {
    claims["vacuum_field_equations"] = verdict(js.residual_max, os.residual_max, scale, tol);
    claims["vanishing_riemann"] = verdict(js.riemann, os.riemann, scale, tol);
    claims["vanishing_ricci"] = verdict(js.ricci, os.ricci, scale, tol);
    claims["vanishing_kretschmann"] = verdict(js.kretschmann, os.kretschmann, scale * scale, tol);
  } else {
    for (const char* k : {"vacuum_field_equations", "vanishing_riemann", "vanishing_ricci", "vanishing_kretschmann"}) {
      claims[k] = {{"verdict", "NOT_APPLICABLE"}};
    }
  }
  claims["pullback"] = (m.kind == MetricKind::Polar || m.kind == MetricKind::Tilde)
                           ? pullback_block(m, config.seed)
                           : json{{"verdict", "NOT_APPLICABLE"}};
  target["claims"] = claims;
  report["target"] = target;
  report["asserted"] = {{"pass", fail.list.empty()}, {"failures", fail.list}};

  RunResult res;
  res.exit_code = fail.list.empty() ? kPass : kInvariantFailure;
  res.artifacts.push_back({config.out, dump_json(report)});
  res.message = fail.list.empty() ? "verify: all asserted invariants pass"
                                  : "verify: " + std::to_string(fail.list.size()) + " asserted invariant(s) failed";
  return res;
}

}  // namespace gva::harness
