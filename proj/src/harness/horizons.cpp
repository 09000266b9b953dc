#include <algorithm>
#include <cmath>
#include <cstdio>

#include "common.hpp"
#include "gravaudit/analysis/analysis.hpp"
#include "gravaudit/geometry/parallel.hpp"

namespace gva::harness {

using namespace detail;
using analysis::Arc;
using analysis::HorizonBranch;
using analysis::HorizonCase;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct CasePlan {
  HorizonCase which;
  bool feasible = true;
  std::string notice;
  analysis::HorizonExtent extent;
  std::vector<HorizonBranch> branches;
};

std::string svg_for(const CasePlan& plan, const catalog::TimePeriodicParams& tp) {
  constexpr double W = 640, H = 480, L = 70, R = 20, T = 30, B = 50;
  std::vector<double> marks;
  if (plan.which == HorizonCase::I) {
    if (plan.extent.r_start > 0) marks.push_back(plan.extent.r_start);
    marks.push_back(plan.extent.r_minus);
  } else {
    marks.push_back(plan.extent.r0);
    marks.push_back(plan.extent.r_plus);
  }
  marks.push_back(tp.m);
  double r0 = *std::min_element(marks.begin(), marks.end());
  double r1 = *std::max_element(marks.begin(), marks.end());
  double t0 = INFINITY, t1 = -INFINITY;
  for (const auto& b : plan.branches) {
    for (double t : b.t) {
      t0 = std::min(t0, t);
      t1 = std::max(t1, t);
    }
  }
  if (!std::isfinite(t0)) t0 = 0, t1 = 1;
  const double rp = 0.05 * (r1 - r0 + 1e-9), tpad = 0.05 * (t1 - t0 + 1e-9);
  r0 -= rp, r1 += rp, t0 -= tpad, t1 += tpad;
  auto X = [&](double r) { return L + (r - r0) / (r1 - r0) * (W - L - R); };
  auto Y = [&](double t) { return H - B - (t - t0) / (t1 - t0) * (H - T - B); };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  s += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  s += "<text x=\"320\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">horizon candidates, case " +
       std::string(analysis::case_name(plan.which)) + " (m=" + fmt("%g", tp.m) + ", eps=" + fmt("%g", tp.eps) +
       ")</text>\n";
  s += "<line x1=\"" + fmt("%.2f", L) + "\" y1=\"" + fmt("%.2f", H - B) + "\" x2=\"" + fmt("%.2f", W - R) +
       "\" y2=\"" + fmt("%.2f", H - B) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt("%.2f", L) + "\" y1=\"" + fmt("%.2f", T) + "\" x2=\"" + fmt("%.2f", L) + "\" y2=\"" +
       fmt("%.2f", H - B) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double r = r0 + (r1 - r0) * i / 4.0, t = t0 + (t1 - t0) * i / 4.0;
    s += "<text x=\"" + fmt("%.2f", X(r)) + "\" y=\"" + fmt("%.2f", H - B + 16) +
         "\" text-anchor=\"middle\" font-size=\"10\">" + fmt("%.4g", r) + "</text>\n";
    s += "<text x=\"" + fmt("%.2f", L - 6) + "\" y=\"" + fmt("%.2f", Y(t) + 3) +
         "\" text-anchor=\"end\" font-size=\"10\">" + fmt("%.4g", t) + "</text>\n";
  }
  s += "<text x=\"" + fmt("%.2f", (L + W - R) / 2) + "\" y=\"" + fmt("%.2f", H - 12) +
       "\" text-anchor=\"middle\" font-size=\"12\">r</text>\n";
  s += "<text x=\"16\" y=\"" + fmt("%.2f", (T + H - B) / 2) + "\" font-size=\"12\">t</text>\n";
  for (double r : marks) {
    s += "<line x1=\"" + fmt("%.2f", X(r)) + "\" y1=\"" + fmt("%.2f", T) + "\" x2=\"" + fmt("%.2f", X(r)) +
         "\" y2=\"" + fmt("%.2f", H - B) + "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (const auto& b : plan.branches) {
    const char* color = b.arc == Arc::Principal ? "#1f4e9c" : "#b5382c";
    s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < b.r.size(); ++i) {
      if (i) s += ' ';
      s += fmt("%.2f", X(b.r[i])) + "," + fmt("%.2f", Y(b.t[i]));
    }
    s += "\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

HorizonCase parse_case(const std::string& c) {
  if (c == "I") return HorizonCase::I;
  if (c == "II") return HorizonCase::II;
  throw ConfigError("unknown horizon case '" + c + "' (expected I or II)");
}

Arc parse_arc(const std::string& a) {
  if (a == "principal") return Arc::Principal;
  if (a == "conjugate") return Arc::Conjugate;
  throw ConfigError("unknown arc '" + a + "' (expected principal or conjugate)");
}

}  // namespace

RunResult run_horizons(const AuditConfig& config) {
  const std::string source = config.metric.empty() ? "time-periodic" : config.metric;
  const LoadedMetric m = resolve(source, config.overrides);
  if (m.kind != MetricKind::Polar) throw ConfigError("horizons apply to the polar time-periodic metric");
  const auto tp = catalog::TimePeriodicParams::from_map(m.params);
  if (!(tp.eps > 0.0) || !(tp.m > 0.0)) throw ConfigError("horizons need eps > 0 and m > 0");
  const std::string format = config.format.empty() ? "csv" : config.format;
  if (format != "csv" && format != "svg") throw ConfigError("horizons support --format csv or svg");
  if (format == "svg" && config.out.empty()) throw ConfigError("--format svg needs --out");
  const std::size_t samples = config.samples ? config.samples : 200;

  std::vector<HorizonCase> cases;
  for (const auto& c : config.cases) cases.push_back(parse_case(c));
  std::sort(cases.begin(), cases.end());
  cases.erase(std::unique(cases.begin(), cases.end()), cases.end());
  std::vector<Arc> arcs;
  for (const auto& a : config.arcs) arcs.push_back(parse_arc(a));
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  std::vector<CasePlan> plans;
  for (HorizonCase c : cases) {
    CasePlan plan;
    plan.which = c;
    try {
      if (c == HorizonCase::I) (void)analysis::horizon_time_slots(tp, 0, c);
      plan.extent = analysis::horizon_extent(tp, c);
    } catch (const analysis::InfeasibleError& e) {
      plan.feasible = false;
      plan.notice = std::string("case ") + analysis::case_name(c) + " infeasible: " + e.what() +
                    " (ratio " + format_number(e.ratio()) + ")";
    }
    if (plan.feasible) {
      struct Job {
        int k;
        Arc arc;
      };
      std::vector<Job> jobs;
      for (int k = config.kmin; k <= config.kmax; ++k) {
        for (Arc a : arcs) jobs.push_back({k, a});
      }
      plan.branches = parallel_map(
          jobs.size(),
          [&](std::size_t i) { return analysis::trace_horizon_branch(tp, jobs[i].k, c, jobs[i].arc, samples); },
          config.jobs);
    }
    plans.push_back(std::move(plan));
  }

  RunResult res;
  if (format == "csv") {
    std::string csv = "# gravaudit horizons m=" + format_number(tp.m) + " eps=" + format_number(tp.eps) + "\n";
    for (const auto& p : plans) {
      if (!p.feasible) {
        csv += "# notice: " + p.notice + "\n";
      } else if (p.which == HorizonCase::I) {
        csv += "# case I band r in [" + format_number(p.extent.r_start) + ", " + format_number(p.extent.r_minus) + "]\n";
      } else {
        csv += "# case II band r in [" + format_number(p.extent.r0) + ", " + format_number(p.extent.r_plus) + "]\n";
      }
    }
    csv += "case,k,arc,r,t,f_residual\n";
    for (const auto& p : plans) {
      for (const auto& b : p.branches) {
        for (std::size_t i = 0; i < b.r.size(); ++i) {
          csv += std::string(analysis::case_name(b.which)) + "," + std::to_string(b.k) + "," +
                 analysis::arc_name(b.arc) + "," + format_number(b.r[i]) + "," + format_number(b.t[i]) + "," +
                 format_number(b.residual[i]) + "\n";
        }
      }
    }
    res.artifacts.push_back({config.out, csv});
  } else {
    std::string stem = config.out;
    if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".svg") stem.resize(stem.size() - 4);
    for (const auto& p : plans) {
      if (!p.feasible) continue;
      res.artifacts.push_back({stem + "-case-" + analysis::case_name(p.which) + ".svg", svg_for(p, tp)});
    }
  }

  double worst = 0.0;
  for (const auto& p : plans) {
    for (const auto& b : p.branches) {
      for (double f : b.residual) worst = std::max(worst, std::fabs(f));
    }
  }
  const bool ok = worst <= 1e-12;
  res.exit_code = ok ? kPass : kInvariantFailure;
  res.message = "horizons: max |f| on traced samples " + format_number(worst);
  for (const auto& p : plans) {
    if (!p.feasible) res.message += "\n  " + p.notice;
  }
  return res;
}

}  // namespace gva::harness
