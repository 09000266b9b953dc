#include "gravaudit/analysis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>

namespace gva::analysis {

using std::numbers::pi;

EigenResult symmetric_eigen(const Mat4& input) {
  Mat4 a = input;
  Mat4 v{};
  for (std::size_t i = 0; i < kDim; ++i) v[i][i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < kDim; ++i) {
      diag += a[i][i] * a[i][i];
      for (std::size_t j = i + 1; j < kDim; ++j) off += a[i][j] * a[i][j];
    }
    if (off <= 1e-34 * diag || off == 0.0) break;
    for (std::size_t p = 0; p < kDim; ++p) {
      for (std::size_t q = p + 1; q < kDim; ++q) {
        if (a[p][q] == 0.0) continue;
        // Rotation angle chosen so the (p, q) entry vanishes; the smaller
        // root keeps the rotation close to the identity.
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < kDim; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < kDim; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < kDim; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::array<std::size_t, kDim> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a[x][x] < a[y][y]; });
  EigenResult out;
  for (std::size_t i = 0; i < kDim; ++i) {
    out.values[i] = a[order[i]][order[i]];
    for (std::size_t k = 0; k < kDim; ++k) out.vectors[k][i] = v[k][order[i]];
  }
  return out;
}

const char* predicate_name(Predicate p) {
  switch (p) {
    case Predicate::Theorem1: return "theorem-1";
    case Predicate::Conclusion1: return "conclusion-1";
    case Predicate::Conclusion2: return "conclusion-2";
    case Predicate::Conclusion3: return "conclusion-3";
    case Predicate::EigenFallback: return "eigen-fallback";
  }
  return "?";
}

std::array<double, kDim> leading_minors(const Mat4& g) {
  std::array<double, kDim> out{};
  out[0] = g[0][0];
  out[1] = g[0][0] * g[1][1] - g[0][1] * g[1][0];
  out[2] = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
           g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
           g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
  out[3] = geometry::det4(g);
  return out;
}

SignatureReport signature_of(const Mat4& g, const std::array<bool, 10>& zero, double zero_tol) {
  SignatureReport rep;
  const EigenResult eig = symmetric_eigen(g);
  rep.eigenvalues = eig.values;
  double scale = 0.0;
  for (double l : eig.values) scale = std::max(scale, std::fabs(l));
  int plus = 0, minus = 0, zeros = 0;
  for (std::size_t i = 0; i < kDim; ++i) {
    const double l = eig.values[i];
    rep.signs[i] = std::fabs(l) <= zero_tol * scale ? 0 : (l > 0 ? 1 : -1);
    plus += rep.signs[i] > 0;
    minus += rep.signs[i] < 0;
    zeros += rep.signs[i] == 0;
  }
  if (zeros == 0) rep.lorentzian = plus == 1 && minus == 3;
  rep.leading_minors = leading_minors(g);

  auto z = [&](std::size_t i, std::size_t j) { return zero[sym_index(i, j)]; };
  const double u = g[0][0], v = g[0][1], p = g[0][2], q = g[0][3];
  const double w = g[1][1], rho = g[2][2], sigma = g[3][3];
  if (!(z(1, 2) && z(1, 3) && z(2, 3))) {
    rep.predicate = Predicate::EigenFallback;
  } else if (z(1, 1)) {
    rep.predicate = Predicate::Conclusion1;
    rep.predicate_holds = rho < 0 && sigma < 0 && v != 0;
  } else if (z(0, 0)) {
    rep.predicate = Predicate::Conclusion2;
    rep.predicate_holds = w < 0 && rho < 0 && sigma < 0 && v * v + p * p + q * q != 0;
  } else if (z(0, 3)) {
    rep.predicate = Predicate::Conclusion3;
    rep.predicate_holds = u > 0 && w < 0 && rho < 0 && sigma < 0;
  } else {
    rep.predicate = Predicate::Theorem1;
    rep.predicate_holds = rep.leading_minors[3] < 0 && rho < 0 && sigma < 0;
  }
  return rep;
}

SignatureReport signature_at(const MetricSpec& spec, const ParamMap& params, const Point4& point) {
  const Mat4 g = geometry::metric_values(spec, params, point);
  std::array<bool, 10> zero{};
  for (std::size_t i = 0; i < 10; ++i) zero[i] = !spec.slots[i].has_value();
  return signature_of(g, zero);
}

std::array<double, kDim> principal_minors(const MetricSpec& spec, const ParamMap& params,
                                          const Point4& point) {
  return leading_minors(geometry::metric_values(spec, params, point));
}

std::array<double, 3> polar_minor_closed_forms(const TimePeriodicParams& p, const Point4& x) {
  const auto f = catalog::helpers_at(p, x);
  const double r = x[1], s = std::sin(x[2]);
  const double a = (f.M * r) * (f.M * r) / ((r - p.m) * (r - p.m));
  const double k2 = f.K * f.K;
  return {-a, k2 * a, -k2 * k2 * s * s * a};
}

double det_closed_form(const TimePeriodicParams& p, const Point4& x) {
  const double t = x[0], r = x[1], th = x[2];
  if (r == p.m) throw DomainError("det closed form undefined at r = m");
  const double h = std::sqrt(std::tan(th / 2.0));
  const double op = h + 1.0 / h;
  const double s2 = std::sin(th) * std::sin(th);
  const double K = r + p.m * std::log(std::fabs(r - p.m)) + p.eps * std::sin(t - r);
  const double K2 = K * K;
  return -op * op * s2 * s2 * K2 * K2 * r * r / ((r - p.m) * (r - p.m));
}

std::vector<std::string> singular_set_classify(const TimePeriodicParams& p, const Point4& x, double tol) {
  auto out = catalog::singular_sets(p, x, tol);
  if (out.empty()) out.emplace_back("regular");
  return out;
}

const char* case_name(HorizonCase c) { return c == HorizonCase::I ? "I" : "II"; }
const char* arc_name(Arc a) { return a == Arc::Principal ? "principal" : "conjugate"; }

double horizon_gamma(const TimePeriodicParams& p, double r) {
  if (r == p.m) throw DomainError("horizon function undefined at r = m");
  return r + p.m * std::log(std::fabs(r - p.m));
}

double horizon_f(const TimePeriodicParams& p, double r, double t) {
  return horizon_gamma(p, r) + p.eps * std::sin(t - r);
}

double feasibility_ratio(const TimePeriodicParams& p) {
  if (p.eps == 0.0) throw std::invalid_argument("horizon slots need eps != 0");
  return p.m == 0.0 ? 0.0 : -p.m * std::log(p.m) / p.eps;
}

double branch_offset(const TimePeriodicParams& p, int k, HorizonCase c) {
  const int turns = (c == HorizonCase::I && p.m > 1.0) ? k + 1 : k;
  return 2.0 * pi * turns;
}

namespace {

// Root of a monotone function on [lo, hi] whose endpoint values differ in
// sign, refined until the bracket is adjacent doubles.
template <typename F>
double bisect_root(F f, double lo, double hi) {
  const double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw std::runtime_error("root not bracketed");
  boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits);
  const auto [a, b] = boost::math::tools::bisect(f, lo, hi, tol);
  return std::fabs(f(a)) <= std::fabs(f(b)) ? a : b;
}

void require_positive(const TimePeriodicParams& p) {
  if (!(p.eps > 0.0) || !(p.m > 0.0)) throw std::invalid_argument("horizon analysis needs eps > 0 and m > 0");
}

}  // namespace

HorizonExtent horizon_extent(const TimePeriodicParams& p, HorizonCase c) {
  require_positive(p);
  HorizonExtent ext;
  ext.which = c;
  auto gamma = [&](double r) { return horizon_gamma(p, r); };
  if (c == HorizonCase::I) {
    const double g0 = gamma(0.0);
    if (g0 < -p.eps) {
      throw InfeasibleError("case I band empty: gamma(0) = m ln m below -eps", feasibility_ratio(p));
    }
    // gamma decreases on [0, m) towards -inf.
    double delta = p.m / 2.0;
    while (gamma(p.m - delta) >= -p.eps) delta /= 2.0;
    const double hi = p.m - delta;
    ext.r_minus = bisect_root([&](double r) { return gamma(r) + p.eps; }, 0.0, hi);
    ext.r_start = g0 > p.eps ? bisect_root([&](double r) { return gamma(r) - p.eps; }, 0.0, ext.r_minus) : 0.0;
  } else {
    // gamma increases on (m, inf) from -inf.
    double delta = 1.0;
    while (gamma(p.m + delta) >= -p.eps) delta /= 2.0;
    double hi = p.m + 1.0;
    while (gamma(hi) <= p.eps) hi = p.m + 2.0 * (hi - p.m);
    ext.r0 = bisect_root([&](double r) { return gamma(r) + p.eps; }, p.m + delta, hi);
    ext.r_plus = bisect_root([&](double r) { return gamma(r) - p.eps; }, ext.r0, hi);
  }
  return ext;
}

double horizon_time_slots(const TimePeriodicParams& p, int k, HorizonCase c) {
  if (c == HorizonCase::I) {
    const double ratio = feasibility_ratio(p);
    if (std::fabs(ratio) > 1.0) {
      throw InfeasibleError("no horizon time slots at r = 0: |m ln m / eps| = " +
                                std::to_string(std::fabs(ratio)) + " exceeds 1",
                            ratio);
    }
    return branch_offset(p, k, c) + std::asin(ratio);
  }
  return horizon_extent(p, c).r0 + pi / 2.0 + branch_offset(p, k, c);
}

HorizonBranch trace_horizon_branch(const TimePeriodicParams& p, int k, HorizonCase c, Arc arc,
                                   std::size_t samples) {
  HorizonBranch br;
  br.k = k;
  br.which = c;
  br.arc = arc;
  br.extent = horizon_extent(p, c);
  const double lo = c == HorizonCase::I ? br.extent.r_start : br.extent.r0;
  const double hi = c == HorizonCase::I ? br.extent.r_minus : br.extent.r_plus;
  const double offset = branch_offset(p, k, c);
  auto t_of = [&](double r) {
    const double s = std::clamp(-horizon_gamma(p, r) / p.eps, -1.0, 1.0);
    const double a = std::asin(s);
    return arc == Arc::Principal ? r + a + offset : r + pi - a + offset;
  };
  samples = std::max<std::size_t>(samples, 2);
  for (std::size_t i = 0; i < samples; ++i) {
    const double r = i + 1 == samples ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double t = t_of(r);
    br.r.push_back(r);
    br.t.push_back(t);
    br.residual.push_back(horizon_f(p, r, t));
  }
  br.t_start = br.t.front();
  br.t_end = br.t.back();
  bool up = true, down = true;
  for (std::size_t i = 1; i < br.t.size(); ++i) {
    up = up && br.t[i] > br.t[i - 1];
    down = down && br.t[i] < br.t[i - 1];
  }
  br.monotone = up ? 1 : (down ? -1 : 0);
  return br;
}

std::array<double, kDim> congruence_diagonalize(const Mat4& input) {
  Mat4 a = input;
  std::array<double, kDim> d{};
  for (std::size_t k = 0; k < kDim; ++k) {
    const double pivot = a[k][k];
    double scale = 0.0;
    for (const auto& row : input) {
      for (double x : row) scale = std::max(scale, std::fabs(x));
    }
    if (std::fabs(pivot) <= 1e-14 * scale) {
      throw PivotError("vanishing pivot at index " + std::to_string(k));
    }
    d[k] = pivot;
    for (std::size_t i = k + 1; i < kDim; ++i) {
      const double f = a[i][k] / pivot;
      for (std::size_t j = k + 1; j < kDim; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return d;
}

DiagonalForm congruence_diagonal(const TimePeriodicParams& p, const Point4& x) {
  const auto f = catalog::helpers_at(p, x);
  const MetricSpec spec = catalog::time_periodic_polar(p);
  DiagonalForm out;
  out.entries = congruence_diagonalize(geometry::metric_values(spec, p.as_map(), x));
  const double r = x[1], s = std::sin(x[2]);
  out.closed_form = {f.G, -f.M * f.M * r * r / (f.G * (r - p.m) * (r - p.m)), -f.K * f.K,
                     -f.K * f.K * s * s};
  return out;
}

AsymptoticAudit asymptotic_audit(const TimePeriodicParams& p, double theta, double t,
                                 const std::vector<double>& radii) {
  AsymptoticAudit out;
  for (double r : radii) {
    const Point4 x{t, r, theta, 0.0};
    const auto f = catalog::helpers_at(p, x);
    const auto d = congruence_diagonal(p, x);
    const double s = std::sin(theta);
    AsymptoticRow row;
    row.r = r;
    row.k_over_r = f.K / r;
    row.k_over_r_predicted = 1.0 + (p.m * std::log(std::fabs(r - p.m)) + p.eps * std::sin(t - r)) / r;
    row.entry0 = d.entries[0];
    row.entry1 = d.entries[1];
    row.entry2_ratio = d.entries[2] / (-r * r);
    row.entry3_ratio = d.entries[3] / (-r * r * s * s);
    row.entry1_limit = -f.M * f.M / f.G;
    out.rows.push_back(row);
  }
  if (!radii.empty()) {
    const double r = radii.back();
    const auto a = congruence_diagonal(p, {t, r, pi / 3.0, 0.0});
    const auto b = congruence_diagonal(p, {t, r, pi / 2.0, 0.0});
    out.entry0_pi3_pi2 = {a.entries[0], b.entries[0]};
    out.entry1_pi3_pi2 = {a.entries[1], b.entries[1]};
  }
  return out;
}

}  // namespace gva::analysis
