#include "gravaudit/catalog/catalog.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gva::catalog {

using std::numbers::pi;

namespace {

std::string real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Shared building blocks of both time-periodic charts.
std::string omega(const std::string& theta, char sign) {
  const std::string tan_half = "tan(" + theta + "/2)";
  return "(" + tan_half + "^(1/2) " + sign + " " + tan_half + "^(-1/2))";
}

std::string header(const std::string& chart, const TimePeriodicParams& p, const std::string& theta) {
  return "chart " + chart + "\nparam eps = " + real(p.eps) + "\nparam m = " + real(p.m) + "\nrange " +
         theta + " (0, pi)\n";
}

}  // namespace

TimePeriodicParams TimePeriodicParams::from_map(const ParamMap& p) {
  TimePeriodicParams out;
  if (auto it = p.find("eps"); it != p.end()) out.eps = it->second;
  if (auto it = p.find("m"); it != p.end()) out.m = it->second;
  return out;
}

std::vector<std::string> singular_sets(const TimePeriodicParams& p, const Point4& x, double tol) {
  std::vector<std::string> out;
  const double t = x[0], r = x[1], th = x[2];
  if (std::fabs(r) <= tol) out.emplace_back("S_{r=0}");
  const bool at_m = std::fabs(r - p.m) <= tol;
  if (at_m) out.emplace_back("S_{r=m}");
  if (!at_m) {
    const double K = r + p.m * std::log(std::fabs(r - p.m)) + p.eps * std::sin(t - r);
    if (std::fabs(K) <= tol) out.emplace_back("S_{K=0}");
  }
  if (std::min(th, pi - th) <= tol) out.emplace_back("S_{theta=0,pi}");
  return out;
}

MetricSpec time_periodic_polar(const TimePeriodicParams& p) {
  const std::string op = omega("theta", '+');
  const std::string om = omega("theta", '-');
  const std::string G = "(1 + 2*eps*" + op + "*sin(theta)*cos(t - r))";
  const std::string K = "(r + m*ln(abs(r - m)) + eps*sin(t - r))";
  const std::string M = "(" + op + "*sin(theta))";
  const std::string Q = "(-0.5*(1 + 2*sin(theta))*" + om + ")";
  std::string doc = header("t r theta phi", p, "theta");
  doc += "g 0 0 = " + G + "\n";
  doc += "g 0 1 = -" + G + " + " + M + "*r/(r - m)\n";
  doc += "g 0 2 = " + Q + "*" + K + "\n";
  doc += "g 1 1 = " + G + " - 2*" + M + "*r/(r - m)\n";
  doc += "g 1 2 = -" + Q + "*" + K + "\n";
  doc += "g 2 2 = -" + K + "^2\n";
  doc += "g 3 3 = -" + K + "^2*sin(theta)^2\n";
  MetricSpec spec = parse_metric_document(doc);
  spec.singular_sets = [](const Point4& x, const ParamMap& params) {
    return singular_sets(TimePeriodicParams::from_map(params), x);
  };
  return spec;
}

MetricSpec time_periodic_tilde(const TimePeriodicParams& p) {
  if (p.m == 0.0) throw std::invalid_argument("tilde chart requires m != 0");
  const std::string op = omega("tht", '+');
  const std::string om = omega("tht", '-');
  const std::string W = "(exp((rt + tau)/m) + m)";
  const std::string K = "(rt + tau + eps*sin(tau))";
  std::string doc = header("tau rt tht pht", p, "tht");
  doc += "g 0 0 = 1 + 2*eps*" + op + "*sin(tht)*cos(tau) + 2*" + op + "*sin(tht)/m*" + W + "\n";
  doc += "g 0 1 = " + op + "*sin(tht)/m*" + W + "\n";
  doc += "g 0 2 = 0.5*(1 + 2*sin(tht))*" + om + "*" + K + "\n";
  doc += "g 2 2 = -" + K + "^2\n";
  doc += "g 3 3 = -" + K + "^2*sin(tht)^2\n";
  MetricSpec spec = parse_metric_document(doc);
  spec.singular_sets = [](const Point4& x, const ParamMap& params) {
    const auto tp = TimePeriodicParams::from_map(params);
    std::vector<std::string> out;
    if (std::fabs(x[1] + x[0] + tp.eps * std::sin(x[0])) <= 1e-9) out.emplace_back("S_{K=0}");
    if (std::min(x[2], pi - x[2]) <= 1e-9) out.emplace_back("S_{theta=0,pi}");
    return out;
  };
  return spec;
}

MetricSpec minkowski() {
  return parse_metric_document("chart t x y z\ng 0 0 = 1\ng 1 1 = -1\ng 2 2 = -1\ng 3 3 = -1\n");
}

MetricSpec schwarzschild(double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("schwarzschild requires mu > 0");
  const std::string doc = "chart t r theta phi\nparam mu = " + real(mu) +
                          "\nrange r (2*mu, inf)\nrange theta (0, pi)\n"
                          "g 0 0 = 1 - 2*mu/r\n"
                          "g 1 1 = -1/(1 - 2*mu/r)\n"
                          "g 2 2 = -r^2\n"
                          "g 3 3 = -r^2*sin(theta)^2\n";
  return parse_metric_document(doc);
}

std::vector<std::string> names() {
  return {"time-periodic", "time-periodic-tilde", "minkowski", "schwarzschild"};
}

MetricSpec by_name(std::string_view name, const ParamMap& overrides) {
  MetricSpec base;
  if (name == "time-periodic" || name == "time-periodic-tilde") {
    base = name == "time-periodic" ? time_periodic_polar({}) : time_periodic_tilde({});
    const ParamMap bound = base.bind(overrides);
    const auto tp = TimePeriodicParams::from_map(bound);
    return name == "time-periodic" ? time_periodic_polar(tp) : time_periodic_tilde(tp);
  }
  if (name == "minkowski") {
    base = minkowski();
    (void)base.bind(overrides);
    return base;
  }
  if (name == "schwarzschild") {
    base = schwarzschild(1.0);
    return schwarzschild(base.bind(overrides).at("mu"));
  }
  throw std::invalid_argument("unknown catalog metric '" + std::string(name) + "'");
}

TimePeriodicForms helpers_at(const TimePeriodicParams& p, const Point4& x) {
  const double t = x[0], r = x[1], th = x[2];
  if (!(th > 0.0 && th < pi)) throw DomainError("theta outside (0, pi)");
  if (r == p.m) throw DomainError("r = m");
  TimePeriodicForms f;
  const double s = std::sqrt(std::tan(th / 2.0));
  f.omega_plus = s + 1.0 / s;
  f.omega_minus = s - 1.0 / s;
  f.M = f.omega_plus * std::sin(th);
  f.G = 1.0 + 2.0 * p.eps * f.M * std::cos(t - r);
  f.K = r + p.m * std::log(std::fabs(r - p.m)) + p.eps * std::sin(t - r);
  f.Q = -0.5 * (1.0 + 2.0 * std::sin(th)) * f.omega_minus;
  f.omega_tilde = p.m != 0.0 ? std::exp(t / p.m) + p.m : std::nan("");
  return f;
}

std::vector<IdentityResidual> property1_residuals(const TimePeriodicParams& p, const Point4& x,
                                                  double q_scale) {
  // Jets of the helper expressions over the polar chart.
  static const std::array<std::string, kDim> coords{"t", "r", "theta", "phi"};
  static const std::vector<std::string> pnames{"eps", "m"};
  static const Expr eOp = parse_expression(omega("theta", '+'), coords, pnames);
  static const Expr eOm = parse_expression(omega("theta", '-'), coords, pnames);
  static const Expr eG =
      parse_expression("1 + 2*eps*" + omega("theta", '+') + "*sin(theta)*cos(t - r)", coords, pnames);
  static const Expr eK = parse_expression("r + m*ln(abs(r - m)) + eps*sin(t - r)", coords, pnames);
  static const Expr eM = parse_expression(omega("theta", '+') + "*sin(theta)", coords, pnames);
  static const Expr eQ =
      parse_expression("-0.5*(1 + 2*sin(theta))*" + omega("theta", '-'), coords, pnames);

  const ParamMap params = p.as_map();
  const Jet2 Op = eval_jet2(eOp, x, params);
  const Jet2 Om = eval_jet2(eOm, x, params);
  const Jet2 G = eval_jet2(eG, x, params);
  const Jet2 K = eval_jet2(eK, x, params);
  const Jet2 M = eval_jet2(eM, x, params);
  Jet2 Q = eval_jet2(eQ, x, params);
  Q *= q_scale;

  constexpr std::size_t T = 0, R = 1, TH = 2;
  const double r = x[1], th = x[2];
  const double s = std::sin(th), c = std::cos(th);
  const double op = Op.value, q = Q.value, mv = M.value;

  std::vector<IdentityResidual> out;
  auto add = [&](const char* name, double v) { out.push_back({name, v}); };
  add("dK/dt = (G-1)/(2M)", K.d(T) - (G.value - 1.0) / (2.0 * mv));
  add("d2K/dt2 = (dG/dt)/(2M)", K.dd(T, T) - G.d(T) / (2.0 * mv));
  add("dOmega+/dtheta = Omega-/(2 sin theta)", Op.d(TH) - Om.value / (2.0 * s));
  add("dOmega-/dtheta = Omega+/(2 sin theta)", Om.d(TH) - op / (2.0 * s));
  add("dM/dtheta = Q", M.d(TH) - q);
  add("dG/dr = -dG/dt", G.d(R) + G.d(T));
  add("d2G/drdt = -d2G/dt2", G.dd(R, T) + G.dd(T, T));
  add("d2G/dthetadr = -d2G/dthetadt", G.dd(TH, R) + G.dd(TH, T));
  add("dK/dt + dK/dr = r/(r-m)", K.d(T) + K.d(R) - r / (r - p.m));
  add("d2K/dtdr = -d2K/dt2", K.dd(T, R) + K.dd(T, T));
  add("d2K/dthetadr = -d2K/dtdtheta", K.dd(TH, R) + K.dd(T, TH));
  add("dQ/dtheta = Q cot theta - 3 Omega+/(4 sin theta)", Q.d(TH) - (q * c / s - 3.0 * op / (4.0 * s)));
  add("Q dK/dt = (dG/dtheta)/2", q * K.d(T) - 0.5 * G.d(TH));
  add("d2G/dtheta2 = 2 (dK/dt)(dQ/dtheta)", G.dd(TH, TH) - 2.0 * K.d(T) * Q.d(TH));
  add("2Q cos theta/Omega+ - 3/4 - Q^2/Omega+^2 - 1/Omega+^2 = -sin^2 theta",
      2.0 * q * c / op - 0.75 - q * q / (op * op) - 1.0 / (op * op) + s * s);
  add("2Q cot theta - 3 Omega+/(4 sin theta) - (1+Q^2)/M = -M",
      2.0 * q * c / s - 0.75 * op / s - (1.0 + q * q) / mv + mv);
  return out;
}

double Sampler::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

std::vector<Point4> sample_polar(const TimePeriodicParams& p, std::size_t count, std::uint64_t seed,
                                 const SampleBands& b) {
  Sampler s(seed);
  std::vector<Point4> out;
  out.reserve(count);
  while (out.size() < count) {
    const double t = s.uniform(b.t_lo, b.t_hi);
    const double r = s.uniform(b.r_lo, b.r_hi);
    const double th = s.uniform(b.theta_margin, pi - b.theta_margin);
    const double ph = s.uniform(0.0, 2.0 * pi);
    if (std::fabs(r - p.m) < b.r_m_band) continue;
    const double K = r + p.m * std::log(std::fabs(r - p.m)) + p.eps * std::sin(t - r);
    if (std::fabs(K) < b.k_band) continue;
    out.push_back({t, r, th, ph});
  }
  return out;
}

std::vector<Point4> sample_tilde(const TimePeriodicParams& p, std::size_t count, std::uint64_t seed) {
  Sampler s(seed);
  std::vector<Point4> out;
  out.reserve(count);
  while (out.size() < count) {
    const double tau = s.uniform(-pi, pi);
    const double rt = s.uniform(0.1, 3.0);
    const double th = s.uniform(0.05, pi - 0.05);
    const double ph = s.uniform(0.0, 2.0 * pi);
    if (std::fabs(rt + tau + p.eps * std::sin(tau)) < 0.05) continue;
    out.push_back({tau, rt, th, ph});
  }
  return out;
}

double g00_bound_check(const TimePeriodicParams& p, std::size_t count, std::uint64_t seed) {
  Sampler s(seed);
  double lo = INFINITY;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = s.uniform(0.0, 4.0 * pi);
    const double r = s.uniform(0.1, 10.0);
    double th = s.uniform(0.0, pi);
    if (th == 0.0) th = 0x1.0p-53;
    const double M = [&] {
      const double h = std::sqrt(std::tan(th / 2.0));
      return (h + 1.0 / h) * std::sin(th);
    }();
    lo = std::min(lo, 1.0 + 2.0 * p.eps * M * std::cos(t - r));
  }
  return lo;
}

double periodicity_check(const TimePeriodicParams& p, const Point4& x, double shift) {
  const MetricSpec spec = time_periodic_polar(p);
  const ParamMap params = p.as_map();
  Point4 y = x;
  y[0] += shift;
  const Mat4 a = geometry::metric_values(spec, params, x);
  const Mat4 b = geometry::metric_values(spec, params, y);
  double worst = 0.0;
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = 0; j < kDim; ++j) worst = std::max(worst, std::fabs(a[i][j] - b[i][j]));
  }
  return worst;
}

Point4 tilde_to_polar(const TimePeriodicParams& p, const Point4& x) {
  if (!(p.m > 0.0)) throw std::invalid_argument("pullback requires m > 0");
  const double s = x[0] + x[1];
  return {s, p.m + std::exp(s / p.m), x[2], x[3]};
}

Mat4 pullback_audit(const TimePeriodicParams& p, const Point4& tilde) {
  const Point4 polar = tilde_to_polar(p, tilde);
  const ParamMap params = p.as_map();
  const Mat4 eta = geometry::metric_values(time_periodic_polar(p), params, polar);
  const Mat4 eta_t = geometry::metric_values(time_periodic_tilde(p), params, tilde);
  // J[a][b] = d(polar a)/d(tilde b)
  Mat4 J{};
  const double dr = (polar[1] - p.m) / p.m;
  J[0][0] = J[0][1] = 1.0;
  J[1][0] = J[1][1] = dr;
  J[2][2] = J[3][3] = 1.0;
  Mat4 out{};
  for (std::size_t a = 0; a < kDim; ++a) {
    for (std::size_t b = 0; b < kDim; ++b) {
      double v = 0.0;
      for (std::size_t c = 0; c < kDim; ++c) {
        for (std::size_t d = 0; d < kDim; ++d) v += J[c][a] * eta[c][d] * J[d][b];
      }
      out[a][b] = v - eta_t[a][b];
    }
  }
  return out;
}

}  // namespace gva::catalog
