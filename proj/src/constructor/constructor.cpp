#include "gravaudit/constructor/constructor.hpp"

#include <cmath>
#include <limits>

#include "gravaudit/geometry/parallel.hpp"

namespace gva::constructor {

namespace {

constexpr std::size_t kX = 1;

double simpson(double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); }

struct Simpson {
  const std::function<double(double)>& f;
  const QuadratureOptions& opt;

  double eval(double x) const {
    const double y = f(x);
    if (!std::isfinite(y)) throw QuadratureError("non-finite integrand at x = " + std::to_string(x));
    return y;
  }

  double step(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    if (!(lm > a && rm < b && m > a && m < b)) {
      throw QuadratureError("step underflow near x = " + std::to_string(m) +
                            "; integrand not integrable there");
    }
    const double flm = eval(lm), frm = eval(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double diff = left + right - whole;
    if (std::fabs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    if (depth >= opt.max_depth) {
      throw QuadratureError("quadrature did not converge within depth limit near x = " + std::to_string(m));
    }
    return step(a, m, fa, flm, fm, left, tol / 2.0, depth + 1) +
           step(m, b, fm, frm, fb, right, tol / 2.0, depth + 1);
  }
};

}  // namespace

MetricSpec TypeITemplate::to_spec() const {
  if (!v) throw std::invalid_argument("template has no v");
  MetricSpec spec;
  spec.chart = chart;
  spec.params = params;
  auto put = [&](std::size_t i, std::size_t j, const std::optional<Expr>& e) {
    if (e && !e->is_zero_constant()) spec.slots[sym_index(i, j)] = *e;
  };
  put(0, 0, u);
  put(0, 1, v);
  put(0, 2, p);
  put(0, 3, q);
  put(2, 2, rho);
  put(3, 3, sigma);
  return spec;
}

TypeITemplate template_from_spec(const MetricSpec& spec) {
  for (auto [i, j] : {std::pair{1, 1}, {1, 2}, {1, 3}, {2, 3}}) {
    if (!spec.is_zero(i, j)) {
      throw std::invalid_argument("not a Type-I metric: slot (" + std::to_string(i) + "," +
                                  std::to_string(j) + ") is not zero");
    }
  }
  if (spec.is_zero(2, 2) || spec.is_zero(3, 3)) {
    throw std::invalid_argument("Type-I template needs nonzero rho (2,2) and sigma (3,3)");
  }
  TypeITemplate t;
  t.chart = spec.chart;
  t.params = spec.params;
  t.u = spec.slot(0, 0);
  t.v = spec.slot(0, 1);
  t.p = spec.slot(0, 2);
  t.q = spec.slot(0, 3);
  t.rho = *spec.slot(2, 2);
  t.sigma = *spec.slot(3, 3);
  return t;
}

AnsatzSpec simple_ansatz(const std::string& f_text) {
  AnsatzSpec a;
  a.chart.names = {"t", "x", "y", "z"};
  a.f = parse_expression(f_text, a.chart.names, {});
  a.rho_tilde = Expr::constant(-1.0);
  a.sigma_tilde = Expr::constant(-1.0);
  a.v0 = Expr::constant(1.0);
  return a;
}

TypeITemplate template_from_ansatz(const AnsatzSpec& a, std::optional<Expr> v, std::optional<Expr> u) {
  TypeITemplate t;
  t.chart = a.chart;
  t.params = a.params;
  const Expr e2f = Expr::unary(Func::Exp, Expr::binary(BinOp::Mul, Expr::constant(2.0), a.f));
  t.rho = Expr::binary(BinOp::Mul, a.rho_tilde, e2f);
  t.sigma = Expr::binary(BinOp::Mul, a.sigma_tilde, e2f);
  t.u = u ? std::move(u) : std::optional<Expr>(Expr::constant(1.0));
  t.v0 = a.v0;
  t.v = std::move(v);
  return t;
}

double v_from_ansatz(const AnsatzSpec& a, const ParamMap& params, const Point4& x) {
  const Jet2 f = eval_jet2(a.f, x, params);
  return eval_value(a.v0, x, params) * f.d(kX) * std::exp(f.value);
}

double g11_closed_form(const TypeITemplate& tpl, const ParamMap& params, const Point4& x) {
  if (!tpl.v) throw std::invalid_argument("g11_closed_form needs v");
  const Jet2 v = eval_jet2(*tpl.v, x, params);
  const Jet2 rho = eval_jet2(tpl.rho, x, params);
  const Jet2 sig = eval_jet2(tpl.sigma, x, params);
  if (v.value == 0.0 || rho.value == 0.0 || sig.value == 0.0) {
    throw DomainError("G11 closed form needs v, rho, sigma nonzero");
  }
  const double a = rho.d(kX) / rho.value, b = sig.d(kX) / sig.value;
  const double c = rho.dd(kX, kX) / rho.value + sig.dd(kX, kX) / sig.value;
  return -0.5 * (v.d(kX) / v.value * (a + b) + 0.5 * (a * a + b * b) - c);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opt) {
  if (a == b) return 0.0;
  Simpson s{f, opt};
  const double fa = s.eval(a), fb = s.eval(b), fm = s.eval(0.5 * (a + b));
  const double whole = simpson(fa, fm, fb, b - a);
  const double tol = std::max(opt.abs_tol, opt.rel_tol * std::fabs(whole));
  return s.step(a, b, fa, fm, fb, whole, tol, 0);
}

std::vector<VSample> solve_v(const TypeITemplate& tpl, const ParamMap& params, const Point4& base,
                             double x_lo, double x_hi, double x0, double v_x0, std::size_t grid,
                             const QuadratureOptions& opt) {
  auto integrand = [&](double x) {
    Point4 pt = base;
    pt[kX] = x;
    const Jet2 rho = eval_jet2(tpl.rho, pt, params);
    const Jet2 sig = eval_jet2(tpl.sigma, pt, params);
    const double a = rho.d(kX) / rho.value, b = sig.d(kX) / sig.value;
    // (rho sigma)_x / (rho sigma) = a + b
    if (std::fabs(a + b) <= 1e-12) {
      throw ProvisoError("proviso (rho sigma)_x != 0 violated at x = " + std::to_string(x), x);
    }
    const double c = rho.dd(kX, kX) / rho.value + sig.dd(kX, kX) / sig.value;
    return (c - 0.5 * a * a - 0.5 * b * b) / (a + b);
  };
  (void)integrand(x0);
  std::vector<VSample> out;
  grid = std::max<std::size_t>(grid, 2);
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = i + 1 == grid ? x_hi : x_lo + (x_hi - x_lo) * static_cast<double>(i) / static_cast<double>(grid - 1);
    const double integral = adaptive_simpson(integrand, x0, x, opt);
    out.push_back({x, v_x0 * std::exp(integral)});
  }
  return out;
}

CascadeReport cascade_residual_report(const MetricSpec& spec, const ParamMap& params, double lambda,
                                      const std::vector<Point4>& points, std::size_t jobs) {
  static constexpr std::array<std::pair<std::size_t, std::size_t>, 10> order{
      {{1, 1}, {1, 2}, {1, 3}, {2, 3}, {2, 2}, {3, 3}, {0, 1}, {0, 2}, {0, 3}, {0, 0}}};
  struct PointResult {
    geometry::Mat4 jet, oracle;
  };
  const auto results = parallel_map(
      points.size(),
      [&](std::size_t i) {
        const auto mv = geometry::metric_at(spec, params, points[i]);
        const auto jb = geometry::curvature_at(spec, params, points[i]);
        const auto ob = geometry::fd_curvature_oracle(spec, params, points[i]);
        PointResult r;
        for (std::size_t a = 0; a < kDim; ++a) {
          for (std::size_t b = 0; b < kDim; ++b) {
            r.jet[a][b] = jb.einstein[a][b] + lambda * mv.g[a][b];
            r.oracle[a][b] = ob.einstein[a][b] + lambda * mv.g[a][b];
          }
        }
        return r;
      },
      jobs);
  CascadeReport rep;
  rep.lambda = lambda;
  for (auto [mu, nu] : order) {
    CascadeRow row;
    row.mu = mu;
    row.nu = nu;
    const std::string idx = std::to_string(mu) + std::to_string(nu);
    const bool off_block = (mu == 1 && nu != 1) || (mu == 2 && nu == 3);
    row.label = off_block || (mu == 1 && nu == 1) ? "G" + idx : "G" + idx + "+L*g" + idx;
    for (const auto& r : results) {
      row.jet.push_back(r.jet[mu][nu]);
      row.oracle.push_back(r.oracle[mu][nu]);
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace gva::constructor
