#include <cmath>
#include <numbers>

#include <doctest.h>

#include "gravaudit/catalog/catalog.hpp"
#include "gravaudit/constructor/constructor.hpp"

using namespace gva;
using namespace gva::constructor;

namespace {

const std::array<std::string, kDim> kTXYZ{"t", "x", "y", "z"};

Expr ex(const std::string& s) { return parse_expression(s, kTXYZ, {}); }

}  // namespace

TEST_CASE("v from an ansatz") {
  CHECK(v_from_ansatz(simple_ansatz("x"), {}, {0, 1, 0, 0}) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(v_from_ansatz(simple_ansatz("2*x"), {}, {0, 0, 0, 0}) == doctest::Approx(2.0).epsilon(1e-15));
  auto a = simple_ansatz("ln(x + 2)");
  a.v0 = Expr::constant(3.0);
  CHECK(v_from_ansatz(a, {}, {0, 0, 0, 0}) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("adaptive simpson") {
  CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0, std::numbers::pi) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(adaptive_simpson([](double x) { return x * x * x; }, -1, 2) == doctest::Approx(3.75).epsilon(1e-14));
  CHECK(adaptive_simpson([](double x) { return std::exp(-x * x); }, 0, 3) ==
        doctest::Approx(0.88620734825952125).epsilon(1e-12));
  CHECK(adaptive_simpson([](double) { return 1.0; }, 2, 2) == 0.0);
  CHECK_THROWS_AS(adaptive_simpson([](double x) { return 1.0 / x; }, 0, 1), QuadratureError);
}

// v(x) / v(x0) against the closed form f_x e^f / (f_x e^f)(x0) on a
// 20-point grid for each ansatz.
TEST_CASE("quadrature reproduces the closed-form v") {
  const char* ansatze[] = {"x", "ln(x + 2)", "2*x", "x^2 + x"};
  const Point4 base{0.5, 0, 0.25, 0.75};
  for (const char* f : ansatze) {
    const auto a = simple_ansatz(f);
    const auto tpl = template_from_ansatz(a);
    Point4 p0 = base;
    p0[1] = 0.0;
    const double v0 = v_from_ansatz(a, {}, p0);
    const auto vs = solve_v(tpl, {}, base, 0.0, 2.0, 0.0, v0, 20);
    REQUIRE(vs.size() == 20);
    CHECK(vs.front().x == 0.0);
    CHECK(vs.back().x == 2.0);
    for (const auto& s : vs) {
      Point4 p = base;
      p[1] = s.x;
      const double exact = v_from_ansatz(a, {}, p);
      CHECK_MESSAGE(std::fabs(s.v - exact) <= 1e-6 * std::fabs(exact), f << " x=" << s.x);
    }
  }
}

TEST_CASE("logarithmic ansatz gives constant v") {
  const auto vs = solve_v(template_from_ansatz(simple_ansatz("ln(x + 3)")), {}, {0, 0, 0, 0}, 0, 5, 0, 1.5, 11);
  for (const auto& s : vs) CHECK(s.v == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("constant rho and sigma violate the proviso") {
  TypeITemplate tpl;
  tpl.chart.names = kTXYZ;
  tpl.u = Expr::constant(1.0);
  tpl.rho = Expr::constant(-1.0);
  tpl.sigma = Expr::constant(-2.0);
  CHECK_THROWS_AS(solve_v(tpl, {}, {0, 0, 0, 0}, 0, 1, 0, 1, 5), ProvisoError);
}

TEST_CASE("G11 closed form") {
  SUBCASE("ansatz solution makes G11 vanish") {
    const auto tpl = template_from_ansatz(simple_ansatz("x"), ex("exp(x)"));
    for (double x : {-1.0, 0.0, 0.7, 2.0}) CHECK(std::fabs(g11_closed_form(tpl, {}, {0.3, x, 0.1, 0.2})) <= 1e-13);
  }
  SUBCASE("constant fields") {
    TypeITemplate tpl;
    tpl.chart.names = kTXYZ;
    tpl.u = Expr::constant(1.0);
    tpl.v = Expr::constant(2.0);
    tpl.rho = Expr::constant(-1.0);
    tpl.sigma = Expr::constant(-3.0);
    CHECK(g11_closed_form(tpl, {}, {0, 1, 2, 3}) == 0.0);
  }
  SUBCASE("agrees with the curvature engine") {
    const catalog::TimePeriodicParams tp{0.05, 1.0};
    const auto spec = catalog::time_periodic_tilde(tp);
    const auto tpl = template_from_spec(spec);
    const auto params = spec.defaults();
    for (const auto& p : catalog::sample_tilde(tp, 50, 77)) {
      const double engine = geometry::curvature_at(spec, params, p).einstein[1][1];
      const double closed = g11_closed_form(tpl, params, p);
      CHECK(std::fabs(engine - closed) <= 1e-8 * (1 + std::fabs(engine)));
    }
  }
}

TEST_CASE("template shape checks") {
  CHECK_THROWS_AS(template_from_spec(catalog::time_periodic_polar({})), std::invalid_argument);
  CHECK_THROWS_AS(template_from_spec(catalog::minkowski()), std::invalid_argument);
  CHECK_FALSE(template_from_ansatz(simple_ansatz("x")).v.has_value());
  const auto round = template_from_spec(template_from_ansatz(simple_ansatz("x"), ex("exp(x)")).to_spec());
  CHECK(round.v.has_value());
}

TEST_CASE("field equation cascade") {
  const char* order[] = {"G11", "G12", "G13", "G23", "G22+L*g22", "G33+L*g33", "G01+L*g01", "G02+L*g02", "G03+L*g03",
                         "G00+L*g00"};
  SUBCASE("minkowski") {
    const auto r = cascade_residual_report(catalog::minkowski(), {}, 0.0, {{0, 0, 0, 0}, {1, 2, 3, 4}});
    REQUIRE(r.rows.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(r.rows[i].label == order[i]);
      for (double v : r.rows[i].jet) CHECK(v == 0.0);
    }
  }
  SUBCASE("schwarzschild") {
    const auto s = catalog::schwarzschild(1.0);
    const auto r = cascade_residual_report(s, s.defaults(), 0.0, {{0, 3, 1, 0}, {0.5, 6, 2, 1}});
    for (const auto& row : r.rows) {
      for (double v : row.jet) CHECK(std::fabs(v) <= 1e-9);
    }
  }
  SUBCASE("tilde, jobs do not change the table") {
    const catalog::TimePeriodicParams tp{0.05, 1.0};
    const auto spec = catalog::time_periodic_tilde(tp);
    const auto pts = catalog::sample_tilde(tp, 12, 3);
    const auto a = cascade_residual_report(spec, spec.defaults(), 0.0, pts, 1);
    const auto b = cascade_residual_report(spec, spec.defaults(), 0.0, pts, 4);
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(a.rows[i].label == order[i]);
      CHECK(a.rows[i].jet == b.rows[i].jet);
      CHECK(a.rows[i].oracle == b.rows[i].oracle);
    }
  }
}
