#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <doctest.h>

#include "gravaudit/catalog/catalog.hpp"

using namespace gva;

namespace {

const std::array<std::string, kDim> kTRTP{"t", "r", "theta", "phi"};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Expr ex(const std::string& text, std::vector<std::string> params = {"eps", "m"}) {
  return parse_expression(text, kTRTP, params);
}

}  // namespace

TEST_CASE("minkowski document has four diagonal slots") {
  const auto s = parse_metric_document("chart t x y z\ng 0 0 = 1\ng 1 1 = -1\ng 2 2 = -1\ng 3 3 = -1\n");
  int zero = 0;
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = i; j < kDim; ++j) zero += s.is_zero(i, j);
  }
  CHECK(zero == 6);
  for (std::size_t i = 0; i < kDim; ++i) CHECK_FALSE(s.is_zero(i, i));
}

TEST_CASE("shipped polar document zero pattern") {
  const auto s = parse_metric_document(slurp(GVA_DATA_DIR "/time_periodic_polar.gmet"));
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = i; j < kDim; ++j) {
      const bool expect_zero = (j == 3 && i != 3);
      CHECK_MESSAGE(s.is_zero(i, j) == expect_zero, i << j);
    }
  }
}

TEST_CASE("shipped documents are byte-identical to the catalog") {
  const std::pair<const char*, MetricSpec> cases[] = {
      {"time_periodic_polar.gmet", catalog::time_periodic_polar({})},
      {"time_periodic_tilde.gmet", catalog::time_periodic_tilde({})},
      {"minkowski.gmet", catalog::minkowski()},
      {"schwarzschild.gmet", catalog::schwarzschild(1.0)},
  };
  for (const auto& [file, spec] : cases) {
    const std::string text = slurp(std::string(GVA_DATA_DIR) + "/" + file);
    CHECK_MESSAGE(text == serialize_metric_document(spec), file);
    CHECK(parse_metric_document(text) == spec);
  }
}

TEST_CASE("serialize round trip") {
  const std::string doc =
      "# comment line\n"
      "chart t r theta phi   # trailing comment\n"
      "param a = 2.5e-1\n"
      "range r (a, inf)\n"
      "g 0 0 = 1 - 2*a/r\n"
      "g 0 1 = -sin(t)^2 / (1 + r^(3/2))\n"
      "g 1 1 = -(1 + -r)^(-1)\n"
      "g 2 2 = -r^2\n"
      "g 3 3 = -r^2*sin(theta)^2*pi\n";
  const auto s = parse_metric_document(doc);
  const std::string canon = serialize_metric_document(s);
  const auto again = parse_metric_document(canon);
  CHECK(again == s);
  CHECK(serialize_metric_document(again) == canon);
}

TEST_CASE("parse errors carry line and column") {
  SUBCASE("unsupported function") {
    try {
      parse_metric_document("chart t x y z\ng 0 0 = 1 + sinh(x)\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() == 13);
      CHECK(std::string(e.what()).find("sinh") != std::string::npos);
    }
  }
  SUBCASE("unknown identifier") {
    try {
      parse_metric_document("chart t x y z\n\ng 1 1 = -1 + q\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
      CHECK(e.column() == 14);
    }
  }
  SUBCASE("a transposed pair names the same slot") {
    const auto s = parse_metric_document("chart t x y z\ng 1 0 = x\n");
    CHECK_FALSE(s.is_zero(0, 1));
    CHECK(serialize_metric_document(s).find("g 0 1 = x") != std::string::npos);
    CHECK_THROWS_AS(parse_metric_document("chart t x y z\ng 0 1 = 1\ng 1 0 = 1\n"), ParseError);
  }
  SUBCASE("index out of range") {
    CHECK_THROWS_AS(parse_metric_document("chart t x y z\ng 0 4 = 1\n"), ParseError);
  }
  SUBCASE("missing chart") { CHECK_THROWS_AS(parse_metric_document("g 0 0 = 1\n"), ParseError); }
  SUBCASE("unbalanced parenthesis") {
    CHECK_THROWS_AS(parse_metric_document("chart t x y z\ng 0 0 = (1 + x\n"), ParseError);
  }
  SUBCASE("duplicate slot") {
    CHECK_THROWS_AS(parse_metric_document("chart t x y z\ng 0 0 = 1\ng 0 0 = 2\n"), ParseError);
  }
}

TEST_CASE("precedence: power binds tighter than unary minus") {
  const Point4 p{0, 3, 0, 0};
  CHECK(eval_value(ex("-r^2"), p, {}) == -9.0);
  CHECK(eval_value(ex("2*r^2/3 - 1"), p, {}) == doctest::Approx(5.0));
  CHECK(eval_value(ex("(r - 1)^(-1)"), p, {}) == 0.5);
  CHECK(eval_value(ex("1e-1*r"), p, {}) == doctest::Approx(0.3));
  CHECK(eval_value(ex("pi"), p, {}) == std::numbers::pi);
}

TEST_CASE("jet of sin(t - r) on the diagonal") {
  const Jet2 j = eval_jet2(ex("sin(t - r)"), {1.3, 1.3, 0.7, 0}, {});
  CHECK(j.value == 0.0);
  CHECK(j.d(0) == 1.0);
  CHECK(j.d(1) == -1.0);
  for (double h : j.hess) CHECK(h == 0.0);
}

TEST_CASE("omega plus at the equator") {
  const Jet2 j = eval_jet2(ex("tan(theta/2)^(1/2) + tan(theta/2)^(-1/2)"), {0, 1, std::numbers::pi / 2, 0}, {});
  CHECK(j.value == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::fabs(j.d(2)) < 1e-15);
}

TEST_CASE("K at t=2, r=3") {
  const ParamMap p{{"eps", 0.1}, {"m", 1.0}};
  const double k = eval_value(ex("r + m*ln(abs(r - m)) + eps*sin(t - r)"), {2, 3, 1, 0}, p);
  CHECK(k == doctest::Approx(3.609000082079156).epsilon(1e-14));
}

TEST_CASE("domain errors") {
  const ParamMap p{{"eps", 0.1}, {"m", 1.0}};
  CHECK_THROWS_AS(eval_jet2(ex("abs(r - m)"), {0, 1, 1, 0}, p), DomainError);
  CHECK_THROWS_AS(eval_value(ex("ln(r - m)"), {0, 1, 1, 0}, p), DomainError);
  CHECK_THROWS_AS(eval_value(ex("1/(r - m)"), {0, 1, 1, 0}, p), DomainError);
  CHECK_THROWS_AS(eval_jet2(ex("sqrt(r - m)"), {0, 1, 1, 0}, p), DomainError);
}

TEST_CASE("chart ranges") {
  const auto s = catalog::schwarzschild(1.0);
  const auto params = s.defaults();
  CHECK_NOTHROW(s.check_point({0, 2.5, 1, 0}, params));
  CHECK_THROWS_AS(s.check_point({0, 2.0, 1, 0}, params), ChartDomainError);
  CHECK_THROWS_AS(s.check_point({0, 3.0, 0.0, 0}, params), ChartDomainError);
  CHECK_THROWS_AS(s.bind({{"nope", 1.0}}), std::invalid_argument);
  CHECK(s.bind({{"mu", 2.0}}).at("mu") == 2.0);
}

// Truncation error vanishes for a quadratic, so a larger step only reduces
// roundoff.
TEST_CASE("finite differences are exact on a quadratic") {
  CHECK(jet_fd_agreement(ex("t^2 + r"), {0.3, -1.2, 0.5, 2}, {}, 1e-2) <= 1e-10);
}

TEST_CASE("polar g00 agrees with finite differences") {
  const auto spec = catalog::time_periodic_polar({0.1, 1.0});
  const double d = jet_fd_agreement(*spec.slot(0, 0), {1, 2, 1.0, 0}, spec.defaults(), 1e-4);
  CHECK(d <= 1e-6);
}

// Property: forward jets agree with an independent Richardson finite
// difference at random points for every supported operation.
TEST_CASE("jets agree with finite differences at 1000 random points") {
  const std::vector<std::string> texts = {
      "sin(t*r) + cos(theta - phi)",
      "exp(0.3*t - r)*tan(theta/3)",
      "ln(2 + r^2) / (1.5 + cos(t))",
      "sqrt(3 + sin(r*theta)) * abs(r - 7)",
      "asin(0.4*sin(t + phi))",
      "(2 + cos(theta))^(3/2) - (3 + r^2)^(-1/4)",
      "r + m*ln(abs(r - m)) + eps*sin(t - r)",
      "tan(theta/2)^(1/2)*sin(theta)*cos(t - r)",
  };
  catalog::Sampler rng(7);
  const ParamMap params{{"eps", 0.05}, {"m", 1.0}};
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Expr e = ex(texts[static_cast<std::size_t>(i) % texts.size()]);
    const Point4 p{rng.uniform(-2, 2), rng.uniform(2, 4), rng.uniform(0.4, 2.7), rng.uniform(-2, 2)};
    worst = std::max(worst, jet_fd_agreement(e, p, params, 1e-3));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("product and chain rules") {
  catalog::Sampler rng(11);
  const Expr f = ex("sin(t*r) + theta");
  const Expr g = ex("exp(r - phi)");
  const Expr fg = ex("(sin(t*r) + theta)*exp(r - phi)");
  const Expr comp = ex("cos(sin(t*r) + theta)");
  for (int i = 0; i < 100; ++i) {
    const Point4 p{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const Jet2 a = eval_jet2(f, p, {}), b = eval_jet2(g, p, {}), ab = eval_jet2(fg, p, {});
    const Jet2 c = eval_jet2(comp, p, {});
    for (std::size_t k = 0; k < kDim; ++k) {
      CHECK(ab.d(k) == doctest::Approx(a.d(k) * b.value + a.value * b.d(k)).epsilon(1e-12));
      CHECK(c.d(k) == doctest::Approx(-std::sin(a.value) * a.d(k)).epsilon(1e-12));
      for (std::size_t l = 0; l < kDim; ++l) {
        const double prod = a.dd(k, l) * b.value + a.d(k) * b.d(l) + a.d(l) * b.d(k) + a.value * b.dd(k, l);
        CHECK(ab.dd(k, l) == doctest::Approx(prod).epsilon(1e-12).scale(1.0));
        const double chain = -std::cos(a.value) * a.d(k) * a.d(l) - std::sin(a.value) * a.dd(k, l);
        CHECK(c.dd(k, l) == doctest::Approx(chain).epsilon(1e-12).scale(1.0));
      }
    }
  }
}
