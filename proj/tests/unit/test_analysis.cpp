#include <cmath>
#include <numbers>

#include <doctest.h>

#include "gravaudit/analysis/analysis.hpp"

using namespace gva;
using namespace gva::analysis;

namespace {

constexpr double kPi = std::numbers::pi;

// Roots of gamma(r) = r + ln|r - 1| = c for m = 1, computed with an
// independent bracketing solver (scipy brentq, xtol 1e-15).
constexpr double kRMinus = 0.383183168208295;     // c = -0.1 on [0, 1)
constexpr double kR0 = 1.2573435021764579;        // c = -0.1 on (1, inf)
constexpr double kRPlus = 1.3009178789305853;     // c = +0.1 on (1, inf)
constexpr double kGammaRoot = 1.278464542761074;  // c = 0 on (1, inf)

bool close(double a, double b, double rel) { return std::fabs(a - b) <= rel * (1 + std::fabs(b)); }

std::array<bool, 10> zero_slots_of(const MetricSpec& s) {
  std::array<bool, 10> z{};
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = i; j < kDim; ++j) z[sym_index(i, j)] = s.is_zero(i, j);
  }
  return z;
}

}  // namespace

TEST_CASE("jacobi eigen decomposition") {
  catalog::Sampler rng(8);
  for (int n = 0; n < 100; ++n) {
    Mat4 a{};
    for (std::size_t i = 0; i < kDim; ++i) {
      for (std::size_t j = i; j < kDim; ++j) a[i][j] = a[j][i] = rng.uniform(-3, 3);
    }
    const auto e = symmetric_eigen(a);
    for (std::size_t k = 1; k < kDim; ++k) CHECK(e.values[k - 1] <= e.values[k]);
    for (std::size_t k = 0; k < kDim; ++k) {
      for (std::size_t i = 0; i < kDim; ++i) {
        double av = 0;
        for (std::size_t j = 0; j < kDim; ++j) av += a[i][j] * e.vectors[j][k];
        CHECK(std::fabs(av - e.values[k] * e.vectors[i][k]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("minkowski signature") {
  const auto s = catalog::minkowski();
  const auto r = signature_at(s, {}, {0, 0, 0, 0});
  REQUIRE(r.lorentzian.has_value());
  CHECK(*r.lorentzian);
  CHECK(r.predicate == Predicate::Conclusion3);
  CHECK(r.predicate_holds);
  CHECK(std::string(predicate_name(r.predicate)) == "conclusion-3");
}

TEST_CASE("polar signature and minor chain") {
  const auto s = catalog::time_periodic_polar({0.1, 1.0});
  const auto r = signature_at(s, s.defaults(), {0, 2, kPi / 2, 0});
  REQUIRE(r.lorentzian.has_value());
  CHECK(*r.lorentzian);
  CHECK(r.predicate == Predicate::EigenFallback);
  CHECK(r.leading_minors[0] > 0);
  CHECK(r.leading_minors[1] < 0);
  CHECK(r.leading_minors[2] > 0);
  CHECK(r.leading_minors[3] < 0);
}

TEST_CASE("degenerate matrix has an undefined signature") {
  const Mat4 g{{{1, 0, 0, 0}, {0, -1, 0, 0}, {0, 0, -1, 0}, {0, 0, 0, 0}}};
  std::array<bool, 10> zero{};
  const auto r = signature_of(g, zero);
  CHECK_FALSE(r.lorentzian.has_value());
  CHECK(std::count(r.signs.begin(), r.signs.end(), 0) == 1);
}

TEST_CASE("principal minors by hand") {
  const auto s0 = catalog::time_periodic_polar({0.0, 1.0});
  const auto m0 = principal_minors(s0, s0.defaults(), {0, 2, kPi / 2, 0});
  CHECK(m0[0] == doctest::Approx(1.0));
  CHECK(m0[1] == doctest::Approx(-16.0).epsilon(1e-14));
  CHECK(m0[3] == doctest::Approx(-256.0).epsilon(1e-14));
  const auto s1 = catalog::time_periodic_polar({0.1, 1.0});
  CHECK(principal_minors(s1, s1.defaults(), {0, 2, kPi / 2, 0})[1] == doctest::Approx(-16.0).epsilon(1e-14));
  CHECK(det_closed_form({0.0, 1.0}, {0, 2, kPi / 2, 0}) == doctest::Approx(-256.0).epsilon(1e-14));
}

TEST_CASE("determinant closed form at special points") {
  // K = 0 at r = 0, t = 0 for m = 1.
  CHECK(det_closed_form({0.1, 1.0}, {0, 0, 1.0, 0}) == 0.0);
  CHECK(std::fabs(det_closed_form({0.1, 2.0}, {0.3, 1e-9, kPi / 2, 0})) < 1e-12);
}

// Property: closed-form minors, determinant and the Sylvester sign chain
// against numeric values and eigen signs at seeded points.
TEST_CASE("minors, determinant and signs at random points") {
  const catalog::TimePeriodicParams sets[] = {{0.05, 1}, {0.1, 1}, {0.1, 2}, {-0.1, 0.5}};
  for (const auto& tp : sets) {
    const auto s = catalog::time_periodic_polar(tp);
    const auto params = s.defaults();
    const auto zero = zero_slots_of(s);
    for (const auto& p : catalog::sample_polar(tp, 200, 31)) {
      const auto num = principal_minors(s, params, p);
      const auto cf = polar_minor_closed_forms(tp, p);
      for (std::size_t k = 0; k < 3; ++k) CHECK(close(num[k + 1], cf[k], 1e-10));
      CHECK(close(num[3], det_closed_form(tp, p), 1e-10));
      const auto sig = signature_of(geometry::metric_values(s, params, p), zero);
      REQUIRE(sig.lorentzian.has_value());
      CHECK(*sig.lorentzian);
      CHECK(std::count(sig.signs.begin(), sig.signs.end(), 1) == 1);
      CHECK(std::count(sig.signs.begin(), sig.signs.end(), -1) == 3);
      CHECK(num[0] > 0);
      CHECK(num[1] < 0);
      CHECK(num[2] > 0);
      CHECK(num[3] < 0);
    }
  }
}

TEST_CASE("singular set classification") {
  const catalog::TimePeriodicParams tp{0.1, 1.0};
  CHECK(singular_set_classify(tp, {0, 2, kPi / 2, 0}) == std::vector<std::string>{"regular"});
  CHECK(singular_set_classify(tp, {5, 1, 1, 0}) == std::vector<std::string>{"S_{r=m}"});
}

TEST_CASE("horizon function") {
  const catalog::TimePeriodicParams tp{0.1, 1.0};
  CHECK(horizon_f(tp, 0, 0) == 0.0);
  CHECK(horizon_f(tp, 2, 2) == 2.0);
  CHECK(horizon_f(tp, 0.5, 0.5) == doctest::Approx(0.5 + std::log(0.5)).epsilon(1e-15));
  CHECK_THROWS_AS(horizon_f(tp, 1.0, 0), DomainError);
  // Zero up to the rounding of 2 k pi itself.
  for (int k = 0; k <= 2; ++k) CHECK(std::fabs(horizon_f(tp, 0, 2 * k * kPi)) <= 1e-15);
}

TEST_CASE("time slots") {
  CHECK(horizon_time_slots({0.3, 1.0}, 2, HorizonCase::I) == 4 * kPi);
  CHECK(horizon_time_slots({0.1, 0.9}, 0, HorizonCase::I) == doctest::Approx(1.2476614906666457).epsilon(1e-14));
  CHECK(feasibility_ratio({0.1, 1.2}) == doctest::Approx(-1.2 * std::log(1.2) / 0.1).epsilon(1e-15));
  try {
    (void)horizon_time_slots({0.1, 1.2}, 0, HorizonCase::I);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(std::fabs(e.ratio()) == doctest::Approx(2.1878587).epsilon(1e-7));
  }
}

TEST_CASE("horizon band edges") {
  const catalog::TimePeriodicParams tp{0.1, 1.0};
  const auto one = horizon_extent(tp, HorizonCase::I);
  CHECK(one.r_start == 0.0);
  CHECK(std::fabs(one.r_minus - kRMinus) <= 1e-12);
  const auto two = horizon_extent(tp, HorizonCase::II);
  CHECK(std::fabs(two.r0 - kR0) <= 1e-12);
  CHECK(std::fabs(two.r_plus - kRPlus) <= 1e-12);
  CHECK(kR0 < kGammaRoot);
  CHECK(kGammaRoot < kRPlus);
  CHECK(std::fabs(horizon_gamma(tp, kGammaRoot)) <= 1e-14);

  // Squeezing the band collapses both edges onto the zeros of gamma. Near
  // r = 0, gamma ~ -r^2/2, so r_minus ~ sqrt(2 eps).
  const catalog::TimePeriodicParams thin{1e-9, 1.0};
  CHECK(horizon_extent(thin, HorizonCase::I).r_minus == doctest::Approx(std::sqrt(2e-9)).epsilon(1e-4));
  const auto t2 = horizon_extent(thin, HorizonCase::II);
  CHECK(std::fabs(t2.r0 - kGammaRoot) <= 1e-8);
  CHECK(std::fabs(t2.r_plus - kGammaRoot) <= 1e-8);
}

// gamma is decreasing on [0, m) and increasing on (m, inf), which is what
// makes the band edges unique.
TEST_CASE("gamma monotonicity") {
  catalog::Sampler rng(12);
  for (double m : {0.5, 1.0, 2.0}) {
    const catalog::TimePeriodicParams tp{0.1, m};
    for (int i = 0; i < 300; ++i) {
      const double a = rng.uniform(0, m * 0.999), b = rng.uniform(0, m * 0.999);
      if (a < b) CHECK(horizon_gamma(tp, a) > horizon_gamma(tp, b));
      const double c = m + rng.uniform(1e-3, 5), d = m + rng.uniform(1e-3, 5);
      if (c < d) CHECK(horizon_gamma(tp, c) < horizon_gamma(tp, d));
    }
  }
}

TEST_CASE("traced branches") {
  const catalog::TimePeriodicParams tp{0.1, 1.0};
  for (int k = 0; k <= 2; ++k) {
    const auto b = trace_horizon_branch(tp, k, HorizonCase::I, Arc::Principal, 101);
    CHECK(b.r.front() == 0.0);
    CHECK(b.t.front() == doctest::Approx(2 * k * kPi).epsilon(1e-15));
    CHECK(b.r.back() == doctest::Approx(kRMinus).epsilon(1e-12));
    CHECK(b.t.back() == doctest::Approx(kRMinus + kPi / 2 + 2 * k * kPi).epsilon(1e-7));
    CHECK(b.monotone == 1);
  }
  for (HorizonCase c : {HorizonCase::I, HorizonCase::II}) {
    for (Arc a : {Arc::Principal, Arc::Conjugate}) {
      for (int k = 0; k <= 2; ++k) {
        const auto b = trace_horizon_branch(tp, k, c, a, 200);
        CHECK(b.r.size() == 200);
        for (double f : b.residual) CHECK(std::fabs(f) <= 1e-12);
      }
    }
  }
  // Observed shapes on case II: the principal arc falls with r, the
  // conjugate arc rises.
  CHECK(trace_horizon_branch(tp, 0, HorizonCase::II, Arc::Principal, 200).monotone == -1);
  CHECK(trace_horizon_branch(tp, 0, HorizonCase::II, Arc::Conjugate, 200).monotone == 1);
}

TEST_CASE("congruence diagonal form") {
  const auto d = congruence_diagonal({0.0, 1.0}, {0, 2, kPi / 2, 0});
  const double expect[] = {1, -16, -4, -4};
  for (std::size_t i = 0; i < kDim; ++i) CHECK(d.entries[i] == doctest::Approx(expect[i]).epsilon(1e-14));

  const catalog::TimePeriodicParams tp{0.05, 1.0};
  const auto s = catalog::time_periodic_polar(tp);
  for (const auto& p : catalog::sample_polar(tp, 100, 5)) {
    const auto f = congruence_diagonal(tp, p);
    double prod = 1;
    for (std::size_t i = 0; i < kDim; ++i) {
      CHECK(close(f.entries[i], f.closed_form[i], 1e-10));
      prod *= f.entries[i];
    }
    const Mat4 g = geometry::metric_values(s, s.defaults(), p);
    CHECK(close(prod, geometry::det4(g), 1e-10));
    const auto sig = signature_of(g, zero_slots_of(s));
    int neg = 0;
    for (double e : f.entries) neg += e < 0;
    CHECK(neg == std::count(sig.signs.begin(), sig.signs.end(), -1));
  }
  const Mat4 bad{{{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, -1, 0}, {0, 0, 0, -1}}};
  CHECK_THROWS_AS(congruence_diagonalize(bad), PivotError);
}

TEST_CASE("large r behaviour") {
  const catalog::TimePeriodicParams tp{0.1, 1.0};
  const auto a = asymptotic_audit(tp, kPi / 2, 0.0, {10.0, 100.0, 1000.0});
  REQUIRE(a.rows.size() == 3);
  const double expect = 1 + (std::log(999.0) + 0.1 * std::sin(-1000.0)) / 1000.0;
  CHECK(a.rows[2].k_over_r == doctest::Approx(expect).epsilon(1e-13));
  CHECK(a.rows[2].k_over_r == doctest::Approx(1.0069).epsilon(1e-3));
  CHECK(std::fabs(a.rows[2].entry2_ratio - 1) < std::fabs(a.rows[0].entry2_ratio - 1));
  // Entry 0 depends on theta when eps != 0.
  CHECK(std::fabs(a.entry0_pi3_pi2[0] - a.entry0_pi3_pi2[1]) > 1e-9);
  const auto flat = asymptotic_audit({0.0, 1.0}, kPi / 2, 0.0, {1000.0});
  CHECK(flat.entry0_pi3_pi2[0] == doctest::Approx(1.0));
  CHECK(std::fabs(flat.entry1_pi3_pi2[0] - flat.entry1_pi3_pi2[1]) > 1e-9);
}
