#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "gravaudit/dsl/document.hpp"
#include "gravaudit/geometry/geometry.hpp"

namespace gva::catalog {

using geometry::Mat4;

struct TimePeriodicParams {
  double eps = 0.05;
  double m = 1.0;

  ParamMap as_map() const { return ParamMap{{"eps", eps}, {"m", m}}; }
  static TimePeriodicParams from_map(const ParamMap& p);
};

/// Helper scalars of the polar chart, plus the tilde-chart Ω̃ evaluated at
/// τ + r̃ = t.
struct TimePeriodicForms {
  double G = 0, K = 0, M = 0, Q = 0;
  double omega_plus = 0, omega_minus = 0;
  double omega_tilde = 0;
};

/// Chart (t, r, theta, phi), theta restricted to (0, pi).
MetricSpec time_periodic_polar(const TimePeriodicParams& p);
/// Chart (tau, rt, tht, pht). Rejects m = 0.
MetricSpec time_periodic_tilde(const TimePeriodicParams& p);
/// Chart (t, x, y, z), diag(1, -1, -1, -1).
MetricSpec minkowski();
/// Chart (t, r, theta, phi) with r > 2 mu.
MetricSpec schwarzschild(double mu);

/// Closed forms evaluated directly in double arithmetic. Throws DomainError
/// off theta in (0, pi) or at r = m.
TimePeriodicForms helpers_at(const TimePeriodicParams& p, const Point4& point);

/// Named catalog entry: "time-periodic" (polar), "time-periodic-tilde",
/// "minkowski", "schwarzschild". Parameter overrides are applied to the
/// document defaults; unknown names throw std::invalid_argument.
MetricSpec by_name(std::string_view name, const ParamMap& overrides = {});
std::vector<std::string> names();

/// Membership of a polar-chart point in the singular sets, each tested
/// against `tol`: "S_{r=0}", "S_{r=m}", "S_{K=0}", "S_{theta=0,pi}".
/// Empty means regular.
std::vector<std::string> singular_sets(const TimePeriodicParams& p, const Point4& point,
                                       double tol = 1e-9);

struct IdentityResidual {
  std::string name;      // e.g. "dK/dt = (G-1)/(2M)"
  double residual = 0;   // left minus right
};

/// The sixteen derivative identities of the helper scalars, each as
/// left-hand side minus right-hand side. Derivatives come from jets of the
/// helper expressions. `q_scale` multiplies every occurrence of Q and exists
/// only as a negative control.
std::vector<IdentityResidual> property1_residuals(const TimePeriodicParams& p, const Point4& point,
                                                  double q_scale = 1.0);

// Deterministic sampling. Uniform doubles are (bits >> 11) * 2^-53 from
// mt19937_64 so streams are identical across standard libraries.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 rng_;
};

struct SampleBands {
  double theta_margin = 0.05;  // theta in (margin, pi - margin)
  double r_lo = 0.1, r_hi = 10.0;
  double t_lo = 0.0, t_hi = 4.0 * 3.14159265358979323846;
  double r_m_band = 0.05;      // exclude |r - m| < band
  double k_band = 0.05;        // exclude |K| < band
};

/// Regular polar points (t, r, theta, phi) drawn by rejection from the
/// bands above.
std::vector<Point4> sample_polar(const TimePeriodicParams& p, std::size_t count, std::uint64_t seed,
                                 const SampleBands& bands = {});

/// Regular tilde points with tau in [-pi, pi], rt in [0.1, 3],
/// theta margin 0.05 and |rt + tau + eps sin tau| >= 0.05.
std::vector<Point4> sample_tilde(const TimePeriodicParams& p, std::size_t count, std::uint64_t seed);

/// Minimum of G over seeded samples with t in [0, 4 pi], r in [0.1, 10],
/// theta in (0, pi).
double g00_bound_check(const TimePeriodicParams& p, std::size_t count, std::uint64_t seed);

/// Max componentwise |eta(t + shift) - eta(t)| for the polar metric.
double periodicity_check(const TimePeriodicParams& p, const Point4& point,
                         double shift = 2.0 * 3.14159265358979323846);

/// The polar point a tilde point maps to: t = tau + rt,
/// r = m + exp((tau + rt) / m), angles unchanged. Requires m > 0.
Point4 tilde_to_polar(const TimePeriodicParams& p, const Point4& tilde);

/// J^T eta(polar image) J - eta~(tilde point), with J the analytic Jacobian
/// of the map above.
Mat4 pullback_audit(const TimePeriodicParams& p, const Point4& tilde);

}  // namespace gva::catalog
