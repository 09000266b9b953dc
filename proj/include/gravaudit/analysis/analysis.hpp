#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gravaudit/catalog/catalog.hpp"

namespace gva::analysis {

using catalog::TimePeriodicParams;
using geometry::Mat4;

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
/// symmetric matrix by cyclic Jacobi rotations.
struct EigenResult {
  std::array<double, kDim> values{};
  Mat4 vectors{};
};
EigenResult symmetric_eigen(const Mat4& a);

enum class Predicate { Theorem1, Conclusion1, Conclusion2, Conclusion3, EigenFallback };
const char* predicate_name(Predicate p);

struct SignatureReport {
  std::array<int, kDim> signs{};        // +1, -1 or 0, ascending eigenvalue order
  std::array<double, kDim> eigenvalues{};
  std::array<double, kDim> leading_minors{};
  std::optional<bool> lorentzian;       // empty when a zero eigenvalue occurs
  Predicate predicate = Predicate::EigenFallback;
  /// Whether the shape predicate's hypotheses held (always false for the
  /// eigen fallback).
  bool predicate_holds = false;
};

/// Signature of a symmetric matrix. `zero_tol` is relative to max |lambda|.
/// The shape predicate is chosen from `zero_slots` (true = structural zero).
SignatureReport signature_of(const Mat4& g, const std::array<bool, 10>& zero_slots,
                             double zero_tol = 1e-12);

/// Evaluates the metric without the singularity guard so degenerate points
/// report a zero eigenvalue instead of throwing.
SignatureReport signature_at(const MetricSpec& spec, const ParamMap& params, const Point4& point);

/// Leading principal minors of orders 1..4.
std::array<double, kDim> leading_minors(const Mat4& g);
std::array<double, kDim> principal_minors(const MetricSpec& spec, const ParamMap& params,
                                          const Point4& point);
/// Closed forms of minors 2, 3, 4 of the polar time-periodic metric:
/// -(Mr)^2/(r-m)^2, K^2 (Mr)^2/(r-m)^2, -K^4 sin^2(theta) (Mr)^2/(r-m)^2.
std::array<double, 3> polar_minor_closed_forms(const TimePeriodicParams& p, const Point4& point);

/// -(Omega+)^2 sin^4(theta) K^4 r^2 / (r-m)^2
double det_closed_form(const TimePeriodicParams& p, const Point4& point);

/// Singular-set membership; "regular" when none applies.
std::vector<std::string> singular_set_classify(const TimePeriodicParams& p, const Point4& point,
                                               double tol = 1e-9);

// Horizon candidate sets f(r; t) = 0.

class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double ratio) : std::runtime_error(what), ratio_(ratio) {}
  double ratio() const { return ratio_; }

 private:
  double ratio_;
};

enum class HorizonCase { I, II };
enum class Arc { Principal, Conjugate };
const char* case_name(HorizonCase c);
const char* arc_name(Arc a);

/// f(r; t) = r + m ln|m - r| + eps sin(t - r). Throws DomainError at r = m.
double horizon_f(const TimePeriodicParams& p, double r, double t);
/// gamma(r) = r + m ln|r - m|
double horizon_gamma(const TimePeriodicParams& p, double r);

/// -m ln(m) / eps, the quantity whose magnitude must not exceed 1 for slots
/// at r = 0 to exist.
double feasibility_ratio(const TimePeriodicParams& p);

/// Time offset 2 k pi, or 2 (k+1) pi for case I with m > 1.
double branch_offset(const TimePeriodicParams& p, int k, HorizonCase c);

/// Case I: t_k at r = 0, 2k pi + arcsin(-m ln m / eps) (offset per
/// branch_offset); throws InfeasibleError when |ratio| > 1.
/// Case II: t_k at r = r0, i.e. r0 + pi/2 + 2k pi.
double horizon_time_slots(const TimePeriodicParams& p, int k, HorizonCase c);

struct HorizonExtent {
  HorizonCase which = HorizonCase::I;
  // Case I: feasible band [r_start, r_minus] inside [0, m); r_start is 0
  // unless gamma(0) > eps.
  double r_start = 0, r_minus = 0;
  // Case II: band [r0, r_plus] inside (m, inf).
  double r0 = 0, r_plus = 0;
};

/// Requires eps > 0 and m > 0. Roots of gamma = -eps / +eps by bisection to
/// full double precision.
HorizonExtent horizon_extent(const TimePeriodicParams& p, HorizonCase c);

struct HorizonBranch {
  int k = 0;
  HorizonCase which = HorizonCase::I;
  Arc arc = Arc::Principal;
  std::vector<double> r;
  std::vector<double> t;
  std::vector<double> residual;  // f(r, t(r))
  HorizonExtent extent;
  double t_start = 0, t_end = 0;  // t at the band ends
  int monotone = 0;               // +1 increasing, -1 decreasing, 0 neither
};

/// Samples t(r) = r + arcsin(-gamma/eps) + offset (principal) or
/// r + pi - arcsin(-gamma/eps) + offset (conjugate) on `samples` evenly
/// spaced radii covering the feasible band, endpoints included.
HorizonBranch trace_horizon_branch(const TimePeriodicParams& p, int k, HorizonCase c, Arc arc,
                                   std::size_t samples);

struct DiagonalForm {
  std::array<double, kDim> entries{};
  std::array<double, kDim> closed_form{};  // G, -M^2 r^2/(G (r-m)^2), -K^2, -K^2 sin^2
};

class PivotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symmetric Gaussian elimination in index order; throws PivotError on a
/// vanishing pivot.
std::array<double, kDim> congruence_diagonalize(const Mat4& g);
DiagonalForm congruence_diagonal(const TimePeriodicParams& p, const Point4& point);

struct AsymptoticRow {
  double r = 0;
  double k_over_r = 0;
  double k_over_r_predicted = 0;  // 1 + (m ln|r-m| + eps sin(t-r)) / r
  double entry0 = 0, entry1 = 0;
  double entry2_ratio = 0;  // entry2 / (-r^2)
  double entry3_ratio = 0;  // entry3 / (-r^2 sin^2 theta)
  double entry1_limit = 0;  // -M^2/G, the large-r form of entry 1
};

struct AsymptoticAudit {
  std::vector<AsymptoticRow> rows;
  // Entries 0 and 1 at the largest r for theta = pi/3 and pi/2.
  std::array<double, 2> entry0_pi3_pi2{};
  std::array<double, 2> entry1_pi3_pi2{};
};

AsymptoticAudit asymptotic_audit(const TimePeriodicParams& p, double theta, double t,
                                 const std::vector<double>& radii);

}  // namespace gva::analysis
