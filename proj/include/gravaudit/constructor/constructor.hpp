#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gravaudit/dsl/document.hpp"
#include "gravaudit/geometry/geometry.hpp"

namespace gva::constructor {

/// Type-I metric with the x-role played by the second chart coordinate:
///   u v p q
///   v 0 0 0
///   p 0 rho 0
///   q 0 0 sigma
/// Absent entries of u, p, q are zero; v may be unknown.
struct TypeITemplate {
  Chart chart;
  std::vector<std::pair<std::string, double>> params;
  std::optional<Expr> u, p, q;
  Expr rho, sigma;
  std::optional<Expr> v;
  /// Integration function v0(t, y, z); used when building v from an ansatz.
  std::optional<Expr> v0;

  MetricSpec to_spec() const;  // requires v
};

/// Reads a Type-I template from a spec; the (0,1) slot becomes v when
/// present. Throws std::invalid_argument when the zero pattern is not Type I
/// or rho / sigma are missing.
TypeITemplate template_from_spec(const MetricSpec& spec);

/// rho = rho~ exp(2 f), sigma = sigma~ exp(2 f).
struct AnsatzSpec {
  Chart chart;
  std::vector<std::pair<std::string, double>> params;
  Expr rho_tilde, sigma_tilde;  // in (t, y, z)
  Expr f;                       // in (t, x)
  Expr v0;                      // in (t, y, z)
};

/// Chart (t, x, y, z), rho~ = sigma~ = -1, v0 = 1, u = 1 and f parsed from
/// `f_text`.
AnsatzSpec simple_ansatz(const std::string& f_text);

/// Template with rho, sigma from the ansatz and u defaulting to 1. v stays
/// unknown unless given; the DSL has no symbolic differentiation, so a
/// closed-form v0 f_x e^f must be written out by the caller.
TypeITemplate template_from_ansatz(const AnsatzSpec& a, std::optional<Expr> v = {},
                                   std::optional<Expr> u = {});

/// v0 f_x e^f via jets.
double v_from_ansatz(const AnsatzSpec& a, const ParamMap& params, const Point4& point);

/// -1/2 { (v_x/v)(rho_x/rho + sigma_x/sigma) + 1/2[(rho_x/rho)^2 + (sigma_x/sigma)^2]
///        - (rho_xx/rho + sigma_xx/sigma) }
double g11_closed_form(const TypeITemplate& tpl, const ParamMap& params, const Point4& point);

class ProvisoError : public DomainError {
 public:
  ProvisoError(const std::string& what, double x) : DomainError(what), x_(x) {}
  double x() const { return x_; }

 private:
  double x_;
};

class QuadratureError : public DomainError {
 public:
  using DomainError::DomainError;
};

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_depth = 40;
};

/// Adaptive Simpson with local Richardson correction. Throws
/// QuadratureError on step underflow, non-finite values or depth exhaustion.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opt = {});

struct VSample {
  double x = 0;
  double v = 0;
};

/// v(x) = v(x0) exp(integral from x0 to x of the G11 = 0 integrand) on
/// `grid` evenly spaced points of [x_lo, x_hi]. `base` supplies t, y, z.
/// Throws ProvisoError where (rho sigma)_x vanishes at a quadrature node.
std::vector<VSample> solve_v(const TypeITemplate& tpl, const ParamMap& params, const Point4& base,
                             double x_lo, double x_hi, double x0, double v_x0, std::size_t grid,
                             const QuadratureOptions& opt = {});

struct CascadeRow {
  std::string label;             // e.g. "G11", "G22+L*g22"
  std::size_t mu = 0, nu = 0;
  std::vector<double> jet;       // G_{mu nu} + Lambda g_{mu nu} per point
  std::vector<double> oracle;    // same from the finite-difference oracle
};

struct CascadeReport {
  double lambda = 0;
  std::vector<CascadeRow> rows;  // construction order
};

/// Residuals of each field equation in the order the construction solves
/// them: 11, 12, 13, 23, 22, 33, 01, 02, 03, 00.
CascadeReport cascade_residual_report(const MetricSpec& spec, const ParamMap& params, double lambda,
                                      const std::vector<Point4>& points, std::size_t jobs = 1);

}  // namespace gva::constructor
