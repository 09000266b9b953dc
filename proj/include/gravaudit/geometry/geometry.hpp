#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "gravaudit/dsl/document.hpp"

namespace gva::geometry {

using Mat4 = std::array<std::array<double, kDim>, kDim>;

/// Metric is degenerate (|det| below threshold) or a component is undefined
/// at the point. `tags` names the known singular sets containing the point,
/// when the metric carries that diagnostic.
class SingularPointError : public DomainError {
 public:
  SingularPointError(const std::string& what, std::vector<std::string> tags);
  const std::vector<std::string>& tags() const { return tags_; }

 private:
  std::vector<std::string> tags_;
};

inline constexpr double kSingularDetThreshold = 1e-14;

double det4(const Mat4& m);
/// Inverse by cofactor expansion; `det` must be det4(m).
Mat4 inverse4(const Mat4& m, double det);

struct MetricValue {
  Mat4 g{};
  Mat4 g_inv{};
  double det = 0.0;
  std::array<Jet2, 10> jets{};
};

/// Component values only; no determinant or singularity test.
Mat4 metric_values(const MetricSpec& spec, const ParamMap& params, const Point4& point);

MetricValue metric_at(const MetricSpec& spec, const ParamMap& params, const Point4& point);

/// Levi-Civita connection Γ^λ_{μν} and its coordinate derivatives ∂_κ Γ^λ_{μν}.
struct ChristoffelField {
  std::array<double, 40> gamma{};
  std::array<double, 160> dgamma{};

  double at(std::size_t l, std::size_t m, std::size_t n) const { return gamma[l * 10 + sym_index(m, n)]; }
  double& at(std::size_t l, std::size_t m, std::size_t n) { return gamma[l * 10 + sym_index(m, n)]; }
  /// ∂_k Γ^l_{mn}
  double d(std::size_t k, std::size_t l, std::size_t m, std::size_t n) const {
    return dgamma[(k * kDim + l) * 10 + sym_index(m, n)];
  }
  double& d(std::size_t k, std::size_t l, std::size_t m, std::size_t n) {
    return dgamma[(k * kDim + l) * 10 + sym_index(m, n)];
  }
  double max_abs_gamma() const;
};

/// R_{abcd} is stored in full (256 entries) so symmetry audits see every slot.
struct CurvatureBundle {
  std::array<double, 256> riemann_low{};
  Mat4 ricci{};
  double scalar = 0.0;
  Mat4 einstein{};
  double kretschmann = 0.0;

  static constexpr std::size_t index(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    return ((a * kDim + b) * kDim + c) * kDim + d;
  }
  double riemann(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
    return riemann_low[index(a, b, c, d)];
  }
  double max_abs() const;
};

ChristoffelField christoffel_at(const MetricSpec& spec, const ParamMap& params, const Point4& point);

/// Riemann, Ricci, scalar, Einstein and Kretschmann from a metric and its
/// connection. Conventions:
///   R^r_{smn} = ∂_m Γ^r_{ns} - ∂_n Γ^r_{ms} + Γ^r_{ml} Γ^l_{ns} - Γ^r_{nl} Γ^l_{ms}
///   R_{sn}    = R^m_{snm}
/// The Ricci contraction on the last index makes G_{11} of a Type-I metric
/// equal the closed form used by the constructor module.
CurvatureBundle assemble_curvature(const Mat4& g, const Mat4& g_inv, const ChristoffelField& conn);

CurvatureBundle curvature_at(const MetricSpec& spec, const ParamMap& params, const Point4& point);

/// G_{μν} + Λ g_{μν}
Mat4 field_residual_at(const MetricSpec& spec, const ParamMap& params, const Point4& point,
                       double lambda);

struct FdOptions {
  double step = 1e-3;
  bool richardson = true;
};

/// Curvature from metric values only: Γ by central differences of g, ∂Γ by
/// central differences of that Γ, optionally Richardson-extrapolated over
/// step and step/2.
CurvatureBundle fd_curvature_oracle(const MetricSpec& spec, const ParamMap& params,
                                    const Point4& point, FdOptions options = {});

/// Magnitude of the terms Riemann is assembled from: max(|Γ|^2, |∂Γ|).
/// For a flat metric in curved coordinates these stay large while R cancels
/// to zero, so they set the scale finite differences can resolve.
double curvature_term_scale(const ChristoffelField& conn);

/// Max over Riemann, Ricci, Einstein, scalar and Kretschmann of |a - b|,
/// divided by 1 + max(largest |component| of `reference`, `term_scale`).
double bundle_discrepancy(const CurvatureBundle& reference, const CurvatureBundle& other,
                          double term_scale = 0.0);

/// Max |R_abcd| error of the unextrapolated oracle at `step` divided by the
/// same at `step / 2`. Second-order differences give a ratio near 4.
double fd_convergence_ratio(const MetricSpec& spec, const ParamMap& params, const Point4& point,
                            double step);

struct RiemannSymmetryResiduals {
  double antisym_first = 0.0;   // R_abcd + R_bacd
  double antisym_second = 0.0;  // R_abcd + R_abdc
  double pair_exchange = 0.0;   // R_abcd - R_cdab
  double first_bianchi = 0.0;   // R_abcd + R_acdb + R_adbc
};

/// Absolute maxima divided by (1 + max |R|).
RiemannSymmetryResiduals riemann_symmetry_residuals(const CurvatureBundle& b);

/// ∇^μ G_{μν} with ∂G from central differences of the jet-pipeline Einstein
/// tensor.
std::array<double, kDim> einstein_divergence_fd(const MetricSpec& spec, const ParamMap& params,
                                                const Point4& point, double step);

}  // namespace gva::geometry
