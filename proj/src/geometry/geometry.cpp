#include "gravaudit/geometry/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace gva::geometry {

SingularPointError::SingularPointError(const std::string& what, std::vector<std::string> tags)
    : DomainError([&] {
        std::string msg = what;
        if (!tags.empty()) {
          msg += " [singular set:";
          for (const auto& t : tags) msg += " " + t;
          msg += "]";
        }
        return msg;
      }()),
      tags_(std::move(tags)) {}

double det4(const Mat4& m) {
  const double s0 = m[0][0] * m[1][1] - m[1][0] * m[0][1];
  const double s1 = m[0][0] * m[1][2] - m[1][0] * m[0][2];
  const double s2 = m[0][0] * m[1][3] - m[1][0] * m[0][3];
  const double s3 = m[0][1] * m[1][2] - m[1][1] * m[0][2];
  const double s4 = m[0][1] * m[1][3] - m[1][1] * m[0][3];
  const double s5 = m[0][2] * m[1][3] - m[1][2] * m[0][3];
  const double c5 = m[2][2] * m[3][3] - m[3][2] * m[2][3];
  const double c4 = m[2][1] * m[3][3] - m[3][1] * m[2][3];
  const double c3 = m[2][1] * m[3][2] - m[3][1] * m[2][2];
  const double c2 = m[2][0] * m[3][3] - m[3][0] * m[2][3];
  const double c1 = m[2][0] * m[3][2] - m[3][0] * m[2][2];
  const double c0 = m[2][0] * m[3][1] - m[3][0] * m[2][1];
  return s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
}

Mat4 inverse4(const Mat4& m, double det) {
  const double s0 = m[0][0] * m[1][1] - m[1][0] * m[0][1];
  const double s1 = m[0][0] * m[1][2] - m[1][0] * m[0][2];
  const double s2 = m[0][0] * m[1][3] - m[1][0] * m[0][3];
  const double s3 = m[0][1] * m[1][2] - m[1][1] * m[0][2];
  const double s4 = m[0][1] * m[1][3] - m[1][1] * m[0][3];
  const double s5 = m[0][2] * m[1][3] - m[1][2] * m[0][3];
  const double c5 = m[2][2] * m[3][3] - m[3][2] * m[2][3];
  const double c4 = m[2][1] * m[3][3] - m[3][1] * m[2][3];
  const double c3 = m[2][1] * m[3][2] - m[3][1] * m[2][2];
  const double c2 = m[2][0] * m[3][3] - m[3][0] * m[2][3];
  const double c1 = m[2][0] * m[3][2] - m[3][0] * m[2][2];
  const double c0 = m[2][0] * m[3][1] - m[3][0] * m[2][1];
  const double k = 1.0 / det;
  Mat4 b{};
  b[0][0] = (m[1][1] * c5 - m[1][2] * c4 + m[1][3] * c3) * k;
  b[0][1] = (-m[0][1] * c5 + m[0][2] * c4 - m[0][3] * c3) * k;
  b[0][2] = (m[3][1] * s5 - m[3][2] * s4 + m[3][3] * s3) * k;
  b[0][3] = (-m[2][1] * s5 + m[2][2] * s4 - m[2][3] * s3) * k;
  b[1][0] = (-m[1][0] * c5 + m[1][2] * c2 - m[1][3] * c1) * k;
  b[1][1] = (m[0][0] * c5 - m[0][2] * c2 + m[0][3] * c1) * k;
  b[1][2] = (-m[3][0] * s5 + m[3][2] * s2 - m[3][3] * s1) * k;
  b[1][3] = (m[2][0] * s5 - m[2][2] * s2 + m[2][3] * s1) * k;
  b[2][0] = (m[1][0] * c4 - m[1][1] * c2 + m[1][3] * c0) * k;
  b[2][1] = (-m[0][0] * c4 + m[0][1] * c2 - m[0][3] * c0) * k;
  b[2][2] = (m[3][0] * s4 - m[3][1] * s2 + m[3][3] * s0) * k;
  b[2][3] = (-m[2][0] * s4 + m[2][1] * s2 - m[2][3] * s0) * k;
  b[3][0] = (-m[1][0] * c3 + m[1][1] * c1 - m[1][2] * c0) * k;
  b[3][1] = (m[0][0] * c3 - m[0][1] * c1 + m[0][2] * c0) * k;
  b[3][2] = (-m[3][0] * s3 + m[3][1] * s1 - m[3][2] * s0) * k;
  b[3][3] = (m[2][0] * s3 - m[2][1] * s1 + m[2][2] * s0) * k;
  return b;
}

namespace {

Mat4 symmetrized(const Mat4& m) {
  Mat4 out = m;
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = i + 1; j < kDim; ++j) {
      const double avg = 0.5 * (m[i][j] + m[j][i]);
      out[i][j] = out[j][i] = avg;
    }
  }
  return out;
}

std::vector<std::string> tags_for(const MetricSpec& spec, const ParamMap& params, const Point4& p) {
  if (!spec.singular_sets) return {};
  return spec.singular_sets(p, params);
}

void require_regular(const MetricSpec& spec, const ParamMap& params, const Point4& p, double det) {
  if (!(std::fabs(det) >= kSingularDetThreshold)) {
    throw SingularPointError("degenerate metric: |det g| = " + std::to_string(std::fabs(det)) +
                                 " below threshold",
                             tags_for(spec, params, p));
  }
}

// Γ^l_{mn} from metric inverse and first derivatives dg[c][a][b] = ∂_c g_ab.
using Deriv3 = std::array<Mat4, kDim>;

ChristoffelField connection_from(const Mat4& g_inv, const Deriv3& dg) {
  ChristoffelField out;
  for (std::size_t l = 0; l < kDim; ++l) {
    for (std::size_t m = 0; m < kDim; ++m) {
      for (std::size_t n = m; n < kDim; ++n) {
        double s = 0.0;
        for (std::size_t k = 0; k < kDim; ++k) {
          s += g_inv[l][k] * (dg[m][k][n] + dg[n][k][m] - dg[k][m][n]);
        }
        out.at(l, m, n) = 0.5 * s;
      }
    }
  }
  return out;
}

}  // namespace

double ChristoffelField::max_abs_gamma() const {
  double m = 0.0;
  for (double v : gamma) m = std::max(m, std::fabs(v));
  return m;
}

double CurvatureBundle::max_abs() const {
  double m = std::max(std::fabs(scalar), std::fabs(kretschmann));
  for (double v : riemann_low) m = std::max(m, std::fabs(v));
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = 0; j < kDim; ++j) {
      m = std::max({m, std::fabs(ricci[i][j]), std::fabs(einstein[i][j])});
    }
  }
  return m;
}

Mat4 metric_values(const MetricSpec& spec, const ParamMap& params, const Point4& point) {
  spec.check_point(point, params);
  Mat4 g{};
  try {
    for (std::size_t i = 0; i < kDim; ++i) {
      for (std::size_t j = i; j < kDim; ++j) {
        const auto& e = spec.slot(i, j);
        g[i][j] = g[j][i] = e ? eval_value(*e, point, params) : 0.0;
      }
    }
  } catch (const ChartDomainError&) {
    throw;
  } catch (const DomainError& err) {
    throw SingularPointError(err.what(), tags_for(spec, params, point));
  }
  return g;
}

MetricValue metric_at(const MetricSpec& spec, const ParamMap& params, const Point4& point) {
  spec.check_point(point, params);
  MetricValue mv;
  try {
    for (std::size_t i = 0; i < kDim; ++i) {
      for (std::size_t j = i; j < kDim; ++j) {
        const auto& e = spec.slot(i, j);
        const Jet2 jet = e ? eval_jet2(*e, point, params) : Jet2{};
        mv.jets[sym_index(i, j)] = jet;
        mv.g[i][j] = mv.g[j][i] = jet.value;
      }
    }
  } catch (const ChartDomainError&) {
    throw;
  } catch (const DomainError& err) {
    throw SingularPointError(err.what(), tags_for(spec, params, point));
  }
  mv.det = det4(mv.g);
  require_regular(spec, params, point, mv.det);
  mv.g_inv = symmetrized(inverse4(mv.g, mv.det));
  return mv;
}

ChristoffelField christoffel_at(const MetricSpec& spec, const ParamMap& params, const Point4& point) {
  const MetricValue mv = metric_at(spec, params, point);
  Deriv3 dg{};
  for (std::size_t c = 0; c < kDim; ++c) {
    for (std::size_t a = 0; a < kDim; ++a) {
      for (std::size_t b = 0; b < kDim; ++b) dg[c][a][b] = mv.jets[sym_index(a, b)].d(c);
    }
  }
  ChristoffelField out = connection_from(mv.g_inv, dg);

  // ∂_c g^{lk} = -g^{la} ∂_c g_ab g^{bk}
  Deriv3 dginv{};
  for (std::size_t c = 0; c < kDim; ++c) {
    Mat4 tmp{};
    for (std::size_t l = 0; l < kDim; ++l) {
      for (std::size_t b = 0; b < kDim; ++b) {
        double s = 0.0;
        for (std::size_t a = 0; a < kDim; ++a) s += mv.g_inv[l][a] * dg[c][a][b];
        tmp[l][b] = s;
      }
    }
    for (std::size_t l = 0; l < kDim; ++l) {
      for (std::size_t k = 0; k < kDim; ++k) {
        double s = 0.0;
        for (std::size_t b = 0; b < kDim; ++b) s += tmp[l][b] * mv.g_inv[b][k];
        dginv[c][l][k] = -s;
      }
    }
  }

  auto ddg = [&](std::size_t c, std::size_t d, std::size_t a, std::size_t b) {
    return mv.jets[sym_index(a, b)].dd(c, d);
  };
  for (std::size_t c = 0; c < kDim; ++c) {
    for (std::size_t l = 0; l < kDim; ++l) {
      for (std::size_t m = 0; m < kDim; ++m) {
        for (std::size_t n = m; n < kDim; ++n) {
          double s = 0.0;
          for (std::size_t k = 0; k < kDim; ++k) {
            const double bracket = dg[m][k][n] + dg[n][k][m] - dg[k][m][n];
            const double dbracket = ddg(c, m, k, n) + ddg(c, n, k, m) - ddg(c, k, m, n);
            s += dginv[c][l][k] * bracket + mv.g_inv[l][k] * dbracket;
          }
          out.d(c, l, m, n) = 0.5 * s;
        }
      }
    }
  }
  return out;
}

CurvatureBundle assemble_curvature(const Mat4& g, const Mat4& g_inv, const ChristoffelField& conn) {
  using Idx = std::size_t;
  std::array<double, 256> up{};  // R^r_{smn}
  for (Idx r = 0; r < kDim; ++r) {
    for (Idx s = 0; s < kDim; ++s) {
      for (Idx m = 0; m < kDim; ++m) {
        for (Idx n = 0; n < kDim; ++n) {
          double v = conn.d(m, r, n, s) - conn.d(n, r, m, s);
          for (Idx l = 0; l < kDim; ++l) {
            v += conn.at(r, m, l) * conn.at(l, n, s) - conn.at(r, n, l) * conn.at(l, m, s);
          }
          up[CurvatureBundle::index(r, s, m, n)] = v;
        }
      }
    }
  }

  CurvatureBundle out;
  for (Idx a = 0; a < kDim; ++a) {
    for (Idx s = 0; s < kDim; ++s) {
      for (Idx m = 0; m < kDim; ++m) {
        for (Idx n = 0; n < kDim; ++n) {
          double v = 0.0;
          for (Idx r = 0; r < kDim; ++r) v += g[a][r] * up[CurvatureBundle::index(r, s, m, n)];
          out.riemann_low[CurvatureBundle::index(a, s, m, n)] = v;
        }
      }
    }
  }

  for (Idx s = 0; s < kDim; ++s) {
    for (Idx n = 0; n < kDim; ++n) {
      double v = 0.0;
      for (Idx m = 0; m < kDim; ++m) v += up[CurvatureBundle::index(m, s, n, m)];
      out.ricci[s][n] = v;
    }
  }
  out.scalar = 0.0;
  for (Idx s = 0; s < kDim; ++s) {
    for (Idx n = 0; n < kDim; ++n) out.scalar += g_inv[s][n] * out.ricci[s][n];
  }
  for (Idx s = 0; s < kDim; ++s) {
    for (Idx n = 0; n < kDim; ++n) out.einstein[s][n] = out.ricci[s][n] - 0.5 * g[s][n] * out.scalar;
  }

  // Raise all four indices one at a time, then contract.
  std::array<double, 256> raised = out.riemann_low;
  for (int slot = 0; slot < 4; ++slot) {
    std::array<double, 256> next{};
    for (Idx a = 0; a < kDim; ++a) {
      for (Idx b = 0; b < kDim; ++b) {
        for (Idx c = 0; c < kDim; ++c) {
          for (Idx d = 0; d < kDim; ++d) {
            std::array<Idx, 4> idx{a, b, c, d};
            const Idx free = idx[slot];
            double v = 0.0;
            for (Idx e = 0; e < kDim; ++e) {
              idx[slot] = e;
              v += g_inv[free][e] * raised[CurvatureBundle::index(idx[0], idx[1], idx[2], idx[3])];
            }
            next[CurvatureBundle::index(a, b, c, d)] = v;
          }
        }
      }
    }
    raised = next;
  }
  out.kretschmann = 0.0;
  for (Idx i = 0; i < 256; ++i) out.kretschmann += raised[i] * out.riemann_low[i];
  return out;
}

CurvatureBundle curvature_at(const MetricSpec& spec, const ParamMap& params, const Point4& point) {
  const MetricValue mv = metric_at(spec, params, point);
  const ChristoffelField conn = christoffel_at(spec, params, point);
  return assemble_curvature(mv.g, mv.g_inv, conn);
}

Mat4 field_residual_at(const MetricSpec& spec, const ParamMap& params, const Point4& point,
                       double lambda) {
  const MetricValue mv = metric_at(spec, params, point);
  const CurvatureBundle b = assemble_curvature(mv.g, mv.g_inv, christoffel_at(spec, params, point));
  Mat4 out{};
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = 0; j < kDim; ++j) out[i][j] = b.einstein[i][j] + lambda * mv.g[i][j];
  }
  return out;
}

namespace {

struct FdMetric {
  Mat4 g;
  Mat4 g_inv;
};

FdMetric fd_metric(const MetricSpec& spec, const ParamMap& params, const Point4& p) {
  FdMetric m;
  m.g = metric_values(spec, params, p);
  const double det = det4(m.g);
  require_regular(spec, params, p, det);
  m.g_inv = symmetrized(inverse4(m.g, det));
  return m;
}

// Γ at p from central differences of metric values.
ChristoffelField fd_gamma(const MetricSpec& spec, const ParamMap& params, const Point4& p, double h) {
  const FdMetric center = fd_metric(spec, params, p);
  Deriv3 dg{};
  for (std::size_t c = 0; c < kDim; ++c) {
    Point4 up = p, dn = p;
    up[c] += h;
    dn[c] -= h;
    const Mat4 gu = metric_values(spec, params, up);
    const Mat4 gd = metric_values(spec, params, dn);
    for (std::size_t a = 0; a < kDim; ++a) {
      for (std::size_t b = 0; b < kDim; ++b) dg[c][a][b] = (gu[a][b] - gd[a][b]) / (2.0 * h);
    }
  }
  return connection_from(center.g_inv, dg);
}

ChristoffelField fd_connection(const MetricSpec& spec, const ParamMap& params, const Point4& p, double h) {
  ChristoffelField out = fd_gamma(spec, params, p, h);
  for (std::size_t k = 0; k < kDim; ++k) {
    Point4 up = p, dn = p;
    up[k] += h;
    dn[k] -= h;
    const ChristoffelField gu = fd_gamma(spec, params, up, h);
    const ChristoffelField gd = fd_gamma(spec, params, dn, h);
    for (std::size_t i = 0; i < 40; ++i) out.dgamma[k * 40 + i] = (gu.gamma[i] - gd.gamma[i]) / (2.0 * h);
  }
  return out;
}

}  // namespace

CurvatureBundle fd_curvature_oracle(const MetricSpec& spec, const ParamMap& params, const Point4& point,
                                    FdOptions options) {
  const FdMetric center = fd_metric(spec, params, point);
  ChristoffelField conn = fd_connection(spec, params, point, options.step);
  if (options.richardson) {
    const ChristoffelField fine = fd_connection(spec, params, point, options.step / 2.0);
    for (std::size_t i = 0; i < conn.gamma.size(); ++i) {
      conn.gamma[i] = (4.0 * fine.gamma[i] - conn.gamma[i]) / 3.0;
    }
    for (std::size_t i = 0; i < conn.dgamma.size(); ++i) {
      conn.dgamma[i] = (4.0 * fine.dgamma[i] - conn.dgamma[i]) / 3.0;
    }
  }
  return assemble_curvature(center.g, center.g_inv, conn);
}

double curvature_term_scale(const ChristoffelField& conn) {
  double d = 0.0;
  for (double v : conn.dgamma) d = std::max(d, std::fabs(v));
  const double g = conn.max_abs_gamma();
  return std::max(g * g, d);
}

double bundle_discrepancy(const CurvatureBundle& reference, const CurvatureBundle& other,
                          double term_scale) {
  double worst = std::max(std::fabs(reference.scalar - other.scalar),
                          std::fabs(reference.kretschmann - other.kretschmann));
  for (std::size_t i = 0; i < 256; ++i) {
    worst = std::max(worst, std::fabs(reference.riemann_low[i] - other.riemann_low[i]));
  }
  for (std::size_t i = 0; i < kDim; ++i) {
    for (std::size_t j = 0; j < kDim; ++j) {
      worst = std::max({worst, std::fabs(reference.ricci[i][j] - other.ricci[i][j]),
                        std::fabs(reference.einstein[i][j] - other.einstein[i][j])});
    }
  }
  return worst / (1.0 + std::max(reference.max_abs(), term_scale));
}

double fd_convergence_ratio(const MetricSpec& spec, const ParamMap& params, const Point4& point,
                            double step) {
  const CurvatureBundle exact = curvature_at(spec, params, point);
  auto err = [&](double h) {
    const CurvatureBundle fd = fd_curvature_oracle(spec, params, point, FdOptions{h, false});
    double worst = 0.0;
    for (std::size_t i = 0; i < 256; ++i) {
      worst = std::max(worst, std::fabs(fd.riemann_low[i] - exact.riemann_low[i]));
    }
    return worst;
  };
  return err(step) / err(step / 2.0);
}

RiemannSymmetryResiduals riemann_symmetry_residuals(const CurvatureBundle& b) {
  RiemannSymmetryResiduals r;
  double scale = 0.0;
  for (double v : b.riemann_low) scale = std::max(scale, std::fabs(v));
  scale += 1.0;
  for (std::size_t a = 0; a < kDim; ++a) {
    for (std::size_t c1 = 0; c1 < kDim; ++c1) {
      for (std::size_t c2 = 0; c2 < kDim; ++c2) {
        for (std::size_t d = 0; d < kDim; ++d) {
          const double v = b.riemann(a, c1, c2, d);
          r.antisym_first = std::max(r.antisym_first, std::fabs(v + b.riemann(c1, a, c2, d)));
          r.antisym_second = std::max(r.antisym_second, std::fabs(v + b.riemann(a, c1, d, c2)));
          r.pair_exchange = std::max(r.pair_exchange, std::fabs(v - b.riemann(c2, d, a, c1)));
          r.first_bianchi = std::max(
              r.first_bianchi, std::fabs(v + b.riemann(a, c2, d, c1) + b.riemann(a, d, c1, c2)));
        }
      }
    }
  }
  r.antisym_first /= scale;
  r.antisym_second /= scale;
  r.pair_exchange /= scale;
  r.first_bianchi /= scale;
  return r;
}

std::array<double, kDim> einstein_divergence_fd(const MetricSpec& spec, const ParamMap& params,
                                                const Point4& point, double step) {
  const MetricValue mv = metric_at(spec, params, point);
  const ChristoffelField conn = christoffel_at(spec, params, point);
  const Mat4 G = field_residual_at(spec, params, point, 0.0);
  std::array<Mat4, kDim> dG{};
  for (std::size_t a = 0; a < kDim; ++a) {
    Point4 up = point, dn = point;
    up[a] += step;
    dn[a] -= step;
    const Mat4 gu = field_residual_at(spec, params, up, 0.0);
    const Mat4 gd = field_residual_at(spec, params, dn, 0.0);
    for (std::size_t i = 0; i < kDim; ++i) {
      for (std::size_t j = 0; j < kDim; ++j) dG[a][i][j] = (gu[i][j] - gd[i][j]) / (2.0 * step);
    }
  }
  std::array<double, kDim> div{};
  for (std::size_t n = 0; n < kDim; ++n) {
    double s = 0.0;
    for (std::size_t a = 0; a < kDim; ++a) {
      for (std::size_t m = 0; m < kDim; ++m) {
        double cov = dG[a][m][n];
        for (std::size_t l = 0; l < kDim; ++l) {
          cov -= conn.at(l, a, m) * G[l][n] + conn.at(l, a, n) * G[m][l];
        }
        s += mv.g_inv[a][m] * cov;
      }
    }
    div[n] = s;
  }
  return div;
}

}  // namespace gva::geometry
