#include "bimetric/geometry.hpp"

#include <cmath>

namespace bimetric {

namespace {

JetMatrix zero_jets(int n) { return JetMatrix::Constant(n, n, Jet()); }

}  // namespace

PointGeometry point_geometry(const MetricScene& s, const ChartPoint& x, int order, int degree) {
  if (order < 0) throw ConfigError("series order must be non-negative");
  if (degree < 2) throw ConfigError("metric jets need degree ≥ 2 for curvature");
  PointGeometry geo;
  const int n = s.dim;
  geo.n = n;
  geo.order = order;
  geo.degree = degree;
  geo.metric = eval_metric_pair(s, x, degree);
  const bool flat_pert = geo.metric.pert_zero;

  // g(ε) = ḡ + εg̿ as a series; only the first two coefficients are nonzero.
  EpsSeries<JetMatrix> g(order, zero_jets(n));
  g[0] = geo.metric.gbar;
  if (order >= 1 && !flat_pert) g[1] = geo.metric.gpert;
  if (flat_pert) {
    geo.ginv = EpsSeries<JetMatrix>(order, zero_jets(n));
    const Eigen::MatrixXd v0 = values(g[0]);
    geo.cond = condition_number(v0);
    if (!(geo.cond <= kMaxCondition)) throw DomainError("base metric ill-conditioned at the point");
    geo.ginv[0] = jet_matrix_inverse(g[0]);
  } else {
    geo.ginv = series_matrix_inverse(g, &geo.cond);
  }

  // Christoffel symbols of the first kind, doubled:
  // S[b]_l(i, j) = ∂_i g_jl + ∂_j g_il − ∂_l g_ij for b = 0, 1.
  const int nb = (order >= 1 && !flat_pert) ? 2 : 1;
  std::vector<std::vector<JetMatrix>> dg(nb), S(nb);
  for (int b = 0; b < nb; ++b) {
    for (int l = 0; l < n; ++l) dg[b].push_back(partial(g[b], l));
    for (int l = 0; l < n; ++l) {
      JetMatrix m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m(i, j) = m(j, i) = dg[b][i](j, l) + dg[b][j](i, l) - dg[b][l](i, j);
      S[b].push_back(std::move(m));
    }
  }

  std::vector<JetMatrix> ginv_lo;
  for (int a = 0; a <= order; ++a) ginv_lo.push_back(truncate(geo.ginv[a], degree - 1));

  geo.gamma.assign(order + 1, JetRank3(n, zero_jets(n)));
  for (int m = 0; m <= order; ++m) {
    if (flat_pert && m > 0) continue;
    for (int b = 0; b < nb && b <= m; ++b) {
      const JetMatrix& gi = ginv_lo[m - b];
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) {
            Jet& acc = geo.gamma[m][k](i, j);
            for (int l = 0; l < n; ++l) acc.add_product(gi(k, l), S[b][l](i, j));
          }
    }
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          geo.gamma[m][k](i, j) = geo.gamma[m][k](i, j) * 0.5;
          geo.gamma[m][k](j, i) = geo.gamma[m][k](i, j);
        }
    }
  }

  for (int m = 0; m <= order; ++m) {
    geo.ginv_v.push_back(values(geo.ginv[m]));
    Rank3 gv;
    for (int k = 0; k < n; ++k) gv.push_back(values(geo.gamma[m][k]));
    geo.gamma_v.push_back(std::move(gv));
  }
  return geo;
}

EpsSeries<JetMatrix> inverse_metric_series(const MetricScene& s, const ChartPoint& x, int order) {
  return point_geometry(s, x, order).ginv;
}

EpsSeries<Rank3> christoffel_series(const MetricScene& s, const ChartPoint& x, int order) {
  return EpsSeries<Rank3>(point_geometry(s, x, order).gamma_v);
}

EpsSeries<double> scalar_curvature_series(const PointGeometry& geo) {
  const int n = geo.n, N = geo.order;
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  // A_jl = Σ_k ∂_k Γ^k_jl,  B_jl = Σ_k ∂_j Γ^k_kl,  c_α = Σ_k Γ^k_kα.
  std::vector<MatrixXd> A(N + 1, MatrixXd::Zero(n, n)), B(N + 1, MatrixXd::Zero(n, n));
  std::vector<VectorXd> c(N + 1, VectorXd::Zero(n));
  for (int m = 0; m <= N; ++m)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        c[m](j) += geo.gamma_v[m][k](k, j);
        for (int l = 0; l < n; ++l) {
          A[m](j, l) += geo.gamma[m][k](j, l).grad(k);
          B[m](j, l) += geo.gamma[m][k](k, l).grad(j);
        }
      }

  EpsSeries<double> r(N, 0.0);
  for (int m = 0; m <= N; ++m) {
    double acc = 0;
    for (int a = 0; a <= m; ++a) acc += geo.ginv_v[a].cwiseProduct(A[m - a] - B[m - a]).sum();
    for (int a = 0; a <= m; ++a)
      for (int p = 0; p <= m - a; ++p) {
        const int q = m - a - p;
        // C_jl = Σ_α Γ[p]^α_jl c[q]_α,  Q_jl = Σ_{k,α} Γ[p]^α_kl Γ[q]^k_jα.
        MatrixXd C = MatrixXd::Zero(n, n), Q = MatrixXd::Zero(n, n);
        for (int al = 0; al < n; ++al) {
          C += geo.gamma_v[p][al] * c[q](al);
          for (int k = 0; k < n; ++k) Q += geo.gamma_v[q][k].col(al) * geo.gamma_v[p][al].row(k);
        }
        acc += geo.ginv_v[a].cwiseProduct(C - Q).sum();
      }
    r[m] = acc;
  }
  return r;
}

EpsSeries<double> scalar_curvature_series(const MetricScene& s, const ChartPoint& x, int order) {
  return scalar_curvature_series(point_geometry(s, x, order));
}

std::pair<double, double> volume_coefficients(const Eigen::MatrixXd& G) {
  const double tr = G.trace();
  double pairs = 0;
  for (int j = 0; j < G.rows(); ++j)
    for (int l = j + 1; l < G.rows(); ++l) pairs += G(j, j) * G(l, l) - G(j, l) * G(l, j);
  return {tr / 2, pairs / 2 - tr * tr / 8};
}

VolumeSeries volume_density_series(const Eigen::MatrixXd& gbar, const Eigen::MatrixXd& gpert, int order) {
  VolumeSeries v;
  const int n = static_cast<int>(gbar.rows());
  const double det0 = gbar.determinant();
  if (!(det0 > 0)) throw DomainError("base metric has non-positive determinant");
  v.sqrt_det_gbar = std::sqrt(det0);

  const Eigen::MatrixXd G = gbar.llt().solve(gpert);
  const auto [c1, c2] = volume_coefficients(G);
  std::vector<double> closed = {1.0, c1, c2};
  closed.resize(std::min(order, 2) + 1);
  v.closed = EpsSeries<double>(closed);

  EpsSeries<Eigen::MatrixXd> g(order, Eigen::MatrixXd::Zero(n, n));
  g[0] = gbar;
  if (order >= 1) g[1] = gpert;
  v.sqrt_route = series_sqrt(scale(series_determinant(g), 1.0 / det0));
  return v;
}

VolumeSeries volume_density_series(const MetricScene& s, const ChartPoint& x, int order) {
  const Eigen::MatrixXd gb = metric_at(s, x, 0.0);
  if (!(spd_min_pivot(gb) > 0)) throw DomainError("base metric is not positive definite at the point");
  return volume_density_series(gb, metric_at(s, x, 1.0) - gb, order);
}

}  // namespace bimetric
