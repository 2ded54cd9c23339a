#include "bimetric/operators.hpp"

#include <cmath>

namespace bimetric {

std::vector<Eigen::MatrixXd> hessian_series(const PointGeometry& geo, const EpsSeries<Jet>& field) {
  const int n = geo.n, N = geo.order;
  if (field.order() != N) throw std::invalid_argument("hessian_series: order mismatch");
  std::vector<Eigen::MatrixXd> H(N + 1, Eigen::MatrixXd::Zero(n, n));
  for (int c = 0; c <= N; ++c) {
    const Jet& F = field[c];
    if (F.is_plain()) continue;  // constant in space: no derivatives
    Eigen::VectorXd grad(n);
    for (int k = 0; k < n; ++k) grad(k) = F.d({k});
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) H[c](i, j) += F.d({i, j});
    for (int b = 0; b + c <= N; ++b)
      for (int k = 0; k < n; ++k) {
        if (grad(k) == 0) continue;
        H[b + c].triangularView<Eigen::Upper>() -= grad(k) * geo.gamma_v[b][k];
      }
  }
  for (auto& h : H) h.triangularView<Eigen::StrictlyLower>() = h.transpose();
  return H;
}

EpsSeries<double> laplacian_series(const PointGeometry& geo, const EpsSeries<Jet>& field) {
  const std::vector<Eigen::MatrixXd> H = hessian_series(geo, field);
  EpsSeries<double> out(geo.order, 0.0);
  for (int m = 0; m <= geo.order; ++m) {
    double acc = 0;
    for (int a = 0; a <= m; ++a) acc += geo.ginv_v[a].cwiseProduct(H[m - a]).sum();
    out[m] = -acc;
  }
  return out;
}

EpsSeries<Jet> constant_field(const Jet& u, int order) {
  EpsSeries<Jet> f(order, Jet());
  f[0] = u;
  return f;
}

EpsSeries<double> laplacian_series_apply(const PointGeometry& geo, const Jet& u) {
  return laplacian_series(geo, constant_field(u, geo.order));
}

EpsSeries<double> laplacian_series_apply(const MetricScene& s, const ChartPoint& x, const Expr& u, int order) {
  const PointGeometry geo = point_geometry(s, x, order);
  return laplacian_series_apply(geo, jet_eval(u, x.data(), s.dim, 2));
}

EpsSeries<double> conformal_laplacian_series_apply(const PointGeometry& geo, const EpsSeries<double>& r,
                                                   const Jet& u) {
  EpsSeries<double> out = laplacian_series_apply(geo, u);
  const double c = conformal_coupling(geo.n);
  for (int k = 0; k <= geo.order; ++k) out[k] += c * r[k] * u.value();
  return out;
}

EpsSeries<double> conformal_laplacian_series_apply(const MetricScene& s, const ChartPoint& x, const Expr& u,
                                                   int order) {
  const PointGeometry geo = point_geometry(s, x, order);
  return conformal_laplacian_series_apply(geo, scalar_curvature_series(geo), jet_eval(u, x.data(), s.dim, 2));
}

const char* convention_name(Convention c) { return c == Convention::Direct ? "direct" : "yamabe"; }

IntertwiningResult intertwining_residuals(const MetricScene& s, const ChartPoint& x, const Expr& u, const Expr& f,
                                          Convention convention, int order) {
  const int n = s.dim;
  if (n < 3) throw ConfigError("intertwining check needs dimension ≥ 3");
  const double fx = eval(f, x.data());
  if (!(fx > 0)) throw DomainError("conformal factor is not positive at the point");

  const Expr metric_factor = convention == Convention::Direct ? f : rpow(f, 4.0 / (n - 2.0));
  const MetricScene scaled = scaled_scene(s, metric_factor);
  const Expr weighted_u = mul(rpow(f, (n - 2.0) / 4.0), u);

  const EpsSeries<double> lhs = conformal_laplacian_series_apply(scaled, x, u, order);
  const EpsSeries<double> rhs = conformal_laplacian_series_apply(s, x, weighted_u, order);
  const double w = std::pow(fx, (n + 2.0) / 4.0);

  IntertwiningResult res;
  res.convention = convention;
  for (int k = 0; k <= order; ++k) {
    IntertwiningOrder o;
    o.lhs = w * lhs[k];
    o.rhs = rhs[k];
    o.residual = std::abs(o.lhs - o.rhs);
    res.orders.push_back(o);
  }
  return res;
}

}  // namespace bimetric
