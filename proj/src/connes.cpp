#include "bimetric/connes.hpp"

#include <cmath>

namespace bimetric {

namespace {

void require_four(int n) {
  if (n != 4) throw ConfigError("Connes density operations need dimension 4, got " + std::to_string(n));
}

Jet probe_jet(const Jet& f) {
  if (f.is_plain()) return f;
  if (f.degree() < kProbeDegree) throw std::invalid_argument("probe jets need degree ≥ 3");
  return f.truncate(kProbeDegree);
}

Eigen::VectorXd gradient(const Jet& f, int n) {
  Eigen::VectorXd g(n);
  for (int k = 0; k < n; ++k) g(k) = f.d({k});
  return g;
}

// M[m] = Σ_{a+b=m} g^{-1}[a] H[b]
std::vector<Eigen::MatrixXd> raise_series(const PointGeometry& geo, const std::vector<Eigen::MatrixXd>& H) {
  std::vector<Eigen::MatrixXd> M(geo.order + 1, Eigen::MatrixXd::Zero(geo.n, geo.n));
  for (int a = 0; a <= geo.order; ++a)
    for (int b = 0; a + b <= geo.order; ++b) M[a + b].noalias() += geo.ginv_v[a] * H[b];
  return M;
}

struct ProbeJets {
  PointGeometry geo;
  Jet f1, f2;
};

ProbeJets probe_setup(const MetricScene& s, const ChartPoint& x, const Expr& f1, const Expr& f2, int order) {
  require_four(s.dim);
  return {point_geometry(s, x, order), jet_eval(f1, x.data(), s.dim, kProbeDegree),
          jet_eval(f2, x.data(), s.dim, kProbeDegree)};
}

}  // namespace

EpsSeries<double> gradient_pairing_series(const PointGeometry& geo, const Jet& f1, const Jet& f2) {
  require_four(geo.n);
  const Eigen::VectorXd g1 = gradient(f1, geo.n), g2 = gradient(f2, geo.n);
  EpsSeries<double> t(geo.order, 0.0);
  for (int k = 0; k <= geo.order; ++k) t[k] = g1.dot(geo.ginv_v[k] * g2);
  return t;
}

EpsSeries<double> laplacian_of_pairing_series(const PointGeometry& geo, const Jet& f1, const Jet& f2) {
  require_four(geo.n);
  const int n = geo.n;
  const Jet p1 = probe_jet(f1), p2 = probe_jet(f2);
  EpsSeries<Jet> pairing(geo.order, Jet());
  if (p1.is_plain() || p2.is_plain()) return laplacian_series(geo, pairing);
  std::vector<Jet> d1(n), d2(n);
  for (int k = 0; k < n; ++k) {
    d1[k] = p1.partial(k);
    d2[k] = p2.partial(k);
  }
  for (int m = 0; m <= geo.order; ++m) {
    const JetMatrix gi = truncate(geo.ginv[m], 2);
    Jet acc = Jet::constant(n, 2, 0.0);
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) acc = acc + d1[j] * d2[l] * gi(j, l);
    pairing[m] = acc;
  }
  return laplacian_series(geo, pairing);
}

EpsSeries<double> hessian_pairing_series(const PointGeometry& geo, const Jet& f1, const Jet& f2) {
  require_four(geo.n);
  const auto M1 = raise_series(geo, hessian_series(geo, constant_field(f1, geo.order)));
  const auto M2 = raise_series(geo, hessian_series(geo, constant_field(f2, geo.order)));
  EpsSeries<double> b(geo.order, 0.0);
  // tr(g⁻¹H₁ g⁻¹H₂) with both Hessians symmetric
  for (int i = 0; i <= geo.order; ++i)
    for (int j = 0; i + j <= geo.order; ++j) b[i + j] += M1[i].cwiseProduct(M2[j].transpose()).sum();
  return b;
}

EpsSeries<double> laplacian_product_series(const PointGeometry& geo, const Jet& f1, const Jet& f2) {
  require_four(geo.n);
  return series_mul(laplacian_series_apply(geo, f1), laplacian_series_apply(geo, f2));
}

EpsSeries<double> gradient_pairing_series(const MetricScene& s, const ChartPoint& x, const Expr& f1, const Expr& f2,
                                          int order) {
  const ProbeJets p = probe_setup(s, x, f1, f2, order);
  return gradient_pairing_series(p.geo, p.f1, p.f2);
}

EpsSeries<double> laplacian_of_pairing_series(const MetricScene& s, const ChartPoint& x, const Expr& f1,
                                              const Expr& f2, int order) {
  const ProbeJets p = probe_setup(s, x, f1, f2, order);
  return laplacian_of_pairing_series(p.geo, p.f1, p.f2);
}

EpsSeries<double> hessian_pairing_series(const MetricScene& s, const ChartPoint& x, const Expr& f1, const Expr& f2,
                                         int order) {
  const ProbeJets p = probe_setup(s, x, f1, f2, order);
  return hessian_pairing_series(p.geo, p.f1, p.f2);
}

EpsSeries<double> laplacian_product_series(const MetricScene& s, const ChartPoint& x, const Expr& f1,
                                           const Expr& f2, int order) {
  const ProbeJets p = probe_setup(s, x, f1, f2, order);
  return laplacian_product_series(p.geo, p.f1, p.f2);
}

double A4Series::part_scale(int k) const {
  double m = 0;
  for (double v : parts.at(k)) m = std::max(m, std::abs(v));
  return m;
}

A4Series a4_density_series(const PointGeometry& geo, const Jet& f1, const Jet& f2) {
  require_four(geo.n);
  A4Series s;
  s.r = scalar_curvature_series(geo);
  s.t = gradient_pairing_series(geo, f1, f2);
  s.a = laplacian_of_pairing_series(geo, f1, f2);
  s.b = hessian_pairing_series(geo, f1, f2);
  s.d = laplacian_product_series(geo, f1, f2);
  const EpsSeries<double> rt = series_mul(s.r, s.t);
  s.total = EpsSeries<double>(geo.order, 0.0);
  for (int k = 0; k <= geo.order; ++k) {
    const std::array<double, 4> p = {rt[k] / 3.0, s.a[k], s.b[k], -0.5 * s.d[k]};
    s.parts.push_back(p);
    s.total[k] = p[0] + p[1] + p[2] + p[3];
  }
  return s;
}

A4Series a4_density_series(const MetricScene& s, const ChartPoint& x, const Expr& f1, const Expr& f2, int order) {
  const ProbeJets p = probe_setup(s, x, f1, f2, order);
  return a4_density_series(p.geo, p.f1, p.f2);
}

std::vector<CovarianceOrder> conformal_covariance_residual(const MetricScene& s, const ChartPoint& x,
                                                           const Expr& f1, const Expr& f2, const Expr& f,
                                                           int order) {
  require_four(s.dim);
  const double fx = eval(f, x.data());
  if (!(fx > 0)) throw DomainError("conformal factor is not positive at the point");
  const A4Series base = a4_density_series(s, x, f1, f2, order);
  const A4Series scaled = a4_density_series(scaled_scene(s, f), x, f1, f2, order);
  const double w = 1.0 / (fx * fx);
  std::vector<CovarianceOrder> out;
  for (int k = 0; k <= order; ++k) {
    CovarianceOrder o;
    o.scaled = scaled.total[k];
    o.reference = w * base.total[k];
    o.residual = std::abs(o.scaled - o.reference);
    o.scale = std::max(scaled.part_scale(k), w * base.part_scale(k));
    o.relative = o.residual == 0 ? 0 : o.residual / o.scale;
    out.push_back(o);
  }
  return out;
}

InvariantDensityGrid bimetric_invariant_grid(const MetricScene& s, const ChartPoint& x, const Expr& f1,
                                             const Expr& f2) {
  require_four(s.dim);
  const A4Series a4 = a4_density_series(s, x, f1, f2, 2);
  const VolumeSeries vol = volume_density_series(s, x, 2);
  InvariantDensityGrid g;
  for (int j = 0; j < 3; ++j) {
    g.scale[j] = a4.part_scale(j) * vol.sqrt_det_gbar;
    for (int l = 0; l < 3; ++l) g.entry[j][l] = a4.total[j] * vol.closed[l] * vol.sqrt_det_gbar;
  }
  return g;
}

GridComparison compare_invariant_grids(const MetricScene& s, const ChartPoint& x, const Expr& f1, const Expr& f2,
                                       const Expr& f) {
  const double fx = eval(f, x.data());
  if (!(fx > 0)) throw DomainError("conformal factor is not positive at the point");
  GridComparison c;
  c.reference = bimetric_invariant_grid(s, x, f1, f2);
  c.scaled = bimetric_invariant_grid(scaled_scene(s, f), x, f1, f2);
  const VolumeSeries vol = volume_density_series(s, x, 2);
  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 3; ++l) {
      const double gap = std::abs(c.scaled.entry[j][l] - c.reference.entry[j][l]);
      if (gap == 0) continue;
      const double scale = std::max(c.reference.scale[j], c.scaled.scale[j]) * std::abs(vol.closed[l]);
      c.max_relative = std::max(c.max_relative, gap / scale);
    }
  return c;
}

}  // namespace bimetric
