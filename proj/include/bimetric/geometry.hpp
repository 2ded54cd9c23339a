#pragma once

// ε-series of the inverse metric, Christoffel symbols, scalar curvature and
// volume density at a chart point, by generic series arithmetic over jets.

#include <vector>

#include "bimetric/eps_series.hpp"
#include "bimetric/scene.hpp"

namespace bimetric {

// Γ^k_{ij} stored as gamma[k](i, j).
using Rank3 = std::vector<Eigen::MatrixXd>;
using JetRank3 = std::vector<JetMatrix>;

// Everything the operator and density modules reuse at one point.
struct PointGeometry {
  int n = 0, order = 0, degree = 0;
  MetricPair metric;
  EpsSeries<JetMatrix> ginv;            // jets of `degree`
  std::vector<JetRank3> gamma;          // per order, jets of degree - 1
  std::vector<Eigen::MatrixXd> ginv_v;  // values per order
  std::vector<Rank3> gamma_v;           // values per order
  double cond = 0;                      // condition number of ḡ(x)
};

// degree is the metric jet degree (≥ 2; r needs ∂Γ).
PointGeometry point_geometry(const MetricScene& s, const ChartPoint& x, int order, int degree = 2);

EpsSeries<JetMatrix> inverse_metric_series(const MetricScene& s, const ChartPoint& x, int order);
EpsSeries<Rank3> christoffel_series(const MetricScene& s, const ChartPoint& x, int order);
EpsSeries<double> scalar_curvature_series(const PointGeometry& geo);
EpsSeries<double> scalar_curvature_series(const MetricScene& s, const ChartPoint& x, int order);

struct VolumeSeries {
  EpsSeries<double> closed;      // [1, c1, c2] from G = ḡ⁻¹g̿ (order ≤ 2)
  EpsSeries<double> sqrt_route;  // √(det(ḡ+εg̿)/det ḡ) by series_determinant + series_sqrt
  double sqrt_det_gbar = 0;
};

// c1 = tr G / 2, c2 = ½ Σ_{j<l}(G_jj G_ll − G_jl G_lj) − ⅛ (tr G)².
std::pair<double, double> volume_coefficients(const Eigen::MatrixXd& G);
VolumeSeries volume_density_series(const Eigen::MatrixXd& gbar, const Eigen::MatrixXd& gpert, int order);
VolumeSeries volume_density_series(const MetricScene& s, const ChartPoint& x, int order);

}  // namespace bimetric
