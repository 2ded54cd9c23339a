#pragma once

// Series of the four ingredients of the Connes density A₄(f₁, f₂) at a point,
// the assembled A₄ series, its conformal covariance residual and the grid of
// nine bimetric invariant densities. All of it is four-dimensional.

#include <array>

#include "bimetric/operators.hpp"

namespace bimetric {

// Probe jets must carry degree ≥ 3 (a needs ∂² of the pairing).
inline constexpr int kProbeDegree = 3;

EpsSeries<double> gradient_pairing_series(const PointGeometry& geo, const Jet& f1, const Jet& f2);      // t
EpsSeries<double> laplacian_of_pairing_series(const PointGeometry& geo, const Jet& f1, const Jet& f2);  // a
EpsSeries<double> hessian_pairing_series(const PointGeometry& geo, const Jet& f1, const Jet& f2);      // b
EpsSeries<double> laplacian_product_series(const PointGeometry& geo, const Jet& f1, const Jet& f2);    // d

EpsSeries<double> gradient_pairing_series(const MetricScene& s, const ChartPoint& x, const Expr& f1, const Expr& f2,
                                          int order);
EpsSeries<double> laplacian_of_pairing_series(const MetricScene& s, const ChartPoint& x, const Expr& f1,
                                              const Expr& f2, int order);
EpsSeries<double> hessian_pairing_series(const MetricScene& s, const ChartPoint& x, const Expr& f1, const Expr& f2,
                                         int order);
EpsSeries<double> laplacian_product_series(const MetricScene& s, const ChartPoint& x, const Expr& f1,
                                           const Expr& f2, int order);

struct A4Series {
  EpsSeries<double> total;
  EpsSeries<double> r, t, a, b, d;
  // per order: ⅓Σ r_i t_j, a_k, b_k, −½d_k
  std::vector<std::array<double, 4>> parts;
  // largest |part| at order k; the natural scale for residuals that cancel
  double part_scale(int k) const;
};

A4Series a4_density_series(const PointGeometry& geo, const Jet& f1, const Jet& f2);
A4Series a4_density_series(const MetricScene& s, const ChartPoint& x, const Expr& f1, const Expr& f2, int order);

struct CovarianceOrder {
  double scaled = 0;     // A₄^k at (fḡ, fg̿)
  double reference = 0;  // f(x)^{-2} A₄^k at (ḡ, g̿)
  double residual = 0;   // |scaled − reference|
  double scale = 0;      // max part magnitude over both sides
  double relative = 0;   // residual / scale (0 when both vanish)
};

std::vector<CovarianceOrder> conformal_covariance_residual(const MetricScene& s, const ChartPoint& x,
                                                           const Expr& f1, const Expr& f2, const Expr& f,
                                                           int order = 2);

struct InvariantDensityGrid {
  std::array<std::array<double, 3>, 3> entry{};  // entry[j][l] = A₄^j c_l √det ḡ, c₀ = 1
  std::array<double, 3> scale{};                 // per row: A₄ part scale × √det ḡ
};

InvariantDensityGrid bimetric_invariant_grid(const MetricScene& s, const ChartPoint& x, const Expr& f1,
                                             const Expr& f2);

struct GridComparison {
  InvariantDensityGrid reference, scaled;
  double max_relative = 0;
};
// Entrywise comparison of the grids at (ḡ, g̿) and (fḡ, fg̿).
GridComparison compare_invariant_grids(const MetricScene& s, const ChartPoint& x, const Expr& f1, const Expr& f2,
                                       const Expr& f);

}  // namespace bimetric
