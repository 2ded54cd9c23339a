#pragma once

// Laplacian and conformal Laplacian ε-series applied to probe functions at a
// point, and the conformal intertwining residual check.

#include "bimetric/geometry.hpp"

namespace bimetric {

// (n−2)/(4(n−1)).
inline double conformal_coupling(int n) { return (n - 2.0) / (4.0 * (n - 1.0)); }

// Covariant Hessians of an ε-dependent field F (jets of degree ≥ 2):
// H[m] = Σ_{b+c=m} (δ_{b0} ∂²F[c] − Σ_k Γ[b]^k ∂_k F[c]).
std::vector<Eigen::MatrixXd> hessian_series(const PointGeometry& geo, const EpsSeries<Jet>& field);
// Δ[m] = −Σ_{a+b=m} g^{-1}[a] : H[b], with Δ = −Σ g^{ij}(∂_i∂_j − Γ^k_ij ∂_k).
EpsSeries<double> laplacian_series(const PointGeometry& geo, const EpsSeries<Jet>& field);
// Field constant in ε.
EpsSeries<Jet> constant_field(const Jet& u, int order);

EpsSeries<double> laplacian_series_apply(const PointGeometry& geo, const Jet& u);
EpsSeries<double> laplacian_series_apply(const MetricScene& s, const ChartPoint& x, const Expr& u, int order);
// coefficient k = p_k u + (n−2)/(4(n−1)) r_k u(x).
EpsSeries<double> conformal_laplacian_series_apply(const PointGeometry& geo, const EpsSeries<double>& r, const Jet& u);
EpsSeries<double> conformal_laplacian_series_apply(const MetricScene& s, const ChartPoint& x, const Expr& u, int order);

enum class Convention { Direct, Yamabe };
const char* convention_name(Convention c);

struct IntertwiningOrder {
  double lhs = 0, rhs = 0, residual = 0;
};
struct IntertwiningResult {
  Convention convention = Convention::Direct;
  std::vector<IntertwiningOrder> orders;
};

// direct: LHS_k = f^{(n+2)/4} (Δ̃ at (fḡ, fg̿))_k u,  RHS_k = (Δ̃ at (ḡ, g̿))_k (f^{(n−2)/4} u).
// yamabe: as direct with the metric pair scaled by f^{4/(n−2)} instead of f.
IntertwiningResult intertwining_residuals(const MetricScene& s, const ChartPoint& x, const Expr& u, const Expr& f,
                                          Convention convention, int order);

}  // namespace bimetric
