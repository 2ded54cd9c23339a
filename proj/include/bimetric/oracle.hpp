#pragma once

// Independent verification paths. Nothing here touches EpsSeries: ε
// coefficients come from finite differences of single-metric evaluations,
// spatial partials from quad-precision finite differences.

#include <functional>
#include <string>
#include <vector>

#include "bimetric/expr.hpp"
#include "bimetric/scene.hpp"

namespace bimetric {

struct SeriesExtraction {
  std::vector<double> coeffs;
  std::vector<double> errors;  // |level h - level h/2| per coefficient
  double h = 0;
  int richardson_levels = 0;
  int halvings = 0;  // SPD-driven step reductions
};

inline constexpr double kDefaultEpsStep = 1e-3;

// c0 = f(0); c1, c2 from central differences at h and h/2 with one
// Richardson step. Orders above 2 use the same scheme on a wider stencil.
SeriesExtraction extract_series_fd(const std::function<double(double)>& f, int order, double h = kDefaultEpsStep);
// Vector-valued evaluator: one extraction per component, shared samples.
std::vector<SeriesExtraction> extract_series_fd(const std::function<std::vector<double>(double)>& f, int order,
                                                double h);

// Nested central difference of e along coords at x with step h.
double fd_partial(const Expr& e, const std::vector<double>& x, const std::vector<int>& coords, double h);

// Worst deviation of jet_eval partials from Richardson-extrapolated central
// differences (steps 1e-3 and 1e-4), relative to the jet's largest partial.
double spatial_fd_check(const Expr& e, const std::vector<double>& x, int degree);

enum class Quantity {
  ScalarCurvature,     // r
  Laplacian,           // Δu
  ConformalLaplacian,  // Δ̃u
  Pairing,             // t = ⟨df1, df2⟩
  LaplacianOfPairing,  // a = Δ⟨df1, df2⟩
  HessianPairing,      // b = ⟨∇df1, ∇df2⟩
  LaplacianProduct,    // d = Δf1 Δf2
  A4,                  // ⅓ r t + a + b − ½ d
  SqrtDetRatio,        // √(det g / det ḡ)
  InverseMetric,       // g^{ij}
  Christoffel,         // Γ^k_{ij}
};

struct Query {
  Quantity q = Quantity::ScalarCurvature;
  int i = 0, j = 0, k = 0;  // entry indices for InverseMetric / Christoffel
};

// Probe functions referenced by the density quantities.
struct Probes {
  Expr f1, f2, u;
};

// Exact value for the single collapsed metric ḡ + εg̿ at x. The code path
// uses jets and plain matrices only, never EpsSeries; Δ is evaluated in
// divergence form −ρ⁻¹∂_i(ρ g^{ij} ∂_j ·) with ρ = √det g, and r as the
// trace of the Ricci tensor.
double exact_at_eps(const MetricScene& s, double eps, const Query& query, const ChartPoint& x, const Probes& p);

// Batch version: every quantity at once (avoids recomputing the metric).
struct ExactValues {
  double r = 0, lap_u = 0, conf_lap_u = 0, t = 0, a = 0, b = 0, d = 0, a4 = 0, sqrt_det_ratio = 0, sqrt_det = 0;
  Eigen::MatrixXd ginv;
  std::vector<Eigen::MatrixXd> gamma;  // Γ^k as gamma[k](i, j)
};
ExactValues exact_all_at_eps(const MetricScene& s, double eps, const ChartPoint& x, const Probes& p);

// extract_series_fd on exact_at_eps, halving h (at most 4 times) until the
// widest sample stays inside the SPD radius.
SeriesExtraction extract_scene_series(const MetricScene& s, const ChartPoint& x, const Query& query, const Probes& p,
                                      int order, double h = kDefaultEpsStep);

// Largest step ≤ h (halving at most 4 times) whose widest sample lies
// inside the SPD radius; DomainError if none.
double safe_eps_step(const MetricScene& s, const ChartPoint& x, int order, double h, int* halvings = nullptr);

// Scalar fields of ExactValues, in a fixed order, for batch extraction.
std::vector<std::string> exact_field_names();
std::vector<double> exact_fields(const ExactValues& v);

// All exact_fields extracted at once; entry i matches exact_field_names()[i].
std::vector<SeriesExtraction> extract_all_series(const MetricScene& s, const ChartPoint& x, const Probes& p, int order,
                                                 double h = kDefaultEpsStep);

}  // namespace bimetric
