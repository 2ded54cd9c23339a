#pragma once

// Periodic trapezoid quadrature over the chart torus and the integrated
// functional ∫ f₀ A₄(f₁, f₂) dVol with its ε-variations.

#include <array>
#include <functional>
#include <string>

#include "bimetric/connes.hpp"
#include "bimetric/oracle.hpp"

namespace bimetric {

struct QuadratureGrid {
  int m = 16;  // nodes per axis
  int dim = 4;
  double period = 6.283185307179586;

  std::size_t size() const;
  double weight() const;  // (period / m)^dim
  ChartPoint node(std::size_t index) const;  // lexicographic, last axis fastest
};

// Deterministic pairwise sum (fixed tree over the input order).
double pairwise_sum(const double* v, std::size_t n);

// Number of workers; 0 means hardware concurrency.
struct ParallelOptions {
  int threads = 0;
};

// Coefficient-wise Σ w · density(x) · √det ḡ(x) over the grid nodes.
using DensityProducer = std::function<EpsSeries<double>(const ChartPoint&)>;
EpsSeries<double> integrate_density_series(const MetricScene& s, const QuadratureGrid& grid, const DensityProducer& density,
                                           int order, ParallelOptions par = {});

// Scalar version used by the direct (non-series) oracle.
double integrate_scalar(const QuadratureGrid& grid, const std::function<double(const ChartPoint&)>& f,
                        ParallelOptions par = {});

struct IntegratedTerm {
  std::string name;  // e.g. "A4[1]*c[1]" or "a[2]"
  double value = 0;
};

struct WresVariationReport {
  double value = 0, first = 0, second = 0;
  EpsSeries<double> series;                         // ∫ f₀ (A₄ ⊛ volume) coefficients
  std::array<std::vector<IntegratedTerm>, 3> terms;  // per order, the integrated groupings
  // ε-FD oracle of the directly integrated single-metric functional
  SeriesExtraction oracle;
  bool has_oracle = false;
};

// Throws ConfigError on non-periodic scenes, grid/scene period mismatch, or
// probes that are not periodic.
WresVariationReport wres_variations(const MetricScene& s, const QuadratureGrid& grid, const Expr& f0, const Expr& f1,
                                    const Expr& f2, bool with_oracle, ParallelOptions par = {});

// φ(f₀,f₁,f₂) = coefficient `order` of ∫ f₀ (A₄(f₁,f₂) ⊛ volume) dVol_ḡ.
double phi_functional(const MetricScene& s, const QuadratureGrid& grid, const Expr& f0, const Expr& f1, const Expr& f2,
                      int order, ParallelOptions par = {});

struct HochschildResult {
  int order = 0;
  double residual = 0;       // on the requested grid
  double coarse = 0;         // same on m/2 nodes per axis
  double refinement = 0;     // |residual − coarse|
  double rounding = 0;       // ε · log₂(nodes) · Σ|φ_i|, the pairwise-summation bound
  double error_bar = 0;      // refinement + rounding
  std::array<double, 4> phi{};  // the four φ terms with their signs applied
};

// bφ(f₀,f₁,f₂,f₃) = φ(f₀f₁,f₂,f₃) − φ(f₀,f₁f₂,f₃) + φ(f₀,f₁,f₂f₃) − φ(f₃f₀,f₁,f₂).
HochschildResult hochschild_residual(const MetricScene& s, const QuadratureGrid& grid, const Expr& f0, const Expr& f1,
                                     const Expr& f2, const Expr& f3, int order, ParallelOptions par = {});
// All three orders from one pass over the fine and coarse grids.
std::array<HochschildResult, 3> hochschild_residuals(const MetricScene& s, const QuadratureGrid& grid, const Expr& f0,
                                                    const Expr& f1, const Expr& f2, const Expr& f3,
                                                    ParallelOptions par = {});

}  // namespace bimetric
