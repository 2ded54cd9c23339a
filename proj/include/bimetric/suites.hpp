#pragma once

// Verification campaigns over one scene, as report records: conformal
// covariance, the nine invariants, Laplacian intertwining, series against
// the ε-FD oracle, the appendix cross-check and the Hochschild diagnostic.
// Also the record builders behind the expand and wres commands.

#include <cstdint>
#include <string>
#include <vector>

#include "bimetric/functional.hpp"
#include "bimetric/report.hpp"

namespace bimetric {

struct SuiteOptions {
  std::uint64_t seed = 7;
  int points = 5;
  int factors = 3;
  int grid = 8;  // Hochschild nodes per axis
  int quadruples = 5;
  Tolerances tol;
  ParallelOptions par;
};

std::vector<std::string> suite_names();
// ConfigError on unknown suites and on scenes a suite cannot run on.
std::vector<CheckRecord> run_suite(const std::string& suite, const MetricScene& s, const SuiteOptions& opt);

// Seeded sample points in [-1.5, 1.5]^n.
std::vector<ChartPoint> campaign_points(const MetricScene& s, std::uint64_t seed, int count);
// The scene's own factor (or the default one) followed by seeded fields
// exp(a sin(x_p + b) + c cos(x_q + d)).
std::vector<Expr> campaign_factors(const MetricScene& s, std::uint64_t seed, int count);
// f1, f2, u from the scene, falling back to the default probes.
Probes campaign_probes(const MetricScene& s);

// |a − b| / max(|a|, |b|, floor), 0 when the denominator vanishes.
double relative_gap(double a, double b, double floor = 0);
// max_k |s_k − o_k| over the largest |o_k|.
double series_gap(const std::vector<double>& engine, const std::vector<double>& oracle);

// r ginv gamma lap conflap t a b d a4 c
std::vector<std::string> expand_quantities();
// One info record per quantity; errors name the failing quantity.
std::vector<CheckRecord> expand_records(const MetricScene& s, const ChartPoint& x, int order,
                                        const std::vector<std::string>& quantities);

struct WresOptions {
  int grid = 16;
  bool oracle = true;
  bool refine = false;  // gate against a run on twice as many nodes per axis
  Tolerances tol;
  ParallelOptions par;
};

struct WresOutcome {
  WresVariationReport report;
  std::vector<CheckRecord> checks;
};

WresOutcome wres_records(const MetricScene& s, const Expr& f0, const Expr& f1, const Expr& f2, const WresOptions& opt);

}  // namespace bimetric
