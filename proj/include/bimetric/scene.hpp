#pragma once

// Metric scenes: a base metric ḡ, a perturbation g̿ (g = ḡ + εg̿), an
// optional conformal factor and named probe functions, all as closed-form
// expressions over chart coordinates.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bimetric/expr.hpp"
#include "bimetric/jet.hpp"

namespace bimetric {

using ChartPoint = std::vector<double>;

inline const char* const kProbeNames[] = {"f0", "f1", "f2", "f3", "u"};

struct MetricScene {
  std::string name;
  int dim = 4;
  int order = 2;
  // Row-major n×n; entry (j,i) aliases (i,j).
  std::vector<Expr> base, perturbation;
  std::optional<Expr> conformal_factor;
  std::map<std::string, Expr> probes;
  bool periodic = false;
  double period = 0;

  const Expr& gbar(int i, int j) const { return base[i * dim + j]; }
  const Expr& gpert(int i, int j) const { return perturbation[i * dim + j]; }
  bool perturbation_is_zero() const;
  const Expr& probe(const std::string& name) const;
};

struct MetricPair {
  JetMatrix gbar, gpert;
  bool pert_zero = false;
};

// Smallest LDLᵀ pivot of a symmetric matrix; ≤ 0 means not SPD.
double spd_min_pivot(const Eigen::MatrixXd& m);

MetricScene load_scene(const std::string& path);
MetricScene parse_scene(const std::string& json_text, const std::string& origin = "<string>");
std::string scene_to_json(const MetricScene& s);
// Hex digest of the canonical serialization.
std::string scene_digest(const MetricScene& s);

// Catalog: euclidean4, sphere4_stereo, conformally_flat, torus_bump,
// random_smooth (seeded).
MetricScene builtin_scene(const std::string& name, std::uint64_t seed = 7);
std::vector<std::string> builtin_names();
MetricScene conformally_flat_scene(const Expr& phi);
// Either a file path or "builtin:NAME[:SEED]".
MetricScene resolve_scene(const std::string& source);

// Default trig probes (periodic on [0, 2π)^4).
std::map<std::string, Expr> default_probes();
Expr default_conformal_factor();

// Symmetric trig perturbation drawn from seed; used to give flat or
// round builtins a nonzero g̿ for campaigns.
MetricScene with_random_perturbation(MetricScene s, std::uint64_t seed, double amplitude = 0.3);
// Constant SPD ḡ and constant symmetric g̿ drawn from seed, with polynomial
// probes; every metric derivative vanishes.
MetricScene constant_metric_scene(std::uint64_t seed);
// (f ḡ, f g̿) with f the given positive field; probes and factor carried over.
MetricScene scaled_scene(const MetricScene& s, const Expr& f);

void check_point(const MetricScene& s, const ChartPoint& x);
// Jets of ḡ and g̿ at x. Throws DomainError (with the smallest pivot)
// when ḡ(x) is not SPD.
MetricPair eval_metric_pair(const MetricScene& s, const ChartPoint& x, int degree);
// Value of ḡ + εg̿ at x.
Eigen::MatrixXd metric_at(const MetricScene& s, const ChartPoint& x, double eps);

// Largest r ≤ cap with ḡ + εg̿ SPD for all |ε| ≤ r, by bisection to tol.
double eps_radius(const MetricScene& s, const ChartPoint& x, double cap = 10.0, double tol = 1e-6);

}  // namespace bimetric
