#include "bimetric/suites.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "bimetric/appendix_forms.hpp"
#include "bimetric/errors.hpp"

namespace bimetric {

namespace {

using nlohmann::json;

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json rank3_json(const Rank3& g) {
  json out = json::array();
  for (const auto& m : g) out.push_back(matrix_json(m));
  return out;
}

json point_json(const ChartPoint& x) { return json(std::vector<double>(x.begin(), x.end())); }

std::string tag(const std::string& suite, int point, int factor = -1) {
  std::ostringstream os;
  os << suite << " p" << point;
  if (factor >= 0) os << " f" << factor;
  return os.str();
}

Expr seeded_field(std::mt19937_64& rng, int dim, double amp, double offset) {
  std::uniform_real_distribution<double> a(-amp, amp), phase(0, 6.283185307179586);
  std::uniform_int_distribution<int> axis(0, dim - 1);
  Expr e = num(offset);
  for (int t = 0; t < 2; ++t) {
    const Op f = t == 0 ? Op::Sin : Op::Cos;
    e = add(e, mul(num(a(rng)), apply(f, add(var(axis(rng)), num(phase(rng))))));
  }
  return e;
}

// Re-throws with the quantity named, keeping the error class.
template <class F>
auto named(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError("quantity " + what + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError("quantity " + what + ": " + e.what());
  }
}

std::vector<CheckRecord> covariance_suite(const MetricScene& s, const SuiteOptions& opt) {
  const Probes p = campaign_probes(s);
  const auto pts = campaign_points(s, opt.seed, opt.points);
  const auto fs = campaign_factors(s, opt.seed, opt.factors);
  std::vector<CheckRecord> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < fs.size(); ++j) {
      const auto res = conformal_covariance_residual(s, pts[i], p.f1, p.f2, fs[j], 2);
      for (std::size_t k = 0; k < res.size(); ++k) {
        const auto& r = res[k];
        out.push_back(gated_check(tag("covariance", i, j) + " order " + std::to_string(k), r.relative,
                                  opt.tol.covariance,
                                  {{"point", point_json(pts[i])},
                                   {"factor", print(fs[j])},
                                   {"scaled", r.scaled},
                                   {"reference", r.reference},
                                   {"abs_residual", r.residual},
                                   {"scale", r.scale}}));
      }
    }
  return out;
}

std::vector<CheckRecord> invariants_suite(const MetricScene& s, const SuiteOptions& opt) {
  const Probes p = campaign_probes(s);
  const auto pts = campaign_points(s, opt.seed, opt.points);
  const auto fs = campaign_factors(s, opt.seed, opt.factors);
  std::vector<CheckRecord> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < fs.size(); ++j) {
      const GridComparison c = compare_invariant_grids(s, pts[i], p.f1, p.f2, fs[j]);
      json ref = json::array(), scaled = json::array();
      for (int a = 0; a < 3; ++a) {
        ref.push_back(c.reference.entry[a]);
        scaled.push_back(c.scaled.entry[a]);
      }
      out.push_back(gated_check(tag("invariants", i, j), c.max_relative, opt.tol.invariants,
                                {{"point", point_json(pts[i])},
                                 {"factor", print(fs[j])},
                                 {"reference", ref},
                                 {"scaled", scaled}}));
    }
  return out;
}

std::vector<CheckRecord> intertwining_suite(const MetricScene& s, const SuiteOptions& opt) {
  const Probes p = campaign_probes(s);
  const auto pts = campaign_points(s, opt.seed, opt.points);
  const auto fs = campaign_factors(s, opt.seed, opt.factors);
  const Convention conventions[] = {Convention::Direct, Convention::Yamabe};
  std::vector<CheckRecord> out;
  double higher[2] = {0, 0};
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < fs.size(); ++j) {
      double best0 = INFINITY;
      std::string best_name;
      json per = json::object();
      for (int c = 0; c < 2; ++c) {
        const auto res = intertwining_residuals(s, pts[i], p.u, fs[j], conventions[c], 2);
        json orders = json::array();
        for (std::size_t k = 0; k < res.orders.size(); ++k) {
          const auto& o = res.orders[k];
          const double rel = o.residual / std::max({1.0, std::abs(o.lhs), std::abs(o.rhs)});
          orders.push_back({{"lhs", o.lhs}, {"rhs", o.rhs}, {"residual", o.residual}, {"relative", rel}});
          if (k == 0 && rel < best0) {
            best0 = rel;
            best_name = convention_name(conventions[c]);
          }
          if (k > 0) higher[c] += rel;
        }
        per[convention_name(conventions[c])] = orders;
      }
      out.push_back(gated_check(tag("intertwining", i, j) + " order 0", best0, opt.tol.intertwining,
                                {{"point", point_json(pts[i])},
                                 {"factor", print(fs[j])},
                                 {"convention", best_name},
                                 {"conventions", per}}));
    }
  const int pick = higher[0] <= higher[1] ? 0 : 1;
  out.push_back(info_check("intertwining orders 1-2 preferred convention", higher[pick],
                           {{"convention", convention_name(conventions[pick])},
                            {"sum_relative_residual",
                             {{convention_name(conventions[0]), higher[0]},
                              {convention_name(conventions[1]), higher[1]}}}}));
  return out;
}

std::vector<CheckRecord> oracle_suite(const MetricScene& s, const SuiteOptions& opt) {
  const Probes p = campaign_probes(s);
  const auto pts = campaign_points(s, opt.seed, opt.points);
  const auto names = exact_field_names();
  const int n = s.dim;
  std::vector<CheckRecord> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const ChartPoint& x = pts[i];
    const PointGeometry geo = point_geometry(s, x, 2);
    const Jet f1 = jet_eval(p.f1, x.data(), n, kProbeDegree), f2 = jet_eval(p.f2, x.data(), n, kProbeDegree);
    const Jet u = jet_eval(p.u, x.data(), n, kProbeDegree);
    const EpsSeries<double> r = scalar_curvature_series(geo);
    const A4Series a4 = a4_density_series(geo, f1, f2);
    const VolumeSeries vol = volume_density_series(values(geo.metric.gbar), values(geo.metric.gpert), 2);
    const std::map<std::string, std::vector<double>> engine = {
        {"r", r.coeffs()},
        {"lap_u", laplacian_series_apply(geo, u).coeffs()},
        {"conf_lap_u", conformal_laplacian_series_apply(geo, r, u).coeffs()},
        {"t", a4.t.coeffs()},
        {"a", a4.a.coeffs()},
        {"b", a4.b.coeffs()},
        {"d", a4.d.coeffs()},
        {"a4", a4.total.coeffs()},
        {"sqrt_det_ratio", vol.closed.coeffs()}};
    const auto o = extract_all_series(s, x, p, 2);
    for (std::size_t q = 0; q < names.size(); ++q) {
      const auto& e = engine.at(names[q]);
      out.push_back(gated_check(tag("oracle", i) + " " + names[q], series_gap(e, o[q].coeffs), opt.tol.oracle,
                                {{"point", point_json(x)},
                                 {"engine", e},
                                 {"oracle", o[q].coeffs},
                                 {"oracle_error", o[q].errors},
                                 {"h", o[q].h}}));
    }

    // inverse metric and Christoffel entries, one extraction for all of them
    const double h = safe_eps_step(s, x, 2, kDefaultEpsStep);
    const Probes none{};
    auto entries = [&](double eps) {
      const ExactValues v = exact_all_at_eps(s, eps, x, none);
      std::vector<double> flat;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) flat.push_back(v.ginv(a, b));
      for (int k = 0; k < n; ++k)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) flat.push_back(v.gamma[k](a, b));
      return flat;
    };
    const auto fd = extract_series_fd(entries, 2, h);
    double ginv_gap = 0, gamma_gap = 0, ginv_scale = 0, gamma_scale = 0;
    for (int ord = 0; ord <= 2; ++ord) {
      int idx = 0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b, ++idx) {
          ginv_gap = std::max(ginv_gap, std::abs(geo.ginv_v[ord](a, b) - fd[idx].coeffs[ord]));
          ginv_scale = std::max(ginv_scale, std::abs(fd[idx].coeffs[ord]));
        }
      for (int k = 0; k < n; ++k)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b, ++idx) {
            gamma_gap = std::max(gamma_gap, std::abs(geo.gamma_v[ord][k](a, b) - fd[idx].coeffs[ord]));
            gamma_scale = std::max(gamma_scale, std::abs(fd[idx].coeffs[ord]));
          }
    }
    out.push_back(gated_check(tag("oracle", i) + " ginv", ginv_scale > 0 ? ginv_gap / ginv_scale : ginv_gap,
                              opt.tol.oracle, {{"point", point_json(x)}, {"max_abs_gap", ginv_gap}}));
    out.push_back(gated_check(tag("oracle", i) + " gamma", gamma_scale > 0 ? gamma_gap / gamma_scale : gamma_gap,
                              opt.tol.oracle, {{"point", point_json(x)}, {"max_abs_gap", gamma_gap}}));
  }
  return out;
}

std::vector<CheckRecord> appendix_suite(const MetricScene& s, const SuiteOptions& opt) {
  if (s.dim != 4) throw ConfigError("the appendix forms need dimension 4");
  const auto pts = campaign_points(s, opt.seed, opt.points);
  CrosscheckOptions co;
  co.close_tol = opt.tol.appendix;
  const auto recs = crosscheck_appendix({s}, pts, co);
  std::vector<CheckRecord> out;
  for (const auto& r : recs) {
    int pi = 0;
    while (pi < static_cast<int>(pts.size()) && pts[pi] != r.point) ++pi;
    json v = {{"coefficient", r.coefficient},
              {"point", point_json(r.point)},
              {"engine", r.engine},
              {"verbatim", r.transcription},
              {"verbatim_abs_gap", r.abs_gap},
              {"corrected", r.corrected},
              {"corrected_abs_gap", r.corrected_abs_gap},
              {"corrected_rel_gap", r.corrected_rel_gap},
              {"suspected_typo", r.suspected_typo},
              {"fixes", fix_ids(r.coefficient)}};
    if (!r.error.empty()) v["error"] = r.error;
    out.push_back(info_check(tag("appendix", pi) + " " + r.coefficient, r.rel_gap, v, opt.tol.appendix));
  }
  for (const auto& [name, g] : summarize_gaps(recs))
    out.push_back(info_check("appendix max gap " + name, g.verbatim,
                             {{"verbatim", g.verbatim},
                              {"corrected", g.corrected},
                              {"records", g.records},
                              {"failures", g.failures}},
                             opt.tol.appendix));
  return out;
}

std::vector<CheckRecord> hochschild_suite(const MetricScene& s, const SuiteOptions& opt) {
  if (!s.periodic) throw ConfigError("the Hochschild suite integrates over the chart and needs a periodic scene");
  std::mt19937_64 rng(opt.seed * 6364136223846793005ULL + 11);
  QuadratureGrid grid;
  grid.m = opt.grid;
  grid.dim = s.dim;
  grid.period = s.period;
  std::vector<CheckRecord> out;
  for (int q = 0; q < opt.quadruples; ++q) {
    std::array<Expr, 4> f;
    for (auto& e : f) e = seeded_field(rng, s.dim, 0.8, 0.5);
    const auto res = hochschild_residuals(s, grid, f[0], f[1], f[2], f[3], opt.par);
    json probes = json::array();
    for (const auto& e : f) probes.push_back(print(e));
    for (const auto& r : res) {
      out.push_back(info_check("hochschild q" + std::to_string(q) + " order " + std::to_string(r.order),
                               std::abs(r.residual),
                               {{"probes", probes},
                                {"residual", r.residual},
                                {"coarse", r.coarse},
                                {"error_bar", r.error_bar},
                                {"refinement", r.refinement},
                                {"rounding", r.rounding},
                                {"within_error_bar", std::abs(r.residual) <= r.error_bar},
                                {"phi", r.phi},
                                {"grid", grid.m}},
                               r.error_bar));
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"covariance", "invariants", "intertwining", "oracle", "appendix", "hochschild"};
}

std::vector<CheckRecord> run_suite(const std::string& suite, const MetricScene& s, const SuiteOptions& opt) {
  if (opt.points < 1 || opt.factors < 1 || opt.quadruples < 1 || opt.grid < 2)
    throw ConfigError("campaign sizes must be positive");
  if (suite == "covariance") return covariance_suite(s, opt);
  if (suite == "invariants") return invariants_suite(s, opt);
  if (suite == "intertwining") return intertwining_suite(s, opt);
  if (suite == "oracle") return oracle_suite(s, opt);
  if (suite == "appendix") return appendix_suite(s, opt);
  if (suite == "hochschild") return hochschild_suite(s, opt);
  throw ConfigError("unknown suite '" + suite + "'");
}

std::vector<ChartPoint> campaign_points(const MetricScene& s, std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::vector<ChartPoint> out;
  for (int i = 0; i < count; ++i) {
    ChartPoint x(s.dim);
    for (double& c : x) c = u(rng);
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<Expr> campaign_factors(const MetricScene& s, std::uint64_t seed, int count) {
  std::vector<Expr> out;
  out.push_back(s.conformal_factor ? *s.conformal_factor : default_conformal_factor());
  std::mt19937_64 rng(seed * 2862933555777941757ULL + 3);
  while (static_cast<int>(out.size()) < count) out.push_back(apply(Op::Exp, seeded_field(rng, s.dim, 0.3, 0)));
  out.resize(count);
  return out;
}

Probes campaign_probes(const MetricScene& s) {
  const auto defaults = default_probes();
  auto pick = [&](const char* name) {
    const auto it = s.probes.find(name);
    return it != s.probes.end() ? it->second : defaults.at(name);
  };
  return {pick("f1"), pick("f2"), pick("u")};
}

double relative_gap(double a, double b, double floor) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return scale > 0 ? std::abs(a - b) / scale : 0.0;
}

double series_gap(const std::vector<double>& engine, const std::vector<double>& oracle) {
  double scale = 0, gap = 0;
  for (double c : oracle) scale = std::max(scale, std::abs(c));
  const std::size_t n = std::min(engine.size(), oracle.size());
  for (std::size_t k = 0; k < n; ++k) gap = std::max(gap, std::abs(engine[k] - oracle[k]));
  return scale > 0 ? gap / scale : gap;
}

std::vector<std::string> expand_quantities() {
  return {"r", "ginv", "gamma", "lap", "conflap", "t", "a", "b", "d", "a4", "c"};
}

std::vector<CheckRecord> expand_records(const MetricScene& s, const ChartPoint& x, int order,
                                        const std::vector<std::string>& quantities) {
  const auto known = expand_quantities();
  for (const auto& q : quantities)
    if (std::find(known.begin(), known.end(), q) == known.end()) throw ConfigError("unknown quantity '" + q + "'");
  if (order < 0) throw ConfigError("order must be nonnegative");
  check_point(s, x);
  const PointGeometry geo = named("geometry", [&] { return point_geometry(s, x, order); });
  const Probes p = campaign_probes(s);
  const int n = s.dim;
  auto jet = [&](const char* q, const Expr& e) { return named(q, [&] { return jet_eval(e, x.data(), n, kProbeDegree); }); };

  std::vector<CheckRecord> out;
  for (const auto& q : quantities) {
    json v = {{"point", point_json(x)}, {"order", order}};
    if (q == "r") {
      v["series"] = named(q, [&] { return scalar_curvature_series(geo); }).coeffs();
    } else if (q == "ginv") {
      json m = json::array();
      for (const auto& g : geo.ginv_v) m.push_back(matrix_json(g));
      v["series"] = m;
    } else if (q == "gamma") {
      json m = json::array();
      for (const auto& g : geo.gamma_v) m.push_back(rank3_json(g));
      v["series"] = m;
    } else if (q == "lap") {
      const Jet u = jet(q.c_str(), p.u);
      v["probe"] = print(p.u);
      v["series"] = named(q, [&] { return laplacian_series_apply(geo, u); }).coeffs();
    } else if (q == "conflap") {
      const Jet u = jet(q.c_str(), p.u);
      v["probe"] = print(p.u);
      v["series"] = named(q, [&] {
                      return conformal_laplacian_series_apply(geo, scalar_curvature_series(geo), u);
                    }).coeffs();
    } else if (q == "c") {
      const VolumeSeries vol =
          named(q, [&] { return volume_density_series(values(geo.metric.gbar), values(geo.metric.gpert), order); });
      v["series"] = vol.closed.coeffs();
      v["sqrt_route"] = vol.sqrt_route.coeffs();
      v["sqrt_det_gbar"] = vol.sqrt_det_gbar;
    } else {
      const Jet f1 = jet(q.c_str(), p.f1), f2 = jet(q.c_str(), p.f2);
      const A4Series a4 = named(q, [&] { return a4_density_series(geo, f1, f2); });
      v["probes"] = {print(p.f1), print(p.f2)};
      const EpsSeries<double>& picked = q == "t" ? a4.t : q == "a" ? a4.a : q == "b" ? a4.b : q == "d" ? a4.d : a4.total;
      v["series"] = picked.coeffs();
      if (q == "a4") {
        json parts = json::array();
        for (const auto& row : a4.parts) parts.push_back({{"rt/3", row[0]}, {"a", row[1]}, {"b", row[2]}, {"-d/2", row[3]}});
        v["parts"] = parts;
      }
    }
    out.push_back(info_check("expand " + q, 0, v));
  }
  return out;
}

WresOutcome wres_records(const MetricScene& s, const Expr& f0, const Expr& f1, const Expr& f2, const WresOptions& opt) {
  if (opt.grid < 2) throw ConfigError("the grid needs at least two nodes per axis");
  QuadratureGrid grid;
  grid.m = opt.grid;
  grid.dim = s.dim;
  grid.period = s.period;
  WresOutcome out;
  out.report = wres_variations(s, grid, f0, f1, f2, opt.oracle, opt.par);
  const WresVariationReport& r = out.report;
  const std::vector<double> mine = {r.value, r.first, r.second};

  json terms = json::array();
  for (int k = 0; k <= 2; ++k)
    for (const auto& t : r.terms[k]) terms.push_back({{"order", k}, {"name", t.name}, {"value", t.value}});
  out.checks.push_back(info_check("wres variations", 0,
                                  {{"grid", grid.m},
                                   {"value", r.value},
                                   {"first", r.first},
                                   {"second", r.second},
                                   {"series", r.series.coeffs()},
                                   {"terms", terms}}));

  if (r.has_oracle) {
    // variations are measured against the functional's own size as well,
    // so vanishing variations compare against FD noise sensibly
    const double floor = std::abs(r.value);
    const std::vector<double> oracle = {r.oracle.coeffs[0], r.oracle.coeffs[1], 2 * r.oracle.coeffs[2]};
    const char* names[] = {"value", "first", "second"};
    for (int k = 0; k <= 2; ++k)
      out.checks.push_back(gated_check(std::string("wres ") + names[k] + " vs oracle",
                                       relative_gap(mine[k], oracle[k], floor), opt.tol.integral,
                                       {{"engine", mine[k]},
                                        {"oracle", oracle[k]},
                                        {"oracle_error", r.oracle.errors[k] * (k == 2 ? 2 : 1)},
                                        {"h", r.oracle.h},
                                        {"halvings", r.oracle.halvings}}));
  }

  QuadratureGrid other = grid;
  other.m = opt.refine ? 2 * grid.m : std::max(1, grid.m / 2);
  const WresVariationReport r2 = wres_variations(s, other, f0, f1, f2, false, opt.par);
  const std::vector<double> theirs = {r2.value, r2.first, r2.second};
  double scale = 0, delta = 0;
  for (int k = 0; k <= 2; ++k) {
    scale = std::max({scale, std::abs(mine[k]), std::abs(theirs[k])});
    delta = std::max(delta, std::abs(mine[k] - theirs[k]));
  }
  const double rel = scale > 0 ? delta / scale : 0.0;
  json v = {{"grid", grid.m},
            {"other_grid", other.m},
            {"other", {{"value", r2.value}, {"first", r2.first}, {"second", r2.second}}},
            {"max_abs_change", delta}};
  if (opt.refine)
    out.checks.push_back(gated_check("wres grid refinement", rel, opt.tol.refinement, v));
  else
    out.checks.push_back(info_check("wres grid coarsening", rel, v, opt.tol.refinement));
  return out;
}

}  // namespace bimetric
