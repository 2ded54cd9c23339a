#include "doctest.h"

#include <random>

#include "bimetric/operators.hpp"
#include "bimetric/oracle.hpp"

using namespace bimetric;

namespace {

ChartPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  return {u(rng), u(rng), u(rng), u(rng)};
}

double series_gap(const EpsSeries<double>& s, const SeriesExtraction& o) {
  double scale = 0, gap = 0;
  for (double c : o.coeffs) scale = std::max(scale, std::abs(c));
  for (int k = 0; k <= s.order(); ++k) gap = std::max(gap, std::abs(s[k] - o.coeffs[k]));
  return scale > 0 ? gap / scale : gap;
}

double max_abs(const EpsSeries<double>& s) {
  double m = 0;
  for (int k = 0; k <= s.order(); ++k) m = std::max(m, std::abs(s[k]));
  return m;
}

}  // namespace

TEST_CASE("laplacian series examples") {
  const MetricScene e = builtin_scene("euclidean4");
  const ChartPoint x = {0.4, -0.3, 0.2, 1.1};
  auto q = laplacian_series_apply(e, x, parse("x1^2"), 2);
  CHECK(q[0] == -2);
  CHECK(q[1] == 0);
  CHECK(q[2] == 0);
  auto l = laplacian_series_apply(e, x, parse("x1"), 2);
  CHECK(max_abs(l) == 0);
  auto c = conformal_laplacian_series_apply(e, x, parse("x1^2"), 2);
  CHECK(c[0] == -2);
  CHECK(max_abs(conformal_laplacian_series_apply(builtin_scene("torus_bump"), x, num(0), 2)) == 0);

  const MetricScene sphere = builtin_scene("sphere4_stereo");
  auto s1 = conformal_laplacian_series_apply(sphere, x, num(1), 2);
  CHECK(s1[0] == doctest::Approx(2).epsilon(1e-10));
  CHECK(s1[1] == 0);
}

TEST_CASE("laplacian series matches the oracle") {
  std::mt19937_64 rng(21);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const MetricScene s = builtin_scene("random_smooth", seed);
    const Probes p{nullptr, nullptr, s.probes.at("u")};
    for (int t = 0; t < 2; ++t) {
      const ChartPoint x = random_point(rng);
      auto lap = laplacian_series_apply(s, x, p.u, 2);
      auto conf = conformal_laplacian_series_apply(s, x, p.u, 2);
      CHECK(series_gap(lap, extract_scene_series(s, x, {Quantity::Laplacian}, p, 2)) <= 1e-6);
      CHECK(series_gap(conf, extract_scene_series(s, x, {Quantity::ConformalLaplacian}, p, 2)) <= 1e-6);
      const double direct = exact_at_eps(s, 0.0, {Quantity::Laplacian}, x, p);
      CHECK(std::abs(lap[0] - direct) <= 1e-10 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("operator application is linear") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> coef(-2, 2);
  const MetricScene s = builtin_scene("random_smooth", 7);
  const Expr u = parse("sin(x1)*cos(x3) + 0.2*x2^2");
  const Expr v = parse("exp(0.3*x4) - cos(x1 + x2)");
  for (int t = 0; t < 4; ++t) {
    const ChartPoint x = random_point(rng);
    const double a = coef(rng), b = coef(rng);
    const Expr w = add(mul(num(a), u), mul(num(b), v));
    for (bool conformal : {false, true}) {
      auto apply = [&](const Expr& f) {
        return conformal ? conformal_laplacian_series_apply(s, x, f, 2) : laplacian_series_apply(s, x, f, 2);
      };
      auto lu = apply(u), lv = apply(v), lw = apply(w);
      for (int k = 0; k <= 2; ++k) {
        const double expect = a * lu[k] + b * lv[k];
        CHECK(std::abs(lw[k] - expect) <= 1e-10 * std::max({1.0, std::abs(a * lu[k]), std::abs(b * lv[k])}));
      }
    }
  }
}

TEST_CASE("leibniz consistency on flat scenes") {
  std::mt19937_64 rng(23);
  const MetricScene e = builtin_scene("euclidean4");
  const Expr u = parse("sin(x1)*x2 + x3^2");
  const Expr v = parse("cos(x2 + x4) + 0.5*x1");
  for (int t = 0; t < 5; ++t) {
    const ChartPoint x = random_point(rng);
    const double uv = laplacian_series_apply(e, x, mul(u, v), 0)[0];
    const double lu = laplacian_series_apply(e, x, u, 0)[0], lv = laplacian_series_apply(e, x, v, 0)[0];
    const Jet ju = jet_eval(u, x.data(), 4, 1), jv = jet_eval(v, x.data(), 4, 1);
    double pair = 0;
    for (int i = 0; i < 4; ++i) pair += ju.d({i}) * jv.d({i});
    CHECK(std::abs(uv - ju.value() * lv - jv.value() * lu + 2 * pair) <= 1e-9);
  }
}

TEST_CASE("intertwining residuals") {
  const ChartPoint x = {0.3, -0.7, 0.5, 0.2};
  const MetricScene t = builtin_scene("torus_bump");
  const Expr u = t.probes.at("u");
  for (Convention c : {Convention::Direct, Convention::Yamabe}) {
    auto one = intertwining_residuals(t, x, u, num(1), c, 2);
    for (const auto& o : one.orders) CHECK(o.residual <= 1e-12);
    auto zero = intertwining_residuals(t, x, num(0), t.conformal_factor ? *t.conformal_factor : num(2), c, 2);
    for (const auto& o : zero.orders) CHECK(o.residual == 0);
  }

  // classical covariance at order 0 singles out one convention
  const MetricScene e = builtin_scene("euclidean4");
  auto direct = intertwining_residuals(e, x, num(1), parse("exp(x1)"), Convention::Direct, 0);
  auto yamabe = intertwining_residuals(e, x, num(1), parse("exp(x1)"), Convention::Yamabe, 0);
  CHECK(direct.orders[0].residual <= 1e-8);
  CHECK(yamabe.orders[0].residual > 1e-3);

  // the direct reading holds at every order since it holds for each ε
  const MetricScene r = builtin_scene("random_smooth", 5);
  auto d2 = intertwining_residuals(r, x, r.probes.at("u"), parse("1 + 0.2*sin(x2)"), Convention::Direct, 2);
  for (const auto& o : d2.orders) CHECK(o.residual <= 1e-9 * std::max({1.0, std::abs(o.lhs), std::abs(o.rhs)}));

  CHECK_THROWS_AS(intertwining_residuals(e, x, num(1), parse("x1 - 5"), Convention::Direct, 0), DomainError);
}
