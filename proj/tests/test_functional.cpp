#include "doctest.h"

#include <cmath>

#include "bimetric/functional.hpp"

using namespace bimetric;

namespace {

constexpr double kPi = 3.14159265358979323846;

EpsSeries<double> series3(double a, double b, double c) { return EpsSeries<double>(std::vector<double>{a, b, c}); }

}  // namespace

TEST_CASE("quadrature grid") {
  QuadratureGrid g;
  g.m = 8;
  CHECK(g.size() == 4096);
  double total = 0;
  for (std::size_t i = 0; i < g.size(); ++i) total += g.weight();
  CHECK(std::abs(total - std::pow(2 * kPi, 4)) <= 1e-13 * std::pow(2 * kPi, 4));
  CHECK(g.node(0) == ChartPoint{0, 0, 0, 0});
  CHECK(g.node(1)[3] == doctest::Approx(2 * kPi / 8));
  CHECK(g.node(8)[2] == doctest::Approx(2 * kPi / 8));

  std::vector<double> v(1000);
  for (int i = 0; i < 1000; ++i) v[i] = 1.0 / (i + 1);
  double plain = 0;
  for (double x : v) plain += x;
  CHECK(pairwise_sum(v.data(), v.size()) == doctest::Approx(plain).epsilon(1e-14));
}

TEST_CASE("density integration examples") {
  const MetricScene e = builtin_scene("euclidean4");
  QuadratureGrid g;
  g.m = 8;
  const double vol = std::pow(2 * kPi, 4);
  auto one = integrate_density_series(e, g, [](const ChartPoint&) { return series3(1, 0, 0); }, 2);
  CHECK(std::abs(one[0] - vol) <= 1e-13 * vol);
  CHECK(one[1] == 0);
  CHECK(one[2] == 0);
  auto s2 = integrate_density_series(
      e, g, [](const ChartPoint& x) { return series3(std::sin(x[0]) * std::sin(x[0]), 0, 0); }, 2);
  CHECK(std::abs(s2[0] - vol / 2) <= 1e-12 * vol);

  // linearity
  auto f = [](const ChartPoint& x) { return series3(std::cos(x[1] + x[2]), std::sin(x[0]) + 2, x[3] * 0 + 1); };
  auto h = [](const ChartPoint& x) { return series3(std::exp(std::sin(x[2])), std::cos(x[0] - x[3]), 0.5); };
  const MetricScene t = builtin_scene("torus_bump");
  auto a = integrate_density_series(t, g, f, 2), b = integrate_density_series(t, g, h, 2);
  auto c = integrate_density_series(
      t, g, [&](const ChartPoint& x) { return scale(f(x), 2.0) + scale(h(x), -3.0); }, 2);
  for (int k = 0; k <= 2; ++k) CHECK(std::abs(c[k] - (2 * a[k] - 3 * b[k])) <= 1e-13 * vol);

  CHECK_THROWS_AS(integrate_density_series(builtin_scene("sphere4_stereo"), g,
                                           [](const ChartPoint&) { return series3(1, 0, 0); }, 2),
                  ConfigError);
  CHECK_THROWS_AS(integrate_density_series(
                      e, g, [](const ChartPoint& x) { return series3(x[0] > 1 ? NAN : 1.0, 0, 0); }, 2),
                  DomainError);
}

TEST_CASE("reduction does not depend on the worker count") {
  const MetricScene t = builtin_scene("torus_bump");
  QuadratureGrid g;
  g.m = 6;
  const auto& p = t.probes;
  auto one = wres_variations(t, g, p.at("f0"), p.at("f1"), p.at("f2"), false, {1});
  auto three = wres_variations(t, g, p.at("f0"), p.at("f1"), p.at("f2"), false, {3});
  for (int k = 0; k <= 2; ++k) CHECK(one.series[k] == three.series[k]);
}

TEST_CASE("wres variations degenerate cases") {
  QuadratureGrid g;
  g.m = 4;
  const MetricScene t = builtin_scene("torus_bump");
  const auto& p = t.probes;
  auto zero_f0 = wres_variations(t, g, num(0), p.at("f1"), p.at("f2"), false);
  CHECK(zero_f0.value == 0);
  CHECK(zero_f0.first == 0);
  CHECK(zero_f0.second == 0);

  MetricScene flat = t;
  for (auto& e : flat.perturbation) e = num(0);
  auto unperturbed = wres_variations(flat, g, p.at("f0"), p.at("f1"), p.at("f2"), false);
  CHECK(unperturbed.first == 0);
  CHECK(unperturbed.second == 0);

  CHECK_THROWS_AS(wres_variations(t, g, parse("x1"), p.at("f1"), p.at("f2"), false), ConfigError);
}

TEST_CASE("wres variations match the integrated oracle and term groupings") {
  QuadratureGrid g;
  g.m = 6;
  for (const std::string name : {"torus_bump", "random_smooth", "conformally_flat"}) {
    MetricScene s = builtin_scene(name, 4);
    if (s.perturbation_is_zero()) s = with_random_perturbation(s, 2);
    const auto& p = s.probes;
    auto r = wres_variations(s, g, p.at("f0"), p.at("f1"), p.at("f2"), true);
    REQUIRE(r.has_oracle);
    INFO(name << " first " << r.first << " oracle " << r.oracle.coeffs[1]);
    CHECK(std::abs(r.value - r.oracle.coeffs[0]) <= 1e-10 * std::max(1.0, std::abs(r.value)));
    CHECK(std::abs(r.first - r.oracle.coeffs[1]) <= 1e-5 * std::max(1.0, std::abs(r.first)));
    CHECK(std::abs(r.second - 2 * r.oracle.coeffs[2]) <= 1e-5 * std::max(1.0, std::abs(r.second)));
    // the A4[j]*c[l] groupings of order k add up to coefficient k
    for (int k = 0; k <= 2; ++k) {
      double sum = 0, parts = 0;
      for (const auto& t : r.terms[k]) (t.name.rfind("A4", 0) == 0 ? sum : parts) += t.value;
      CHECK(std::abs(sum - r.series[k]) <= 1e-10 * std::max(1.0, std::abs(r.series[k])));
      double a4k = 0;
      for (const auto& t : r.terms[k])
        if (t.name == "A4[" + std::to_string(k) + "]*c[0]") a4k = t.value;
      CHECK(std::abs(parts - a4k) <= 1e-10 * std::max(1.0, std::abs(a4k)));
    }
  }
}

TEST_CASE("integrated invariance under conformal rescaling") {
  QuadratureGrid g;
  g.m = 6;
  const MetricScene s = builtin_scene("torus_bump");
  const Expr f = parse("1 + 0.2*sin(x2)");
  const auto& p = s.probes;
  auto base = wres_variations(s, g, p.at("f0"), p.at("f1"), p.at("f2"), false);
  auto scaled = wres_variations(scaled_scene(s, f), g, p.at("f0"), p.at("f1"), p.at("f2"), false);
  for (int k = 0; k <= 2; ++k)
    CHECK(std::abs(base.series[k] - scaled.series[k]) <= 1e-9 * std::max(1.0, std::abs(base.series[k])));
}

TEST_CASE("hochschild residual degenerate cases") {
  QuadratureGrid g;
  g.m = 4;
  const MetricScene s = builtin_scene("torus_bump");
  const auto& p = s.probes;
  auto const_slot = hochschild_residual(s, g, p.at("f0"), num(2), p.at("f2"), p.at("f3"), 1);
  CHECK(std::abs(const_slot.residual) <= 1e-9 * std::max(1.0, std::abs(const_slot.phi[0])));
  auto unit_last = hochschild_residual(s, g, p.at("f0"), p.at("f1"), p.at("f2"), num(1), 1);
  CHECK(std::abs(unit_last.residual) <= 1e-9 * std::max(1.0, std::abs(unit_last.phi[0])));
  CHECK(unit_last.error_bar >= 0);
}
