#include "doctest.h"

#include <random>

#include "bimetric/connes.hpp"
#include "bimetric/oracle.hpp"

using namespace bimetric;
using Eigen::MatrixXd;

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

MetricScene constant_scene(const MatrixXd& gb, const MatrixXd& gp) {
  MetricScene s = builtin_scene("euclidean4");
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      s.base[i * 4 + j] = num(gb(i, j));
      s.perturbation[i * 4 + j] = num(gp(i, j));
    }
  return s;
}

void check_series(const EpsSeries<double>& s, std::initializer_list<double> expect, double tol = 1e-12) {
  int k = 0;
  for (double e : expect) CHECK(std::abs(s[k++] - e) <= tol);
}

}  // namespace

TEST_CASE("component series hand values") {
  const MetricScene e = builtin_scene("euclidean4");
  const ChartPoint x = {0.7, -0.4, 0.3, 1.2};
  check_series(gradient_pairing_series(e, x, parse("x1"), parse("x2"), 2), {0, 0, 0});
  MatrixXd gp = MatrixXd::Zero(4, 4);
  gp(0, 0) = 1;
  check_series(gradient_pairing_series(constant_scene(MatrixXd::Identity(4, 4), gp), x, parse("x1"), parse("x1"), 2),
               {1, -1, 1});

  const Expr q1 = parse("x1^2"), q2 = parse("x2^2");
  check_series(laplacian_of_pairing_series(e, x, q1, q2, 2), {0, 0, 0});
  check_series(laplacian_of_pairing_series(e, x, q1, q1, 2), {-8, 0, 0});
  check_series(hessian_pairing_series(e, x, q1, q2, 2), {0, 0, 0});
  check_series(hessian_pairing_series(e, x, q1, q1, 2), {4, 0, 0});
  check_series(laplacian_product_series(e, x, q1, q2, 2), {4, 0, 0});
  check_series(laplacian_product_series(constant_scene(MatrixXd::Identity(4, 4) * 2, gp), x, parse("x1 - 3*x2"), q2, 2),
               {0, 0, 0});

  check_series(a4_density_series(e, x, parse("x1"), parse("x2"), 2).total, {0, 0, 0});
  const A4Series a = a4_density_series(e, x, q1, q2, 2);
  check_series(a.total, {-2, 0, 0});
  CHECK(a.parts[0][3] == -2);
}

TEST_CASE("component series match the oracle") {
  std::mt19937_64 rng(31);
  struct Case {
    std::string scene;
    std::uint64_t seed;
  };
  for (const Case& c : {Case{"random_smooth", 4}, Case{"torus_bump", 0}, Case{"sphere4_stereo", 0}}) {
    MetricScene s = builtin_scene(c.scene, c.seed);
    if (s.perturbation_is_zero()) s = with_random_perturbation(s, 8);
    Probes p{s.probes.at("f1"), s.probes.at("f2"), s.probes.at("u")};
    if (c.scene == "sphere4_stereo") {
      p.f1 = parse("x1^2 + x2*x3");
      p.f2 = parse("x3^3 - x1*x4 + x2");
    }
    const ChartPoint x = random_point(rng);
    const A4Series a4 = a4_density_series(s, x, p.f1, p.f2, 2);
    const auto o = extract_all_series(s, x, p, 2);
    const auto names = exact_field_names();
    auto field = [&](const std::string& n) {
      return o[std::find(names.begin(), names.end(), n) - names.begin()];
    };
    INFO(c.scene);
    CHECK(series_gap(a4.t, field("t")) <= 1e-7);
    CHECK(series_gap(a4.a, field("a")) <= 1e-6);
    CHECK(series_gap(a4.b, field("b")) <= 1e-6);
    CHECK(series_gap(a4.d, field("d")) <= 1e-6);
    CHECK(series_gap(a4.total, field("a4")) <= 1e-6);
  }
}

TEST_CASE("A4 symmetry, bilinearity and constant probes") {
  std::mt19937_64 rng(32);
  const MetricScene s = builtin_scene("random_smooth", 12);
  const Expr f1 = s.probes.at("f1"), f2 = s.probes.at("f2"), f3 = s.probes.at("f3");
  for (int t = 0; t < 3; ++t) {
    const ChartPoint x = random_point(rng);
    const A4Series a = a4_density_series(s, x, f1, f2, 2);
    const A4Series b = a4_density_series(s, x, f2, f1, 2);
    const A4Series scaled = a4_density_series(s, x, mul(num(-1.7), f1), f2, 2);
    const A4Series sum = a4_density_series(s, x, add(f1, f3), f2, 2);
    const A4Series c = a4_density_series(s, x, f3, f2, 2);
    const A4Series k = a4_density_series(s, x, num(2.5), f2, 2);
    for (int o = 0; o <= 2; ++o) {
      const double tol = 1e-10 * std::max(1.0, a.part_scale(o));
      CHECK(std::abs(a.total[o] - b.total[o]) <= tol);
      CHECK(std::abs(scaled.total[o] + 1.7 * a.total[o]) <= 1.7 * tol);
      CHECK(std::abs(sum.total[o] - a.total[o] - c.total[o]) <= 1e-10 * std::max({1.0, a.part_scale(o), c.part_scale(o)}));
      CHECK(std::abs(k.total[o]) <= 1e-12);
    }
  }
}

TEST_CASE("conformal covariance") {
  std::mt19937_64 rng(33);
  const MetricScene s = builtin_scene("random_smooth", 6);
  const Expr f1 = s.probes.at("f1"), f2 = s.probes.at("f2");
  const ChartPoint x = random_point(rng);
  for (const auto& o : conformal_covariance_residual(s, x, f1, f2, num(1))) CHECK(o.residual == 0);
  for (const auto& o : conformal_covariance_residual(s, x, f1, f2, num(4))) CHECK(o.relative <= 1e-10);
  for (const std::string name : {"random_smooth", "torus_bump", "conformally_flat", "sphere4_stereo", "euclidean4"}) {
    MetricScene b = builtin_scene(name, 2);
    if (b.perturbation_is_zero()) b = with_random_perturbation(b, 5);
    for (const char* f : {"exp(0.3*x1)", "1 + 0.2*sin(x2)"})
      for (const auto& o : conformal_covariance_residual(b, random_point(rng), f1, f2, parse(f))) {
        INFO(name << " f = " << f << " scaled " << o.scaled << " reference " << o.reference);
        CHECK(o.relative <= 1e-7);
      }
  }
  CHECK_THROWS_AS(conformal_covariance_residual(s, x, f1, f2, num(-1)), DomainError);
}

TEST_CASE("bimetric invariant grid") {
  std::mt19937_64 rng(34);
  const MetricScene sphere = builtin_scene("sphere4_stereo");
  const ChartPoint x = random_point(rng);
  const Expr f1 = sphere.probes.at("f1"), f2 = sphere.probes.at("f2");
  const InvariantDensityGrid g = bimetric_invariant_grid(sphere, x, f1, f2);
  const double a0 = a4_density_series(sphere, x, f1, f2, 2).total[0];
  const double root = volume_density_series(sphere, x, 2).sqrt_det_gbar;
  CHECK(g.entry[0][0] == doctest::Approx(a0 * root).epsilon(1e-14));
  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 3; ++l)
      if (j > 0 || l > 0) CHECK(g.entry[j][l] == 0);

  const MetricScene s = builtin_scene("random_smooth", 9);
  CHECK(compare_invariant_grids(s, x, f1, f2, num(1)).max_relative == 0);
  for (int t = 0; t < 3; ++t)
    CHECK(compare_invariant_grids(s, random_point(rng), f1, f2, parse("1 + 0.2*sin(x2)")).max_relative <= 1e-7);
}

TEST_CASE("dimension other than four is rejected") {
  MetricScene s = builtin_scene("euclidean4");
  s.dim = 3;
  s.base.resize(9, num(0));
  s.perturbation.resize(9, num(0));
  for (int i = 0; i < 3; ++i) s.base[i * 3 + i] = num(1);
  CHECK_THROWS_AS(a4_density_series(s, {0, 0, 0}, parse("x1"), parse("x2"), 2), ConfigError);
}
