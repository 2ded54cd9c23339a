#include "doctest.h"

#include <random>

#include "bimetric/geometry.hpp"
#include "bimetric/oracle.hpp"

using namespace bimetric;
using Eigen::MatrixXd;

namespace {

ChartPoint random_point(std::mt19937_64& rng, double lo = -1.5, double hi = 1.5) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng), u(rng)};
}

// |s_k − o_k| relative to the largest coefficient of the oracle series.
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

}  // namespace

TEST_CASE("inverse metric series examples") {
  const ChartPoint x = {0.3, -0.2, 0.5, 0.1};
  auto flat = inverse_metric_series(builtin_scene("sphere4_stereo"), x, 2);
  const MatrixXd gb = metric_at(builtin_scene("sphere4_stereo"), x, 0.0);
  CHECK((values(flat[0]) - gb.inverse()).norm() <= 1e-12);
  CHECK(values(flat[1]).norm() == 0);
  CHECK(values(flat[2]).norm() == 0);

  MetricScene same = builtin_scene("random_smooth", 3);
  same.perturbation = same.base;
  auto geo = inverse_metric_series(same, x, 2);
  const MatrixXd gi = metric_at(same, x, 0.0).inverse();
  CHECK((values(geo[0]) - gi).norm() <= 1e-12);
  CHECK((values(geo[1]) + gi).norm() <= 1e-12);
  CHECK((values(geo[2]) - gi).norm() <= 1e-12);
}

TEST_CASE("inverse metric series matches the oracle and carries spatial derivatives") {
  std::mt19937_64 rng(1);
  const MetricScene s = builtin_scene("random_smooth", 11);
  const ChartPoint x = random_point(rng);
  const PointGeometry geo = point_geometry(s, x, 2);
  const Probes none{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      auto o = extract_scene_series(s, x, {Quantity::InverseMetric, i, j}, none, 2);
      for (int k = 0; k <= 2; ++k) CHECK(std::abs(geo.ginv_v[k](i, j) - o.coeffs[k]) <= 1e-7 * std::max(1.0, std::abs(o.coeffs[k])));
    }
  // ∂_1 of g^{-1}[1] against a spatial central difference of the series value.
  const double h = 1e-5;
  ChartPoint xp = x, xm = x;
  xp[0] += h;
  xm[0] -= h;
  const MatrixXd dfd = (point_geometry(s, xp, 2).ginv_v[1] - point_geometry(s, xm, 2).ginv_v[1]) / (2 * h);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(geo.ginv[1](i, j).d({0}) == doctest::Approx(dfd(i, j)).epsilon(1e-6));
}

TEST_CASE("christoffel series") {
  std::mt19937_64 rng(2);
  const ChartPoint x = random_point(rng);
  MatrixXd gb = MatrixXd::Identity(4, 4) * 2;
  gb(0, 1) = gb(1, 0) = 0.3;
  MatrixXd gp = MatrixXd::Ones(4, 4) * 0.1;
  auto c = christoffel_series(constant_scene(gb, gp), x, 2);
  for (int m = 0; m <= 2; ++m)
    for (int k = 0; k < 4; ++k) CHECK(c[m][k].norm() == 0);
  auto e = christoffel_series(builtin_scene("euclidean4"), x, 2);
  for (int k = 0; k < 4; ++k) CHECK(e[0][k].norm() == 0);

  // ḡ = e^{2φ}δ: Γ^k_ij = δ_ki ∂_jφ + δ_kj ∂_iφ − δ_ij ∂_kφ.
  const Expr phi = parse("0.3*sin(x1) + 0.2*cos(x2 + x3)");
  const MetricScene cf = conformally_flat_scene(phi);
  auto g = christoffel_series(cf, x, 2);
  const Jet dphi = jet_eval(phi, x.data(), 4, 1);
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double expect = (k == i) * dphi.d({j}) + (k == j) * dphi.d({i}) - (i == j) * dphi.d({k});
        CHECK(g[0][k](i, j) == doctest::Approx(expect).epsilon(1e-12).scale(1));
        CHECK(g[1][k](i, j) == 0);
      }
  // and the finite-difference route through the oracle's own Christoffels
  const Probes none{};
  auto o = exact_all_at_eps(cf, 0.0, x, none);
  for (int k = 0; k < 4; ++k) CHECK((o.gamma[k] - g[0][k]).norm() <= 1e-12);
}

TEST_CASE("christoffel symmetry at every order") {
  std::mt19937_64 rng(4);
  const MetricScene s = builtin_scene("random_smooth", 5);
  auto g = christoffel_series(s, random_point(rng), 3);
  for (int m = 0; m <= 3; ++m)
    for (int k = 0; k < 4; ++k) CHECK((g[m][k] - g[m][k].transpose()).norm() <= 1e-12);
}

TEST_CASE("scalar curvature series examples") {
  std::mt19937_64 rng(6);
  auto e = scalar_curvature_series(builtin_scene("euclidean4"), random_point(rng), 2);
  CHECK(e[0] == 0);
  CHECK(e[1] == 0);
  CHECK(e[2] == 0);

  const MetricScene sphere = builtin_scene("sphere4_stereo");
  for (int t = 0; t < 10; ++t) {
    const ChartPoint x = random_point(rng);
    auto r = scalar_curvature_series(sphere, x, 2);
    CHECK(std::abs(r[0] - 12) <= 1e-8);
    CHECK(std::abs(exact_at_eps(sphere, 0.0, {Quantity::ScalarCurvature}, x, {}) - 12) <= 1e-8);
  }

  MatrixXd gp = MatrixXd::Zero(4, 4);
  gp(0, 0) = 0.5;
  gp(1, 2) = gp(2, 1) = -0.2;
  auto c = scalar_curvature_series(constant_scene(MatrixXd::Identity(4, 4), gp), random_point(rng), 2);
  CHECK(c[1] == 0);
  CHECK(c[2] == 0);
}

TEST_CASE("scalar curvature series matches the oracle on builtin scenes") {
  std::mt19937_64 rng(8);
  for (const std::string name : {"torus_bump", "random_smooth", "conformally_flat", "sphere4_stereo"}) {
    MetricScene s = builtin_scene(name, 9);
    if (s.perturbation_is_zero()) s = with_random_perturbation(s, 3);
    for (int t = 0; t < 3; ++t) {
      const ChartPoint x = random_point(rng);
      auto r = scalar_curvature_series(s, x, 2);
      auto o = extract_scene_series(s, x, {Quantity::ScalarCurvature}, {}, 2);
      INFO(name << " r = [" << r[0] << ", " << r[1] << ", " << r[2] << "] oracle [" << o.coeffs[0] << ", "
                << o.coeffs[1] << ", " << o.coeffs[2] << "]");
      CHECK(series_gap(r, o) <= 1e-6);
    }
  }
}

TEST_CASE("volume coefficients") {
  std::mt19937_64 rng(10);
  const MatrixXd I = MatrixXd::Identity(4, 4);
  auto [c1, c2] = volume_coefficients(I);
  CHECK(c1 == 2);
  CHECK(c2 == 1);

  const MetricScene flat = builtin_scene("sphere4_stereo");
  auto v0 = volume_density_series(flat, random_point(rng), 2);
  CHECK(v0.closed[0] == 1);
  CHECK(v0.closed[1] == 0);
  CHECK(v0.closed[2] == 0);

  const MetricScene s = builtin_scene("random_smooth", 4);
  const Expr f = parse("exp(0.3*x1) * (1 + 0.2*sin(x2))");
  const MetricScene fs = scaled_scene(s, f);
  for (int t = 0; t < 5; ++t) {
    const ChartPoint x = random_point(rng);
    auto v = volume_density_series(s, x, 2);
    for (int k = 0; k <= 2; ++k) CHECK(std::abs(v.closed[k] - v.sqrt_route[k]) <= 1e-10);
    auto o = extract_scene_series(s, x, {Quantity::SqrtDetRatio}, {}, 2);
    for (int k = 0; k <= 2; ++k) CHECK(std::abs(v.closed[k] - o.coeffs[k]) <= 1e-8);
    auto vf = volume_density_series(fs, x, 2);
    for (int k = 0; k <= 2; ++k) CHECK(std::abs(vf.closed[k] - v.closed[k]) <= 1e-12);
  }
}

TEST_CASE("oracle exact values at finite eps") {
  MetricScene s = builtin_scene("random_smooth", 2);
  s.perturbation = s.base;
  const ChartPoint x = {0.1, 0.2, 0.3, 0.4};
  CHECK(exact_at_eps(s, 0.1, {Quantity::SqrtDetRatio}, x, {}) == doctest::Approx(1.21).epsilon(1e-12));
  CHECK(exact_at_eps(builtin_scene("euclidean4"), 0.0, {Quantity::ScalarCurvature}, x, {}) == 0);
}
