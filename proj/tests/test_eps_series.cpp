#include "doctest.h"

#include <random>

#include "bimetric/eps_series.hpp"

using namespace bimetric;
using Eigen::MatrixXd;

namespace {

EpsSeries<double> S(std::vector<double> c) { return EpsSeries<double>(std::move(c)); }

double max_diff(const EpsSeries<double>& a, const EpsSeries<double>& b) {
  double m = 0;
  for (int k = 0; k <= a.order(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

MatrixXd random_spd(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return a * a.transpose() + n * MatrixXd::Identity(n, n);
}

MatrixXd random_sym(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return (a + a.transpose()) / 2;
}

}  // namespace

TEST_CASE("cauchy product examples") {
  CHECK(max_diff(series_mul(S({1, 1, 0}), S({1, -1, 0})), S({1, 0, -1})) == 0);
  CHECK(max_diff(series_mul(S({0.3, -2, 5}), S({1, 0, 0})), S({0.3, -2, 5})) == 0);
  CHECK(max_diff(series_mul(S({1, 2, 1}), S({1, 1, 0})), S({1, 3, 3})) == 0);
  CHECK(max_diff(series_add(S({1, 2, 3}), S({-1, 0, 1})), S({0, 2, 4})) == 0);
  CHECK_THROWS_AS(series_mul(S({1, 2}), S({1, 2, 3})), std::invalid_argument);
}

TEST_CASE("series algebra is associative and commutative") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 20; ++t) {
    auto a = S({u(rng), u(rng), u(rng), u(rng)}), b = S({u(rng), u(rng), u(rng), u(rng)}),
         c = S({u(rng), u(rng), u(rng), u(rng)});
    CHECK(max_diff(a * b, b * a) <= 1e-12);
    CHECK(max_diff((a * b) * c, a * (b * c)) <= 1e-12);
  }
}

TEST_CASE("series_recip") {
  CHECK(max_diff(series_recip(S({1, 1, 0})), S({1, -1, 1})) == 0);
  CHECK(max_diff(series_recip(S({2, 0, 0})), S({0.5, 0, 0})) == 0);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int order : {1, 2, 3, 5}) {
    std::vector<double> c(order + 1);
    for (auto& x : c) x = u(rng);
    c[0] = 1;
    auto a = S(c);
    CHECK(max_diff(a * series_recip(a), unit_series(order, 1.0, 0.0)) <= 1e-12);
  }
  CHECK_THROWS_AS(series_recip(S({1e-13, 1, 0})), DomainError);
}

TEST_CASE("series_sqrt") {
  CHECK(max_diff(series_sqrt(S({1, 2, 1})), S({1, 1, 0})) == 0);
  CHECK(max_diff(series_sqrt(S({4, 0, 0})), S({2, 0, 0})) == 0);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 10; ++t) {
    auto a = S({0.5 + std::abs(u(rng)), u(rng), u(rng), u(rng)});
    auto r = series_sqrt(a);
    CHECK(max_diff(r * r, a) <= 1e-12);
  }
  CHECK_THROWS_AS(series_sqrt(S({-1, 0, 0})), DomainError);
  CHECK_THROWS_AS(series_sqrt(S({0, 1, 0})), DomainError);
}

TEST_CASE("matrix inverse examples") {
  const MatrixXd I = MatrixXd::Identity(4, 4), Z = MatrixXd::Zero(4, 4);
  auto inv = series_matrix_inverse(EpsSeries<MatrixXd>({I, Z, Z}));
  CHECK((inv[0] - I).norm() == 0);
  CHECK(inv[1].norm() == 0);
  CHECK(inv[2].norm() == 0);

  std::mt19937_64 rng(21);
  const MatrixXd g = random_spd(rng, 4), gi = g.inverse();
  auto geo = series_matrix_inverse(EpsSeries<MatrixXd>({g, g, Z}));
  CHECK((geo[0] - gi).norm() <= 1e-12);
  CHECK((geo[1] + gi).norm() <= 1e-12);
  CHECK((geo[2] - gi).norm() <= 1e-12);

  MatrixXd p = Z;
  p(0, 0) = 2;
  auto d = series_matrix_inverse(EpsSeries<MatrixXd>({I, p, Z}));
  CHECK(d[0](0, 0) == 1);
  CHECK(d[1](0, 0) == -2);
  CHECK(d[2](0, 0) == 4);
  for (int i = 1; i < 4; ++i) {
    CHECK(d[0](i, i) == 1);
    CHECK(d[1](i, i) == 0);
    CHECK(d[2](i, i) == 0);
  }

  MatrixXd sing = I;
  sing(3, 3) = 0;
  double cond = 0;
  CHECK_THROWS_AS(series_matrix_inverse(EpsSeries<MatrixXd>({sing, Z, Z}), &cond), DomainError);
}

TEST_CASE("matrix inverse matches the explicit second-order terms and stays symmetric") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 10; ++t) {
    const MatrixXd gb = random_spd(rng, 4), gp = random_sym(rng, 4), Z = MatrixXd::Zero(4, 4);
    const MatrixXd gi = gb.inverse();
    auto s = series_matrix_inverse(EpsSeries<MatrixXd>({gb, gp, Z}));
    CHECK((s[0] - gi).norm() <= 1e-12);
    CHECK((s[1] + gi * gp * gi).norm() <= 1e-12);
    CHECK((s[2] - gi * gp * gi * gp * gi).norm() <= 1e-12);
    for (int k = 0; k <= 2; ++k) CHECK((s[k] - s[k].transpose()).norm() <= 1e-12);

    auto prod = cauchy(EpsSeries<MatrixXd>({gb, gp, Z}), s, [](const MatrixXd& a, const MatrixXd& b) {
      return MatrixXd(a * b);
    });
    CHECK((prod[0] - MatrixXd::Identity(4, 4)).norm() <= 1e-12);
    CHECK(prod[1].norm() <= 1e-12);
    CHECK(prod[2].norm() <= 1e-12);
  }
}

TEST_CASE("generic order carries through matrix inversion") {
  const MatrixXd I = MatrixXd::Identity(3, 3), Z = MatrixXd::Zero(3, 3);
  auto s = series_matrix_inverse(EpsSeries<MatrixXd>({I, I, Z, Z, Z, Z}));
  for (int k = 0; k <= 5; ++k) CHECK((s[k] - (k % 2 ? -1.0 : 1.0) * I).norm() == 0);
}

TEST_CASE("series determinant") {
  std::mt19937_64 rng(2);
  const MatrixXd gb = random_spd(rng, 4), gp = random_sym(rng, 4);
  auto det = series_determinant(EpsSeries<MatrixXd>({gb, gp, MatrixXd::Zero(4, 4)}));
  const MatrixXd G = gb.inverse() * gp;
  const double d0 = gb.determinant();
  CHECK(det[0] == doctest::Approx(d0).epsilon(1e-12));
  CHECK(det[1] == doctest::Approx(d0 * G.trace()).epsilon(1e-12));
  const double e2 = (G.trace() * G.trace() - (G * G).trace()) / 2;
  CHECK(det[2] == doctest::Approx(d0 * e2).epsilon(1e-10));
}
