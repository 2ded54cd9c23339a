#include "doctest.h"

#include <random>

#include "bimetric/expr.hpp"
#include "bimetric/jet.hpp"
#include "bimetric/oracle.hpp"

using namespace bimetric;

namespace {

const double kOrigin4[4] = {0, 0, 0, 0};

Jet at(const std::string& text, std::vector<double> x, int degree = 3) {
  return jet_eval(parse(text), x.data(), static_cast<int>(x.size()), degree);
}

double max_abs_diff(const Jet& a, const Jet& b) {
  REQUIRE(a.layout() == b.layout());
  return (a.partials() - b.partials()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("layout is graded and prefix compatible") {
  const JetLayout& L3 = JetLayout::get(4, 3);
  const JetLayout& L2 = JetLayout::get(4, 2);
  CHECK(L3.size() == 35);
  CHECK(L2.size() == 15);
  for (int i = 0; i < L2.size(); ++i) CHECK(L2.alpha(i) == L3.alpha(i));
  CHECK(L3.lower() == &L2);
}

TEST_CASE("polynomial partials") {
  const Jet j = at("x1^2 + x2", {1, 2, 0, 0}, 2);
  CHECK(j.value() == doctest::Approx(3));
  CHECK(j.d({0}) == 2);
  CHECK(j.d({0, 0}) == 2);
  CHECK(j.d({1}) == 1);
  CHECK(j.d({1, 1}) == 0);
  CHECK(j.d({0, 1}) == 0);
  CHECK(j.d({2}) == 0);

  const Jet c = jet_eval(num(5), kOrigin4, 4, 3);
  CHECK(c.value() == 5);
  CHECK(c.partials().tail(c.size() - 1).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("jet_mul examples") {
  const Jet x = Jet::variable(4, 3, 0, 2.0);
  const Jet p = jet_mul(x, x);
  CHECK(p.value() == 4);
  CHECK(p.d({0}) == 4);
  CHECK(p.d({0, 0}) == 2);
  CHECK(p.d({0, 0, 0}) == 0);

  const Jet b = at("sin(x1)*exp(x2)", {0.3, -0.2, 0.1, 0.4});
  const Jet one = Jet::constant(4, 3, 1.0);
  CHECK(jet_mul(one, b) == b);

  const std::vector<double> pt = {0.7, 0, 0, 0};
  const Jet sc = jet_mul(at("sin(x1)", pt), at("cos(x1)", pt));
  CHECK(max_abs_diff(sc, at("sin(2*x1)/2", pt)) < 1e-14);

  CHECK_THROWS_AS(jet_mul(Jet::constant(4, 3, 1), Jet::constant(4, 2, 1)), std::logic_error);
  CHECK_THROWS_AS(jet_mul(Jet::constant(4, 3, 1), Jet::constant(3, 3, 1)), std::logic_error);
}

TEST_CASE("jet_recip examples") {
  const Jet two = Jet::constant(4, 3, 2.0);
  const Jet h = jet_recip(two);
  CHECK(h.value() == 0.5);
  CHECK(h.partials().tail(h.size() - 1).cwiseAbs().maxCoeff() == 0);

  const Jet r = jet_recip(at("1 + x1", {0, 0, 0, 0}));
  CHECK(r.value() == doctest::Approx(1));
  CHECK(r.d({0}) == doctest::Approx(-1));
  CHECK(r.d({0, 0}) == doctest::Approx(2));
  CHECK(r.d({0, 0, 0}) == doctest::Approx(-6));

  const std::vector<double> pt = {0.4, -0.3, 0.2, 0.9};
  CHECK(max_abs_diff(jet_recip(at("exp(x1)", pt)), at("exp(-x1)", pt)) < 1e-14);

  CHECK_THROWS_AS(jet_recip(Jet::constant(4, 3, 1e-13)), DomainError);
}

TEST_CASE("exp(x1*x2) agrees with finite differences") {
  CHECK(spatial_fd_check(parse("exp(x1*x2)"), {0.3, 0.5, 0, 0}, 3) <= 1e-5);
}

TEST_CASE("polynomials and constants are exact under the finite-difference check") {
  CHECK(spatial_fd_check(parse("x1^3 - 2*x1*x2*x4 + 3*x3^2 + x2 - 7"), {0.3, -1.2, 0.8, 2.0}, 3) <= 1e-9);
  CHECK(spatial_fd_check(parse("x1^2*x2 + 0.5*x4^3"), {1.5, 0.5, -0.25, 0.75}, 3) <= 1e-9);
  CHECK(spatial_fd_check(num(4.25), {0.1, 0.2, 0.3, 0.4}, 3) == 0);
}

TEST_CASE("every elementary function matches finite differences at degrees 1 to 3") {
  const char* exprs[] = {"sqrt(2 + x1*x2 + x3^2)", "exp(0.7*x1 - x4)", "log(3 + sin(x2) + x1*x3)",
                         "sin(x1*x2 + x3)", "cos(2*x4 - x1^2)", "(1 + x1^2)^(-2)", "x2/(2 + cos(x3))",
                         "4/(1+x1^2+x2^2+x3^2+x4^2)^2"};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (const char* s : exprs) {
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<double> x = {u(rng), u(rng), u(rng), u(rng)};
      for (int degree = 1; degree <= 3; ++degree) {
        INFO(s << " degree " << degree);
        CHECK(spatial_fd_check(parse(s), x, degree) <= 1e-5);
      }
    }
  }
}

TEST_CASE("ring axioms hold to rounding") {
  const std::vector<double> pt = {0.2, 0.4, -0.6, 0.1};
  const Jet a = at("sin(x1) + x2*x3", pt), b = at("cos(x4 - x2)", pt), c = at("exp(x3)/3", pt);
  CHECK(max_abs_diff((a * b) * c, a * (b * c)) < 1e-12);
  CHECK(max_abs_diff(a * b, b * a) < 1e-12);
  CHECK(max_abs_diff(a * (b + c), a * b + a * c) < 1e-12);
}

TEST_CASE("reciprocal inverts products down to the documented floor") {
  // a = s * u with u unit-scaled and |a| >= 1e-6.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double s : {1.0, -0.3, 1e-3, 1e-6, -1e-6}) {
    const std::vector<double> pt = {u(rng), u(rng), u(rng), u(rng)};
    const Jet unit = at("1.5 + sin(x1 + 2*x2) * cos(x3) / 2 + x4^2 / 4", pt);
    const Jet a = unit * Jet(s);
    REQUIRE(std::abs(a.value()) >= 1e-6);
    INFO("scale " << s);
    CHECK(max_abs_diff(a * jet_recip(a), Jet::constant(4, 3, 1.0)) <= 1e-10);
  }
}

TEST_CASE("partial lowers degree and matches the differentiated expression") {
  const std::vector<double> pt = {0.3, 0.1, -0.2, 0.5};
  const Jet f = at("sin(x1*x2) + x3^2*x4", pt);
  const Jet d1 = f.partial(0);
  CHECK(d1.degree() == 2);
  const Jet expect = at("x2*cos(x1*x2)", pt, 2);
  CHECK(max_abs_diff(d1, expect) < 1e-14);
  CHECK(f.truncate(1).size() == 5);
}

TEST_CASE("domain errors name the subexpression") {
  try {
    at("1 + log(x1 - 2)", {0.5, 0, 0, 0});
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("log(x1-2)") != std::string::npos);
  }
  CHECK_THROWS_AS(at("1/x2", {0, 0, 0, 0}), DomainError);
  CHECK_THROWS_AS(at("sqrt(x1)", {-1, 0, 0, 0}), DomainError);
}
