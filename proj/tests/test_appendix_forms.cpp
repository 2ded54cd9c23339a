#include "doctest.h"

#include <cmath>

#include "bimetric/appendix_forms.hpp"

using namespace bimetric;

namespace {

const std::vector<ChartPoint> kPoints = {{0.3, -0.2, 0.4, 0.1}, {1.1, 0.7, -0.5, 0.9}, {-0.8, 0.2, 1.3, -0.4}};

double gap(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0 ? 0.0 : std::abs(a - b) / s;
}

MetricScene perturbed(const std::string& name) {
  MetricScene s = builtin_scene(name);
  if (s.perturbation_is_zero()) s = with_random_perturbation(s, 3);
  return s;
}

}  // namespace

TEST_CASE("form table shape") {
  const auto& forms = appendix_forms();
  CHECK(forms.size() == 14);
  int total = 0;
  for (const auto& f : forms) {
    int pos = 0;
    for (const auto& t : f.summands) {
      CHECK(t.position == ++pos);
      CHECK(t.row >= 1);
    }
    total += static_cast<int>(f.summands.size());
  }
  CHECK(total == 92);
  CHECK(appendix_form("r2").summands.size() == 23);
  CHECK(appendix_form("G2").free == "kij");
  CHECK_THROWS_AS(appendix_form("r3"), ConfigError);
}

TEST_CASE("index audit") {
  CHECK(audit_summand("gi(a,b)f1{a}f2{b}").consistent);
  CHECK(audit_summand("G(k;i,j)", "kij").consistent);
  auto twice_up = audit_summand("gi(a,b)gi(a,c)f1{b}f2{c}");
  CHECK_FALSE(twice_up.consistent);
  CHECK(twice_up.offending.count('a') == 1);
  CHECK_FALSE(audit_summand("gi(a,b)gi(a,b)gi(a,b)").consistent);
  CHECK_FALSE(audit_summand("g(a,b)f1{a,b}").consistent);
}

TEST_CASE("every fix replaces an index-inconsistent summand by a consistent one") {
  std::set<std::string> ids;
  for (const FormFix& fx : appendix_fixes()) {
    INFO(fx.id);
    CHECK(ids.insert(fx.id).second);
    CHECK(fx.id == fx.form + "." + std::to_string(fx.position));
    const AppendixForm& f = appendix_form(fx.form);
    REQUIRE(fx.position >= 1);
    REQUIRE(fx.position <= static_cast<int>(f.summands.size()));
    CHECK_FALSE(audit_summand(f.summands[fx.position - 1].text, f.free).consistent);
    CHECK(audit_summand(fx.replacement, f.free).consistent);
    CHECK_FALSE(fx.reason.empty());
    CHECK(fx.changes_sign == (fx.kinds.find("sign") != std::string::npos));
  }
  // every inconsistent summand has a fix
  for (const auto& f : appendix_forms())
    for (const auto& t : f.summands)
      if (!audit_summand(t.text, f.free).consistent) {
        INFO(f.name << " " << t.position);
        CHECK(ids.count(f.name + "." + std::to_string(t.position)) == 1);
      }
}

TEST_CASE("fixes are individually toggleable") {
  const MetricScene s = perturbed("random_smooth");
  const AppendixPoint p = appendix_point(s, kPoints[0], s.probes.at("f1"), s.probes.at("f2"));
  for (const std::string name : {"r1", "a2", "d2"}) {
    const double verbatim = appendix_eval(name, p);
    const double all = appendix_eval(name, p, fix_ids(name));
    double sum_of_steps = 0;
    for (const std::string& id : fix_ids(name)) sum_of_steps += appendix_eval(name, p, {id}) - verbatim;
    CHECK(std::abs(verbatim + sum_of_steps - all) <= 1e-12 * std::max(1.0, std::abs(all)));
  }
  CHECK(appendix_eval("r0", p, fix_ids("a2")) == appendix_eval("r0", p));
  CHECK_THROWS_AS(appendix_eval("r1", p, {"r1.99"}), ConfigError);
  CHECK_THROWS_AS(appendix_eval("z9", p), ConfigError);
}

TEST_CASE("derivative-free scene gives zero everywhere") {
  MetricScene s = constant_metric_scene(2);
  const Expr one = num(1), two = num(2);
  const AppendixPoint p = appendix_point(s, kPoints[1], one, two);
  for (const auto& f : appendix_forms()) {
    if (f.name[0] == 'G') continue;
    INFO(f.name);
    CHECK(appendix_eval(f.name, p) == 0);
    CHECK(appendix_eval(f.name, p, fix_ids(f.name)) == 0);
    CHECK(engine_value(f.name, p) == 0);
  }
}

TEST_CASE("euclidean quadratic probes") {
  const MetricScene e = builtin_scene("euclidean4");
  const Expr q = parse("x1^2");
  const ChartPoint x{0.4, -0.3, 0.2, 0.7};
  CHECK(std::abs(appendix_eval("d0", e, x, q, q, false) - 4) <= 1e-12);
  CHECK(std::abs(appendix_eval("d0", e, x, q, q, true) - 4) <= 1e-12);
  const AppendixPoint p = appendix_point(e, x, q, q);
  CHECK(std::abs(engine_value("d0", p) - 4) <= 1e-12);
}

TEST_CASE("constant metrics agree with the engine to rounding") {
  std::vector<MetricScene> scenes;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) scenes.push_back(constant_metric_scene(seed));
  const auto recs = crosscheck_appendix(scenes, kPoints);
  CHECK(recs.size() == 14 * scenes.size() * kPoints.size());
  for (const auto& [name, g] : summarize_gaps(recs)) {
    INFO(name << " verbatim " << g.verbatim << " corrected " << g.corrected);
    CHECK(g.failures == 0);
    CHECK(std::min(g.verbatim, g.corrected) <= 1e-12);
    CHECK(g.corrected <= 1e-12);
  }
}

TEST_CASE("corrected forms on general scenes") {
  for (const std::string name : {"random_smooth", "torus_bump", "conformally_flat"}) {
    const MetricScene s = perturbed(name);
    for (const ChartPoint& x : kPoints) {
      const AppendixPoint p = appendix_point(s, x, s.probes.at("f1"), s.probes.at("f2"));
      INFO(name);
      CHECK(gap(appendix_eval("r1", p, fix_ids("r1")), engine_value("r1", p)) <= 1e-8);
      for (const std::string c : {"r2", "a0", "a1", "a2", "b0", "b2", "d0", "d1", "d2"})
        CHECK(gap(appendix_eval(c, p, fix_ids(c)), engine_value(c, p)) <= 1e-8);
      for (const std::string c : {"G1", "G2"}) {
        const Rank3 e = engine_tensor(c, p), t = appendix_eval_tensor(c, p, fix_ids(c));
        for (int k = 0; k < 4; ++k) CHECK((e[k] - t[k]).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
}

TEST_CASE("discrepancy records") {
  const std::vector<MetricScene> scenes = {perturbed("random_smooth")};
  const auto recs = crosscheck_appendix(scenes, {kPoints[0]});
  const auto again = crosscheck_appendix(scenes, {kPoints[0]});
  REQUIRE(recs.size() == 14);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    INFO(r.coefficient);
    CHECK(r.error.empty());
    CHECK(r.abs_gap == again[i].abs_gap);
    if (r.coefficient[0] != 'G') {
      CHECK(r.abs_gap == std::abs(r.engine - r.transcription));
      CHECK(r.rel_gap == doctest::Approx(gap(r.engine, r.transcription)));
      CHECK(r.corrected_abs_gap == std::abs(r.engine - r.corrected));
    }
    CHECK(r.suspected_typo == (r.rel_gap > 1e-8 && r.corrected_rel_gap <= 1e-8));
  }
  // the sign slips in r0 and b1 sit in index-consistent summands and stay open
  for (const auto& r : recs)
    if (r.coefficient == "r0" || r.coefficient == "b1") CHECK(r.corrected_rel_gap > 1e-3);
}
