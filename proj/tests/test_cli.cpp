#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bimetric/cli.hpp"
#include "bimetric/errors.hpp"
#include "bimetric/suites.hpp"

using namespace bimetric;
using nlohmann::json;

namespace {

const std::string kScenes = BIMETRIC_SCENES_DIR;

struct Run {
  int code = -1;
  std::string out, err;
  json report() const { return json::parse(out); }
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string scene(const std::string& name) { return kScenes + "/" + name + ".json"; }

}  // namespace

TEST_CASE("check records and tolerance overrides") {
  CHECK(gated_check("a", 1e-9, 1e-8).status() == CheckStatus::Pass);
  CHECK(gated_check("a", 1e-7, 1e-8).status() == CheckStatus::Fail);
  CHECK(gated_check("a", NAN, 1e-8).status() == CheckStatus::Fail);
  CHECK(info_check("a", 5).status() == CheckStatus::Info);

  Tolerances t;
  t.set("oracle=1e-4");
  CHECK(t.oracle == 1e-4);
  CHECK(t.overrides.at("oracle") == 1e-4);
  CHECK_THROWS_AS(t.set("nosuch=1"), ConfigError);
  CHECK_THROWS_AS(t.set("oracle"), ConfigError);
  CHECK_THROWS_AS(t.set("oracle=abc"), ConfigError);
  CHECK_THROWS_AS(t.set("oracle=-1"), ConfigError);

  VerificationReport rep;
  rep.command = "verify";
  rep.checks = {gated_check("small", 1e-9, 1e-8), gated_check("big", 1e-3, 1e-8, {{"x", NAN}}),
                gated_check("bigger", 1e-2, 1e-8), info_check("note", INFINITY)};
  CHECK_FALSE(rep.passed());
  CHECK(rep.worst_failure()->name == "bigger");
  const json j = report_json(rep);
  CHECK(j["schema"] == 1);
  CHECK(j["checks"][1]["values"]["x"]["nonfinite"] == "nan");
  CHECK(j["checks"][3]["residual"]["nonfinite"] == "inf");
  CHECK(j["summary"]["fail"] == 2);
  CHECK(j["summary"]["worst"] == "bigger");
  CHECK(j.contains("timing"));
  CHECK_FALSE(report_json(rep, false).contains("timing"));
  for (const auto& c : j["checks"]) {
    if (c["status"] == "info") continue;
    const double res = c["residual"].is_number() ? c["residual"].get<double>() : INFINITY;
    CHECK((c["status"] == "pass") == (res <= c["tolerance"].get<double>()));
  }
}

TEST_CASE("scene fixtures round-trip and match the builtins") {
  const std::pair<const char*, const char*> pairs[] = {{"euclidean4", "euclidean4"},
                                                       {"sphere4", "sphere4_stereo"},
                                                       {"torus_bump", "torus_bump"},
                                                       {"random_smooth", "random_smooth"},
                                                       {"conformally_flat", "conformally_flat"}};
  for (const auto& [file, name] : pairs) {
    INFO(file);
    const MetricScene s = load_scene(scene(file));
    CHECK(scene_digest(s) == scene_digest(builtin_scene(name)));
    const std::string text = scene_to_json(s);
    CHECK(scene_to_json(parse_scene(text)) == text);
  }
  const MetricScene flat = load_scene(scene("torus_bump_unperturbed"));
  CHECK(flat.perturbation_is_zero());
  CHECK(flat.periodic);
}

TEST_CASE("campaign sampling is seeded") {
  const MetricScene s = builtin_scene("random_smooth");
  CHECK(campaign_points(s, 3, 4) == campaign_points(s, 3, 4));
  CHECK(campaign_points(s, 3, 4) != campaign_points(s, 4, 4));
  const auto f = campaign_factors(s, 3, 3);
  REQUIRE(f.size() == 3);
  CHECK(print(f[0]) == print(*s.conformal_factor));
  for (const auto& x : campaign_points(s, 9, 5))
    for (const auto& e : f) CHECK(eval(e, x.data()) > 0);
  CHECK(relative_gap(0, 0) == 0);
  CHECK(relative_gap(1, 2) == 0.5);
  CHECK(relative_gap(0, 1e-12, 1.0) == 1e-12);
  CHECK(series_gap({1, 2, 3}, {1, 2, 4}) == 0.25);
  CHECK_THROWS_AS(run_suite("nosuch", s, {}), ConfigError);
  CHECK_THROWS_AS(run_suite("hochschild", builtin_scene("sphere4_stereo"), {}), ConfigError);
}

TEST_CASE("expand examples") {
  const Run flat = cli({"expand", "--scene", scene("euclidean4"), "--point", "0,0,0,0", "--quantity", "r"});
  REQUIRE(flat.code == 0);
  const json r = flat.report()["checks"][0]["values"]["series"];
  CHECK(r == json({0.0, 0.0, 0.0}));

  const Run sphere = cli({"expand", "--scene", scene("sphere4"), "--point", "0.1,0.2,0,0", "--quantity", "r"});
  REQUIRE(sphere.code == 0);
  CHECK(std::abs(sphere.report()["checks"][0]["values"]["series"][0].get<double>() - 12) <= 1e-8);

  const Run all = cli({"expand", "--scene", "builtin:random_smooth", "--point", "0.3,0.1,-0.2,0.5"});
  REQUIRE(all.code == 0);
  CHECK(all.report()["checks"].size() == expand_quantities().size());

  const Run missing = cli({"expand", "--scene", scene("nosuch"), "--point", "0,0,0,0"});
  CHECK(missing.code == 2);
  CHECK(missing.out.empty());
  CHECK(missing.err.find("nosuch") != std::string::npos);

  CHECK(cli({"expand", "--scene", scene("euclidean4"), "--point", "0,0,0"}).code == 2);
  CHECK(cli({"expand", "--scene", scene("euclidean4"), "--point", "0,0,0,0", "--quantity", "zz"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
}

TEST_CASE("numeric domain errors exit with 3 and name the quantity") {
  const std::string path = "bimetric_test_bad_scene.json";
  {
    std::ofstream f(path);
    f << R"j({"dim": 4, "name": "bad", "base": {"11": "x1", "22": "1", "33": "1", "44": "1"}, "perturbation": {},
             "probes": {"f1": "x1", "f2": "x2", "u": "log(x2)"}})j";
  }
  const Run neg = cli({"expand", "--scene", path, "--point", "-1,0,0,0", "--quantity", "r"});
  CHECK(neg.code == 3);
  const Run log = cli({"expand", "--scene", path, "--point", "1,-1,0,0", "--quantity", "lap"});
  CHECK(log.code == 3);
  CHECK(log.err.find("quantity lap") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("verify examples") {
  const Run cov = cli({"verify", "--suite", "covariance", "--scene", scene("random_smooth"), "--seed", "7"});
  CHECK(cov.code == 0);
  const json c = cov.report();
  CHECK(c["seed"] == 7);
  CHECK(c["summary"]["fail"] == 0);
  for (const auto& k : c["checks"]) CHECK(k["residual"].get<double>() <= 1e-7);

  const Run oracle = cli({"verify", "--suite", "oracle", "--scene", scene("euclidean4"), "--seed", "1"});
  CHECK(oracle.code == 0);
  for (const auto& k : oracle.report()["checks"]) CHECK(k["residual"].get<double>() <= 1e-15);

  const Run apx = cli({"verify", "--suite", "appendix", "--scene", "builtin:random_smooth", "--seed", "2"});
  CHECK(apx.code == 0);
  const json a = apx.report();
  CHECK(a["summary"]["pass"] == 0);
  CHECK(a["summary"]["fail"] == 0);
  CHECK(a["summary"]["info"].get<int>() > 0);

  // a tolerance no computation can meet turns into a gated failure
  const Run strict = cli({"verify", "--suite", "oracle", "--scene", "builtin:random_smooth", "--seed", "1", "--points",
                          "1", "--tol", "oracle=1e-30"});
  CHECK(strict.code == 1);
  CHECK(strict.report()["tolerances"]["overrides"]["oracle"] == 1e-30);
  CHECK(strict.err.find("worst failure") != std::string::npos);

  CHECK(cli({"verify", "--suite", "nosuch", "--scene", scene("euclidean4")}).code == 2);
  CHECK(cli({"verify", "--suite", "oracle", "--scene", scene("euclidean4"), "--tol", "x=1"}).code == 2);

  const Run unseeded = cli({"verify", "--suite", "invariants", "--scene", scene("euclidean4"), "--points", "1"});
  CHECK(unseeded.code == 0);
  CHECK(unseeded.err.rfind("seed ", 0) == 0);
  CHECK(unseeded.report()["seed"].is_number_unsigned());
}

TEST_CASE("identical commands give identical payloads") {
  const std::vector<std::string> args = {"verify", "--suite", "intertwining", "--scene", "builtin:torus_bump",
                                         "--seed", "5", "--points", "2", "--threads", "2"};
  json a = cli(args).report(), b = cli(args).report();
  a.erase("timing");
  b.erase("timing");
  CHECK(a.dump() == b.dump());
}

TEST_CASE("wres examples") {
  const Run flat = cli({"wres", "--scene", scene("torus_bump_unperturbed"), "--grid", "4"});
  CHECK(flat.code == 0);
  const json v = flat.report()["checks"][0]["values"];
  CHECK(v["first"] == 0.0);
  CHECK(v["second"] == 0.0);

  const Run zero = cli({"wres", "--scene", scene("torus_bump"), "--grid", "4", "--probe", "f0=0"});
  CHECK(zero.code == 0);
  const json z = zero.report()["checks"][0]["values"];
  CHECK(z["value"] == 0.0);
  CHECK(z["first"] == 0.0);
  CHECK(z["second"] == 0.0);

  const Run bump = cli({"wres", "--scene", scene("torus_bump"), "--grid", "6"});
  CHECK(bump.code == 0);
  const json b = bump.report();
  bool saw_oracle = false;
  for (const auto& c : b["checks"])
    if (c["name"] == "wres first vs oracle") {
      saw_oracle = true;
      CHECK(c["status"] == "pass");
    }
  CHECK(saw_oracle);

  CHECK(cli({"wres", "--scene", scene("sphere4"), "--grid", "4"}).code == 2);
  CHECK(cli({"wres", "--scene", scene("torus_bump"), "--grid", "4", "--probe", "f0=x1"}).code == 2);
  CHECK(cli({"wres", "--scene", scene("torus_bump"), "--grid", "4", "--probe", "u=1"}).code == 2);
}
