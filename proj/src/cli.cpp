#include "bimetric/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "bimetric/errors.hpp"
#include "bimetric/suites.hpp"

namespace bimetric {

namespace {

using nlohmann::json;

ChartPoint parse_point(const std::string& csv, int dim) {
  ChartPoint x;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      x.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad coordinate '" + item + "' in --point");
    }
  }
  if (static_cast<int>(x.size()) != dim)
    throw ConfigError("--point has " + std::to_string(x.size()) + " coordinates, the scene has dimension " +
                      std::to_string(dim));
  return x;
}

void apply_probe(MetricScene& s, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("probe override '" + assignment + "' is not NAME=EXPR");
  const std::string name = assignment.substr(0, eq);
  if (name != "f0" && name != "f1" && name != "f2") throw ConfigError("wres probes are f0, f1 and f2, not '" + name + "'");
  try {
    s.probes[name] = parse(assignment.substr(eq + 1));
  } catch (const std::exception& e) {
    throw ConfigError("probe " + name + ": " + e.what());
  }
}

struct Common {
  std::string scene, out;
  std::vector<std::string> tols;
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--scene", c.scene, "scene JSON path or builtin:NAME[:SEED]")->required();
  cmd->add_option("--tol", c.tols, "tolerance override NAME=VALUE");
  cmd->add_option("--out", c.out, "write the report here instead of standard output");
  cmd->add_option("--threads", c.threads, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
}

void start(VerificationReport& rep, const std::string& command, const MetricScene& s, const Common& c) {
  rep.command = command;
  rep.scene_id = s.name;
  rep.scene_digest = scene_digest(s);
  for (const auto& t : c.tols) rep.tolerances.set(t);
  rep.parameters["scene"] = c.scene;
  rep.parameters["threads"] = c.threads;
}

void emit(const VerificationReport& rep, const Common& c, std::ostream& out, std::ostream& err) {
  const std::string text = report_json(rep).dump(2) + "\n";
  if (c.out.empty()) {
    out << text;
  } else {
    std::ofstream f(c.out);
    if (!f) throw ConfigError("cannot write report to '" + c.out + "'");
    f << text;
  }
  err << human_summary(rep);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"bimetric: ε-series of metric perturbations and their conformal invariants"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Common ce, cv, cw;
  std::string point;
  int order = 2;
  std::vector<std::string> quantities;
  CLI::App* expand = app.add_subcommand("expand", "ε-series of geometric quantities at one point");
  add_common(expand, ce);
  expand->add_option("--point", point, "chart point as comma separated coordinates")->required();
  expand->add_option("--order", order, "highest ε order")->check(CLI::NonNegativeNumber);
  expand->add_option("--quantity", quantities, "r ginv gamma lap conflap t a b d a4 c (default all)");

  std::string suite;
  std::uint64_t seed = 0;
  SuiteOptions sopt;
  CLI::App* verify = app.add_subcommand("verify", "run a verification campaign");
  add_common(verify, cv);
  verify->add_option("--suite", suite, "covariance invariants intertwining oracle appendix hochschild")->required();
  CLI::Option* seed_opt = verify->add_option("--seed", seed, "campaign seed (drawn and printed when absent)");
  verify->add_option("--points", sopt.points, "sample points")->check(CLI::PositiveNumber);
  verify->add_option("--grid", sopt.grid, "Hochschild nodes per axis")->check(CLI::Range(2, 64));

  WresOptions wopt;
  std::vector<std::string> probes;
  bool no_oracle = false;
  CLI::App* wres = app.add_subcommand("wres", "variations of the integrated Connes functional");
  add_common(wres, cw);
  wres->add_option("--grid", wopt.grid, "nodes per axis")->check(CLI::Range(2, 256));
  wres->add_option("--probe", probes, "probe override f0=EXPR, f1=EXPR or f2=EXPR");
  wres->add_flag("--no-oracle", no_oracle, "skip the ε-FD oracle");
  wres->add_flag("--refine", wopt.refine, "gate against a run on twice the grid");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForVersion& e) {
    out << kToolVersion << "\n";
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    VerificationReport rep;
    const Common* common = nullptr;
    if (*expand) {
      common = &ce;
      const MetricScene s = resolve_scene(ce.scene);
      start(rep, "expand", s, ce);
      const ChartPoint x = parse_point(point, s.dim);
      if (quantities.empty()) quantities = expand_quantities();
      rep.parameters["point"] = x;
      rep.parameters["order"] = order;
      rep.parameters["quantities"] = quantities;
      rep.checks = expand_records(s, x, order, quantities);
    } else if (*verify) {
      common = &cv;
      const MetricScene s = resolve_scene(cv.scene);
      start(rep, "verify", s, cv);
      if (!*seed_opt) {
        seed = std::random_device{}();
        err << "seed " << seed << "\n";
      }
      rep.seed = seed;
      sopt.seed = seed;
      sopt.tol = rep.tolerances;
      sopt.par.threads = cv.threads;
      rep.parameters["suite"] = suite;
      rep.parameters["points"] = sopt.points;
      rep.parameters["grid"] = sopt.grid;
      rep.checks = run_suite(suite, s, sopt);
    } else {
      common = &cw;
      MetricScene s = resolve_scene(cw.scene);
      for (const auto& p : probes) apply_probe(s, p);
      start(rep, "wres", s, cw);
      wopt.oracle = !no_oracle;
      wopt.tol = rep.tolerances;
      wopt.par.threads = cw.threads;
      rep.parameters["grid"] = wopt.grid;
      rep.parameters["oracle"] = wopt.oracle;
      rep.parameters["refine"] = wopt.refine;
      rep.parameters["probes"] = {{"f0", print(s.probe("f0"))}, {"f1", print(s.probe("f1"))}, {"f2", print(s.probe("f2"))}};
      rep.checks = wres_records(s, s.probe("f0"), s.probe("f1"), s.probe("f2"), wopt).checks;
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(rep, *common, out, err);
    return rep.passed() ? kExitPass : kExitFail;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "numeric domain error: " << e.what() << "\n";
    return kExitDomain;
  }
}

}  // namespace bimetric
