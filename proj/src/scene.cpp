#include "bimetric/scene.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

namespace bimetric {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

// Portable uniform draw in [lo, hi): the standard distributions are not
// specified bit-for-bit across library implementations.
struct Draw {
  std::uint64_t state;
  explicit Draw(std::uint64_t seed) : state(seed ^ 0x9e3779b97f4a7c15ULL) {}
  std::uint64_t next() {
    // splitmix64
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53; }
  int pick(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
  // Round to 6 decimals so fixtures print compactly.
  double coef(double lo, double hi) { return std::round(uniform(lo, hi) * 1e6) / 1e6; }
};

std::vector<Expr> filled(int n, const Expr& e) { return std::vector<Expr>(n * n, e); }

std::vector<Expr> diagonal(int n, const Expr& e) {
  std::vector<Expr> m = filled(n, num(0));
  for (int i = 0; i < n; ++i) m[i * n + i] = e;
  return m;
}

// a·sin(k·x + φ) with integer wave vector, periodic on [0, 2π)^n.
Expr trig_mode(Draw& d, int n, double amp) {
  Expr arg;
  for (int k = 0; k < n; ++k) {
    const int w = d.pick(-1, 1);
    if (w == 0) continue;
    Expr t = w == 1 ? var(k) : neg(var(k));
    arg = arg ? add(arg, t) : t;
  }
  const double phase = d.coef(0, kTwoPi);
  arg = arg ? add(arg, num(phase)) : num(phase);
  return mul(num(d.coef(-amp, amp)), apply(Op::Sin, arg));
}

std::string key_of(int i, int j) { return std::to_string(i + 1) + std::to_string(j + 1); }

[[noreturn]] void config_fail(const std::string& origin, const std::string& what) {
  throw ConfigError(origin + ": " + what);
}

Expr parse_field(const json& v, const std::string& origin, const std::string& where, int dim) {
  Expr e;
  if (v.is_number()) {
    e = num(v.get<double>());
  } else if (v.is_string()) {
    try {
      e = parse(v.get<std::string>());
    } catch (const ConfigError& err) {
      config_fail(origin, where + ": " + err.what());
    }
  } else {
    config_fail(origin, where + ": expected an expression string");
  }
  if (max_var(e) >= dim)
    config_fail(origin, where + ": bad coordinate index x" + std::to_string(max_var(e) + 1) + " in dimension " +
                            std::to_string(dim));
  return e;
}

std::vector<Expr> parse_matrix(const json& obj, const std::string& origin, const std::string& field, int dim) {
  if (!obj.is_object()) config_fail(origin, "'" + field + "' must be an object of \"ij\" entries");
  std::vector<Expr> m = filled(dim, num(0));
  std::set<std::string> upper_given;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& k = it.key();
    if (k.size() != 2 || !std::isdigit(static_cast<unsigned char>(k[0])) ||
        !std::isdigit(static_cast<unsigned char>(k[1])))
      config_fail(origin, "'" + field + "': bad entry key '" + k + "'");
    const int i = k[0] - '1', j = k[1] - '1';
    if (i < 0 || j < 0 || i >= dim || j >= dim)
      config_fail(origin, "'" + field + "': bad coordinate index in key '" + k + "'");
    if (i <= j) upper_given.insert(k);
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string& k = it.key();
    const int i = k[0] - '1', j = k[1] - '1';
    if (i > j) {
      // Lower-triangle text is ignored when its mirror is present; alone it
      // signals a metric written asymmetrically.
      if (!upper_given.count(key_of(j, i)))
        config_fail(origin, "asymmetric metric field: '" + field + "' has entry " + k + " without " + key_of(j, i));
      continue;
    }
    Expr e = parse_field(it.value(), origin, field + "." + k, dim);
    m[i * dim + j] = e;
    m[j * dim + i] = e;
  }
  return m;
}

json matrix_json(const std::vector<Expr>& m, int dim) {
  json o = json::object();
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      const Expr& e = m[i * dim + j];
      if (is_zero_literal(e)) continue;
      o[key_of(i, j)] = print(e);
    }
  return o;
}

std::string line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

bool MetricScene::perturbation_is_zero() const {
  for (const auto& e : perturbation)
    if (!is_zero_literal(e)) return false;
  return true;
}

const Expr& MetricScene::probe(const std::string& n) const {
  auto it = probes.find(n);
  if (it == probes.end()) throw ConfigError("scene '" + name + "' has no probe '" + n + "'");
  return it->second;
}

double spd_min_pivot(const Eigen::MatrixXd& m) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success) return -INFINITY;
  return ldlt.vectorD().minCoeff();
}

MetricScene parse_scene(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    config_fail(origin, "JSON parse error at " + line_col(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
  }
  if (!j.is_object()) config_fail(origin, "top level must be an object");
  static const std::set<std::string> known = {"name", "dim", "order", "base", "perturbation",
                                              "conformal_factor", "probes", "periodic", "period"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) config_fail(origin, "unknown key '" + it.key() + "'");

  MetricScene s;
  s.name = j.value("name", origin);
  if (!j.contains("dim") || !j["dim"].is_number_integer()) config_fail(origin, "'dim' must be an integer");
  s.dim = j["dim"].get<int>();
  if (s.dim < 1 || s.dim > kMaxJetDim) config_fail(origin, "'dim' out of range");
  if (j.contains("order")) {
    if (!j["order"].is_number_integer()) config_fail(origin, "'order' must be an integer");
    s.order = j["order"].get<int>();
    if (s.order < 1 || s.order > 8) config_fail(origin, "'order' out of range");
  }
  if (!j.contains("base")) config_fail(origin, "missing 'base'");
  s.base = parse_matrix(j["base"], origin, "base", s.dim);
  s.perturbation = j.contains("perturbation") ? parse_matrix(j["perturbation"], origin, "perturbation", s.dim)
                                              : filled(s.dim, num(0));
  if (j.contains("conformal_factor"))
    s.conformal_factor = parse_field(j["conformal_factor"], origin, "conformal_factor", s.dim);
  if (j.contains("probes")) {
    if (!j["probes"].is_object()) config_fail(origin, "'probes' must be an object");
    static const std::set<std::string> names(std::begin(kProbeNames), std::end(kProbeNames));
    for (auto it = j["probes"].begin(); it != j["probes"].end(); ++it) {
      if (!names.count(it.key())) config_fail(origin, "unknown probe '" + it.key() + "'");
      s.probes[it.key()] = parse_field(it.value(), origin, "probes." + it.key(), s.dim);
    }
  }
  s.periodic = j.value("periodic", false);
  if (j.contains("period")) {
    if (!j["period"].is_number()) config_fail(origin, "'period' must be a number");
    s.period = j["period"].get<double>();
  }
  if (s.periodic) {
    if (s.period == 0) s.period = kTwoPi;
    if (!(s.period > 0)) config_fail(origin, "'period' must be positive");
  }
  return s;
}

MetricScene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scene file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str(), path);
}

std::string scene_to_json(const MetricScene& s) {
  json j;
  j["name"] = s.name;
  j["dim"] = s.dim;
  j["order"] = s.order;
  j["base"] = matrix_json(s.base, s.dim);
  j["perturbation"] = matrix_json(s.perturbation, s.dim);
  if (s.conformal_factor) j["conformal_factor"] = print(*s.conformal_factor);
  json p = json::object();
  for (const auto& [k, e] : s.probes) p[k] = print(e);
  j["probes"] = p;
  j["periodic"] = s.periodic;
  if (s.periodic) j["period"] = s.period;
  return j.dump(2);
}

std::string scene_digest(const MetricScene& s) {
  // FNV-1a over the canonical serialization.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : scene_to_json(s)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

std::map<std::string, Expr> default_probes() {
  return {
      {"f0", parse("1 + 0.3*sin(x1 + x3)")},
      {"f1", parse("sin(x1) + 0.5*cos(x2 + x4)")},
      {"f2", parse("cos(x2) + 0.4*sin(x3 - x1)")},
      {"f3", parse("0.7*sin(x4) + 0.2*cos(x1 + x2)")},
      {"u", parse("sin(x1)*cos(x2) + 0.3*cos(x3 + x4)")},
  };
}

Expr default_conformal_factor() { return parse("1 + 0.2*sin(x2)"); }

MetricScene conformally_flat_scene(const Expr& phi) {
  MetricScene s;
  s.name = "conformally_flat";
  s.dim = 4;
  s.base = diagonal(4, apply(Op::Exp, mul(num(2), phi)));
  s.perturbation = filled(4, num(0));
  s.conformal_factor = default_conformal_factor();
  s.probes = default_probes();
  s.periodic = true;
  s.period = kTwoPi;
  return s;
}

MetricScene builtin_scene(const std::string& name, std::uint64_t seed) {
  MetricScene s;
  s.name = name;
  s.dim = 4;
  s.conformal_factor = default_conformal_factor();
  s.probes = default_probes();
  if (name == "euclidean4") {
    s.base = diagonal(4, num(1));
    s.perturbation = filled(4, num(0));
    s.periodic = true;
    s.period = kTwoPi;
  } else if (name == "sphere4_stereo") {
    s.base = diagonal(4, parse("4/(1+x1^2+x2^2+x3^2+x4^2)^2"));
    s.perturbation = filled(4, num(0));
  } else if (name == "conformally_flat") {
    s = conformally_flat_scene(parse("0.3*sin(x1) + 0.2*cos(x2 + x3)"));
  } else if (name == "torus_bump") {
    s.base = filled(4, num(0));
    s.perturbation = filled(4, num(0));
    for (int i = 0; i < 4; ++i) {
      const int k = (i + 1) % 4;
      const std::string xi = "x" + std::to_string(i + 1), xk = "x" + std::to_string(k + 1);
      s.base[i * 4 + i] = parse("1 + 0.1*sin(" + xi + " + " + xk + ")");
      s.perturbation[i * 4 + i] = parse("0.2 + 0.3*cos(" + xi + ")");
      for (int j = i + 1; j < 4; ++j) {
        const std::string xj = "x" + std::to_string(j + 1);
        Expr b = parse("0.05*cos(" + xi + " - " + xj + ")");
        Expr p = parse("0.1*sin(" + xi + " + " + xj + ")");
        s.base[i * 4 + j] = s.base[j * 4 + i] = b;
        s.perturbation[i * 4 + j] = s.perturbation[j * 4 + i] = p;
      }
    }
    s.periodic = true;
    s.period = kTwoPi;
  } else if (name == "random_smooth") {
    // Diagonal 2 ± 0.3 against off-diagonal rows ≤ 3·0.2: Gershgorin SPD everywhere.
    Draw d(seed);
    s.base = filled(4, num(0));
    s.perturbation = filled(4, num(0));
    for (int i = 0; i < 4; ++i) {
      for (int j = i; j < 4; ++j) {
        Expr b = i == j ? add(add(num(2), trig_mode(d, 4, 0.15)), trig_mode(d, 4, 0.15)) : trig_mode(d, 4, 0.2);
        Expr p = add(num(d.coef(-0.3, 0.3)), trig_mode(d, 4, 0.3));
        s.base[i * 4 + j] = s.base[j * 4 + i] = b;
        s.perturbation[i * 4 + j] = s.perturbation[j * 4 + i] = p;
      }
    }
    s.name = "random_smooth:" + std::to_string(seed);
    s.periodic = true;
    s.period = kTwoPi;
  } else {
    throw ConfigError("unknown builtin scene '" + name + "'");
  }
  return s;
}

std::vector<std::string> builtin_names() {
  return {"euclidean4", "sphere4_stereo", "conformally_flat", "torus_bump", "random_smooth"};
}

MetricScene resolve_scene(const std::string& source) {
  const std::string prefix = "builtin:";
  if (source.rfind(prefix, 0) != 0) return load_scene(source);
  std::string rest = source.substr(prefix.size());
  std::uint64_t seed = 7;
  const auto colon = rest.find(':');
  if (colon != std::string::npos) {
    try {
      seed = std::stoull(rest.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad seed in '" + source + "'");
    }
    rest = rest.substr(0, colon);
  }
  return builtin_scene(rest, seed);
}

MetricScene with_random_perturbation(MetricScene s, std::uint64_t seed, double amplitude) {
  Draw d(seed * 7919 + 13);
  for (int i = 0; i < s.dim; ++i)
    for (int j = i; j < s.dim; ++j) {
      Expr p = add(num(d.coef(-amplitude, amplitude)), trig_mode(d, s.dim, amplitude));
      s.perturbation[i * s.dim + j] = s.perturbation[j * s.dim + i] = p;
    }
  s.name += "+pert:" + std::to_string(seed);
  return s;
}

MetricScene constant_metric_scene(std::uint64_t seed) {
  Draw d(seed * 104729 + 5);
  MetricScene s;
  s.name = "constant:" + std::to_string(seed);
  s.dim = 4;
  s.base = filled(4, num(0));
  s.perturbation = filled(4, num(0));
  // Diagonal in [1.5, 2.5] against off-diagonal rows ≤ 3·0.3: SPD.
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      const double b = i == j ? d.coef(1.5, 2.5) : d.coef(-0.3, 0.3);
      const double p = d.coef(-0.4, 0.4);
      s.base[i * 4 + j] = s.base[j * 4 + i] = num(b);
      s.perturbation[i * 4 + j] = s.perturbation[j * 4 + i] = num(p);
    }
  s.conformal_factor = default_conformal_factor();
  s.probes = default_probes();
  s.probes["f1"] = parse("x1^2 + 0.5*x1*x2*x3 - 0.3*x4^3 + x2*x4");
  s.probes["f2"] = parse("x2^2 - 0.7*x1*x3 + 0.4*x1^2*x4 + 0.2*x3^3");
  return s;
}

MetricScene scaled_scene(const MetricScene& s, const Expr& f) {
  MetricScene r = s;
  for (int i = 0; i < s.dim; ++i)
    for (int j = i; j < s.dim; ++j) {
      r.base[i * s.dim + j] = r.base[j * s.dim + i] = mul(f, s.gbar(i, j));
      if (!is_zero_literal(s.gpert(i, j)))
        r.perturbation[i * s.dim + j] = r.perturbation[j * s.dim + i] = mul(f, s.gpert(i, j));
    }
  r.name = s.name + "*f";
  return r;
}

void check_point(const MetricScene& s, const ChartPoint& x) {
  if (static_cast<int>(x.size()) != s.dim)
    throw ConfigError("point has " + std::to_string(x.size()) + " coordinates, scene dimension is " +
                      std::to_string(s.dim));
  for (double v : x)
    if (!std::isfinite(v)) throw ConfigError("point has a non-finite coordinate");
}

MetricPair eval_metric_pair(const MetricScene& s, const ChartPoint& x, int degree) {
  check_point(s, x);
  const int n = s.dim;
  MetricPair p;
  p.gbar.resize(n, n);
  p.gpert.resize(n, n);
  p.pert_zero = s.perturbation_is_zero();
  const Jet zero = Jet::constant(n, degree, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      p.gbar(i, j) = p.gbar(j, i) = jet_eval(s.gbar(i, j), x.data(), n, degree);
      p.gpert(i, j) = p.gpert(j, i) = p.pert_zero ? zero : jet_eval(s.gpert(i, j), x.data(), n, degree);
    }
  const double pivot = spd_min_pivot(values(p.gbar));
  if (!(pivot > 0)) {
    std::ostringstream os;
    os << "base metric is not positive definite at the point (smallest pivot " << pivot << ")";
    throw DomainError(os.str());
  }
  return p;
}

Eigen::MatrixXd metric_at(const MetricScene& s, const ChartPoint& x, double eps) {
  check_point(s, x);
  const int n = s.dim;
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = eval(s.gbar(i, j), x.data());
      if (eps != 0 && !is_zero_literal(s.gpert(i, j))) v += eps * eval(s.gpert(i, j), x.data());
      g(i, j) = g(j, i) = v;
    }
  return g;
}

double eps_radius(const MetricScene& s, const ChartPoint& x, double cap, double tol) {
  const Eigen::MatrixXd gb = metric_at(s, x, 0.0);
  if (!(spd_min_pivot(gb) > 0)) return 0.0;
  Eigen::MatrixXd gp = metric_at(s, x, 1.0) - gb;
  auto ok = [&](double e) { return spd_min_pivot(gb + e * gp) > 0 && spd_min_pivot(gb - e * gp) > 0; };
  if (ok(cap)) return cap;
  double lo = 0, hi = cap;
  while (hi - lo > tol) {
    const double mid = (lo + hi) / 2;
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace bimetric
