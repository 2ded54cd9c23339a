#include "bimetric/report.hpp"

#include <cmath>
#include <sstream>

#include "bimetric/errors.hpp"

namespace bimetric {

namespace {

// Replaces non-finite numbers anywhere inside j by their flagged form.
void flag_nonfinite(nlohmann::json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) j = finite_or_flag(v);
  } else if (j.is_structured()) {
    for (auto& e : j) flag_nonfinite(e);
  }
}

}  // namespace

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::Fail:
      return "fail";
    case CheckStatus::Info:
      return "info";
  }
  return "?";
}

CheckStatus CheckRecord::status() const {
  if (!gated) return CheckStatus::Info;
  return std::isfinite(residual) && residual <= tolerance ? CheckStatus::Pass : CheckStatus::Fail;
}

CheckRecord gated_check(std::string name, double residual, double tolerance, nlohmann::json values) {
  return {std::move(name), std::move(values), residual, tolerance, true};
}

CheckRecord info_check(std::string name, double residual, nlohmann::json values, double tolerance) {
  return {std::move(name), std::move(values), residual, tolerance, false};
}

void Tolerances::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("tolerance override '" + assignment + "' is not NAME=VALUE");
  const std::string name = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  double value = 0;
  try {
    std::size_t used = 0;
    value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw ConfigError("tolerance '" + name + "' has a bad value '" + text + "'");
  }
  if (!(value > 0) || !std::isfinite(value)) throw ConfigError("tolerance '" + name + "' must be positive");
  const std::map<std::string, double*> slots = {
      {"covariance", &covariance}, {"invariants", &invariants},     {"oracle", &oracle},
      {"integral", &integral},     {"intertwining", &intertwining}, {"refinement", &refinement},
      {"appendix", &appendix}};
  const auto it = slots.find(name);
  if (it == slots.end()) throw ConfigError("unknown tolerance '" + name + "'");
  *it->second = value;
  overrides[name] = value;
}

nlohmann::json Tolerances::to_json() const {
  nlohmann::json j = {{"covariance", covariance}, {"invariants", invariants},     {"oracle", oracle},
                      {"integral", integral},     {"intertwining", intertwining}, {"refinement", refinement},
                      {"appendix", appendix}};
  j["overrides"] = overrides;
  return j;
}

bool VerificationReport::passed() const {
  for (const auto& c : checks)
    if (c.status() == CheckStatus::Fail) return false;
  return true;
}

const CheckRecord* VerificationReport::worst_failure() const {
  const CheckRecord* worst = nullptr;
  double ratio = -1;
  for (const auto& c : checks) {
    if (c.status() != CheckStatus::Fail) continue;
    const double r = std::isfinite(c.residual) ? c.residual / c.tolerance : INFINITY;
    if (r > ratio) {
      ratio = r;
      worst = &c;
    }
  }
  return worst;
}

int VerificationReport::count(CheckStatus s) const {
  int n = 0;
  for (const auto& c : checks) n += c.status() == s;
  return n;
}

nlohmann::json finite_or_flag(double v) {
  if (std::isfinite(v)) return v;
  return {{"nonfinite", std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf")}};
}

nlohmann::json report_json(const VerificationReport& r, bool with_timing) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    nlohmann::json e = {{"name", c.name}, {"status", status_name(c.status())}, {"residual", c.residual}};
    if (c.gated || c.tolerance > 0) e["tolerance"] = c.tolerance;
    e["values"] = c.values;
    checks.push_back(std::move(e));
  }
  nlohmann::json j = {{"schema", kReportSchema},
                      {"tool_version", kToolVersion},
                      {"command", r.command},
                      {"parameters", r.parameters},
                      {"scene", {{"id", r.scene_id}, {"digest", r.scene_digest}}},
                      {"tolerances", r.tolerances.to_json()},
                      {"checks", std::move(checks)},
                      {"summary",
                       {{"passed", r.passed()},
                        {"pass", r.count(CheckStatus::Pass)},
                        {"fail", r.count(CheckStatus::Fail)},
                        {"info", r.count(CheckStatus::Info)}}}};
  j["seed"] = r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr);
  if (const CheckRecord* w = r.worst_failure()) j["summary"]["worst"] = w->name;
  if (with_timing) j["timing"] = {{"seconds", r.seconds}};
  flag_nonfinite(j);
  return j;
}

std::string human_summary(const VerificationReport& r) {
  std::ostringstream os;
  os << r.command << " on " << r.scene_id << ": " << r.count(CheckStatus::Pass) << " pass, "
     << r.count(CheckStatus::Fail) << " fail, " << r.count(CheckStatus::Info) << " info";
  if (r.seed) os << " (seed " << *r.seed << ")";
  if (const CheckRecord* w = r.worst_failure())
    os << "\nworst failure: " << w->name << " residual " << w->residual << " > " << w->tolerance;
  os << "\n";
  return os.str();
}

}  // namespace bimetric
