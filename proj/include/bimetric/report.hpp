#pragma once

// Verification reports: per-check records with residual and tolerance, the
// tolerance table with command-line overrides, and the JSON form (schema 1).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace bimetric {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kReportSchema = 1;

enum class CheckStatus { Pass, Fail, Info };
const char* status_name(CheckStatus s);

struct CheckRecord {
  std::string name;
  nlohmann::json values = nlohmann::json::object();
  double residual = 0;
  double tolerance = 0;
  bool gated = true;
  // Info when not gated; Pass iff the residual is finite and ≤ tolerance.
  CheckStatus status() const;
};

CheckRecord gated_check(std::string name, double residual, double tolerance,
                        nlohmann::json values = nlohmann::json::object());
CheckRecord info_check(std::string name, double residual, nlohmann::json values = nlohmann::json::object(),
                       double tolerance = 0);

struct Tolerances {
  double covariance = 1e-7;
  double invariants = 1e-7;
  double oracle = 1e-6;
  double integral = 1e-5;
  double intertwining = 1e-8;
  double refinement = 1e-9;
  double appendix = 1e-8;  // relative gap read as agreement; never gates
  std::map<std::string, double> overrides;

  // "NAME=VALUE"; ConfigError on unknown names or bad values.
  void set(const std::string& assignment);
  nlohmann::json to_json() const;
};

struct VerificationReport {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
  std::string scene_id, scene_digest;
  std::optional<std::uint64_t> seed;
  Tolerances tolerances;
  std::vector<CheckRecord> checks;
  double seconds = 0;

  bool passed() const;  // every gated check passes
  // Failed gated check with the largest residual/tolerance ratio.
  const CheckRecord* worst_failure() const;
  int count(CheckStatus s) const;
};

// Number, or {"nonfinite": "nan" | "inf" | "-inf"}.
nlohmann::json finite_or_flag(double v);
// Timing is left out when with_timing is false, which makes the payload a
// pure function of command, parameters, seed and thread count.
nlohmann::json report_json(const VerificationReport& r, bool with_timing = true);
std::string human_summary(const VerificationReport& r);

}  // namespace bimetric
