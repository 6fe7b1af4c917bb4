#pragma once

#include "steer/io.hpp"
#include "steer/moments.hpp"
#include "steer/sdp.hpp"
#include "steer/witnesses.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace steer::app {

inline constexpr int kConfigVersion = 1;

struct RunConfig {
  Json scenario;    // {"family": ..., family parameters}
  Json string_set;  // {"level": k} | {"named": ...} | {"words": [...]}, null for the family default
  ObservabilityPolicy policy = ObservabilityPolicy::Full;
  SolverOptions solver;
  std::string out_dir = "steer-out";
  std::uint64_t seed = 0;

  /// Canonical echo with defaults filled in.
  Json to_json() const;
};

/// Validates against the versioned schema; unknown keys are rejected at every level.
RunConfig parse_config(const Json& doc);
RunConfig load_config(const std::string& path);

/// Family parameters with defaults filled in; throws ConfigError on unknown or out-of-range values.
Json normalize_scenario(const Json& scenario);

struct Scenario {
  std::string id;
  std::unique_ptr<MomentSource> source;
  BobAlgebra algebra;
  StringSet default_set;
};

Scenario make_scenario(const Json& scenario, std::uint64_t seed);
StringSet make_string_set(const Json& set_spec, const Scenario& scenario);

struct PipelineResult {
  MomentTemplate tmpl;
  SdpProblem problem;
  SdpSolution solution;
  CertificateReport certificate;
  Decision decision = Decision::InconclusiveMargin;
  double build_ms = 0.0;
  double solve_ms = 0.0;
};

PipelineResult run_pipeline(const RunConfig& config, const Scenario& scenario);
PipelineResult run_pipeline(const RunConfig& config);

/// Same scenario at Fock truncation d + 2 (noon family only).
std::optional<Json> stability_rerun(const RunConfig& config, const PipelineResult& base);

Witness extract_witness(const RunConfig& config, const PipelineResult& result);

/// Single scan point: solve with scenario[param] = value.
ScanPoint scan_point(const RunConfig& config, const std::string& param, double value);

}  // namespace steer::app
