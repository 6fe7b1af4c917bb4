#pragma once

#include "pipeline.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace steer::app {

enum ExitCode : int { kOk = 0, kUnexpected = 1, kConfigFailure = 2, kNumericalFailure = 3, kBracketFailure = 4 };

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::string> out_dir;
  bool timings = false;
  bool dump_template = false;
  bool dump_sdpa = false;
};

struct AnalyticArgs {
  std::vector<double> corr;  // cxx cyy czz
  std::optional<double> werner;
  std::optional<double> r;
  std::vector<double> std_form;  // a b c1 c2
};

int cmd_solve(const std::string& config_path, const GlobalOptions& opts, std::ostream& out);
int cmd_scan(const std::string& config_path, const std::string& param, double min, double max, double tol, int jobs,
             const GlobalOptions& opts, std::ostream& out);
int cmd_witness_extract(const std::string& config_path, const GlobalOptions& opts, std::ostream& out);
/// witness_ref is a file path or "fixture:single-photon" / "fixture:werner-linear".
int cmd_witness_eval(const std::string& witness_ref, const std::string& config_path, const GlobalOptions& opts,
                     std::ostream& out);
int cmd_analytic(const std::string& name, const AnalyticArgs& args, std::ostream& out);

/// Runs a command body and maps exceptions to exit codes, printing the message to err.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace steer::app
