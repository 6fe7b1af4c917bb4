#pragma once

#include "steer/moments.hpp"
#include "steer/operators.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace steer {

/// max lambda s.t. Gamma_obs + sum_k t_k F_k - lambda 1 >= 0, on real symmetric (embedded) data.
struct SdpProblem {
  RMatrix gamma_obs;
  std::vector<RMatrix> free_dirs;
  std::vector<std::size_t> free_unknown;  // free direction -> first canonical unknown of its group
  std::vector<RMatrix> unknown_dirs;      // E_u per canonical unknown
  std::vector<std::vector<std::pair<std::size_t, double>>> pin_coeffs;  // H_r = sum c E_u
  std::vector<double> pin_values;         // gamma_obs = sum_r pin_values[r] H_r

  static SdpProblem from_template(const MomentTemplate& tmpl);

  Index size() const { return gamma_obs.rows(); }
  std::size_t n_free() const { return free_dirs.size(); }
  RMatrix evaluate(const RVector& t) const;
  /// Tr[Z H_r] for every pin.
  std::vector<double> pin_multipliers(const RMatrix& Z) const;
  /// Symmetry, shape and linear-independence checks; throws ConfigError.
  void validate() const;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 200;
};

enum class SolveStatus { Optimal, NumericalTrouble };

std::string to_string(SolveStatus status);

struct SdpSolution {
  double lambda_star = 0.0;  // dual objective of the solver, a certified lower bound on the optimum
  double beta = 0.0;         // Tr[Z Gamma_obs]
  RVector t_star;
  RMatrix Z;
  std::vector<double> mu;  // Tr[Z H_r] per pin
  double duality_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::NumericalTrouble;
  std::string message;
};

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options = {});

struct CertificateReport {
  bool accepted = false;
  std::vector<std::string> violations;
  double beta = 0.0;
  double pin_sum = 0.0;
  double min_eig_z = 0.0;
  double trace_z = 0.0;
  double max_free_residual = 0.0;
  double strong_duality_gap = 0.0;
  double min_eig_gamma = 0.0;
};

/// Re-checks dual feasibility and strong duality from the raw matrices only.
CertificateReport certify(const SdpSolution& solution, const SdpProblem& problem);

enum class Decision { Steering, NoDetection, InconclusiveMargin };

std::string to_string(Decision decision);
Decision decide(double lambda_star, double tol);

/// SDPA sparse format, see docs/sdpa_format.md.
void write_sdpa(std::ostream& out, const SdpProblem& problem);

}  // namespace steer
