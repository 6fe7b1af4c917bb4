#pragma once

#include "steer/operators.hpp"
#include "steer/scenarios.hpp"

#include <array>

namespace steer {

/// Observed <A_0⊗X>, <A_1⊗Y>, <A_2⊗Z>.
struct PauliCorrelations {
  double cxx = 0.0, cyy = 0.0, czz = 0.0;

  void validate() const;
};

struct CriterionResult {
  double value = 0.0;
  bool steering = false;
};

/// cxx + cyy + czz >= -sqrt3 for unsteerable data.
CriterionResult pauli_linear_witness(const PauliCorrelations& c);
/// cxx^2 + cyy^2 + czz^2 <= 1 for unsteerable data; value is the sum of squares.
CriterionResult pauli_nonlinear_criterion(const PauliCorrelations& c);
/// 1 - c_i^2 - c_j^2 >= 0 for the pairs (yy,zz), (xx,zz), (xx,yy).
std::array<CriterionResult, 3> pauli_two_setting_criteria(const PauliCorrelations& c);

/// (ab - c1^2)(ab - c2^2) - a^2 >= 0 for unsteerable data.
CriterionResult gaussian_det_criterion(const GaussianStdForm& g);
/// Minimum eigenvalue of gamma + i(0 ⊕ Omega_B).
CriterionResult gaussian_wiseman_criterion(const GaussianStdForm& g);
/// [[a,R,c1,0],[R,a,0,c2],[c1,0,b,i],[0,c2,-i,b]].
CMatrix gaussian_moment_matrix(const GaussianStdForm& g, double r);

struct CompletionResult {
  bool completable = false;
  double best_r = 0.0;
  double best_min_eigenvalue = 0.0;
};

/// Maximizes the (concave) minimum eigenvalue of gaussian_moment_matrix over R in [-a, a].
CompletionResult gaussian_psd_completion(const GaussianStdForm& g);

}  // namespace steer
