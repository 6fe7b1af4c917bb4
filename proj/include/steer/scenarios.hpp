#pragma once

#include "steer/operators.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace steer {

/// Bipartite density matrix on C^{dim_a} ⊗ C^{dim_b}, Alice first.
class QuantumState {
 public:
  QuantumState(Index dim_a, Index dim_b, CMatrix rho);

  Index dim_a() const { return dim_a_; }
  Index dim_b() const { return dim_b_; }
  const CMatrix& rho() const { return rho_; }

  /// Bob's reduced state Tr_A rho.
  CMatrix bob_marginal() const;
  /// Tr_A[(M ⊗ 1) rho] for an operator M on Alice's space.
  CMatrix conditional(const CMatrix& alice_op) const;
  cplx expectation(const CMatrix& alice_op, const CMatrix& bob_op) const;

 private:
  Index dim_a_, dim_b_;
  CMatrix rho_;
};

struct ProjectiveMeasurement {
  std::vector<double> outcomes;
  std::vector<Operator> projectors;
  Operator source_observable;
};

/// Bob's unnormalized conditional states sigma_{a|x}, with the real outcome value of each a.
struct Assemblage {
  std::vector<std::vector<double>> outcomes;   // [x][a]
  std::vector<std::vector<CMatrix>> sigma;     // [x][a]

  std::size_t n_inputs() const { return sigma.size(); }
  Index dim_b() const;
  CMatrix bob_marginal(std::size_t x = 0) const;
  /// Throws ConfigError when positivity, normalization or no-signalling fail.
  void validate(double tol = 1e-8) const;
};

struct LhsModel {
  std::vector<double> weights;                              // q_lambda
  std::vector<std::vector<std::vector<double>>> response;   // [lambda][x][a] = p(a|x,lambda)
  std::vector<CMatrix> hidden_states;                       // rho_lambda
  std::vector<std::vector<double>> outcomes;                // [x][a] outcome values

  Assemblage assemblage() const;
  void validate(double tol = 1e-9) const;
};

/// Two-mode covariance matrix in standard form, vacuum = identity.
struct GaussianStdForm {
  double a = 1.0, b = 1.0, c1 = 0.0, c2 = 0.0;

  RMatrix covariance() const;
  bool is_physical(double tol = 1e-9) const;
};

QuantumState werner_state(double w);

/// (1 - eta)|00><00| + eta|N00N><N00N|, |N00N> = (|N0> - |0N>)/sqrt2, truncated at d per mode.
QuantumState lossy_noon_state(int n, double eta, Index d);

GaussianStdForm two_mode_squeezed_std_form(double r);

ProjectiveMeasurement measurement_from_observable(const Operator& observable, double merge_tol = 1e-8);

Assemblage conditional_assemblage(const QuantumState& state, const std::vector<ProjectiveMeasurement>& measurements);

struct UnsteerableSample {
  Assemblage assemblage;
  LhsModel model;
};

/// Sigma_{a|x} = sum_lambda q_lambda p(a|x,lambda) rho_lambda with flat-simplex weights and
/// responses and G G† hidden states. Outcomes default to ±1 when dichotomic, else 0..n-1.
UnsteerableSample random_unsteerable_assemblage(std::size_t n_inputs, std::size_t n_outcomes, Index dim_b,
                                                std::size_t n_lambda, std::uint64_t seed,
                                                std::vector<double> outcome_values = {});

struct SeparableModel {
  QuantumState state;
  std::vector<Operator> observables;  // diagonal, mutually commuting
};

/// Separable state sum |a_1..a_n><a_1..a_n| ⊗ omega_{a_1..a_n} with diagonal observables.
SeparableModel build_separable_model(const LhsModel& model, Index max_alice_dim = 4096);

/// <A^power ⊗ B> evaluated directly on the state.
cplx joint_moment(const QuantumState& state, const Operator& alice_observable, int power, const Operator& bob_op);
/// sum_a a^power Tr[sigma_{a|x} B].
cplx joint_moment(const Assemblage& assemblage, std::size_t x, int power, const Operator& bob_op);
cplx joint_moment(const Assemblage& assemblage, std::size_t x, int power, const CMatrix& bob_op);

}  // namespace steer
