#pragma once

#include "steer/moments.hpp"
#include "steer/sdp.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace steer {

enum class BobKind { Basis, Word };

/// x = -1 or power = 0 means Alice's identity.
struct WitnessLabel {
  int input = -1;
  int power = 0;
  BobKind kind = BobKind::Word;
  std::vector<std::string> word;  // operator names, kind == Word
  std::size_t basis_index = 0;    // Gell-Mann index, kind == Basis

  bool operator==(const WitnessLabel&) const = default;
};

struct WitnessTerm {
  WitnessLabel label;
  cplx coeff;

  bool operator==(const WitnessTerm&) const = default;
};

struct Provenance {
  std::string scenario;
  std::string policy;
  std::vector<std::string> string_set;
  double solver_tol = 0.0;
  double scale = 1.0;  // original witness = scale * normalized witness

  bool operator==(const Provenance&) const = default;
};

/// beta = constant + sum coeff * <A_x^power ⊗ B>; beta < 0 certifies steering.
struct Witness {
  std::vector<WitnessTerm> terms;
  double constant = 0.0;
  Provenance provenance;

  bool operator==(const Witness&) const = default;
};

/// Reads the witness off the dual multipliers of the pinned entries; rejects uncertified solutions.
Witness witness_from_dual(const MomentTemplate& tmpl, const SdpProblem& problem, const SdpSolution& solution,
                          Provenance provenance = {});

cplx evaluate_complex(const Witness& witness, const MomentSource& data, const BobAlgebra& algebra);
/// Real part of the witness value; throws NumericalError when the imaginary part exceeds 1e-9.
double evaluate(const Witness& witness, const MomentSource& data, const BobAlgebra& algebra);

std::string serialize(const Witness& witness);
Witness deserialize(std::string_view document);

/// The N00N single-photon witness with the printed four-decimal coefficients. Inputs 0 and 1 are
/// Alice's two quadratures, Bob words are over the order-1 quadratures q, p.
Witness single_photon_fixture_witness();

/// The Pauli witness <A0⊗X> + <A1⊗Y> + <A2⊗Z> + sqrt3.
Witness werner_linear_witness();

struct ScanPoint {
  double param = 0.0;
  double lambda_star = 0.0;
  bool steering = false;
  bool certified = false;
  std::string decision;
};

struct ScanResult {
  double threshold = 0.0;
  double lo = 0.0, hi = 0.0;  // final bracket
  std::vector<ScanPoint> history;
};

/// Bisection on the sign of lambda* (steering vs not) until the bracket is below tol. With
/// jobs > 1 each round evaluates jobs interior points concurrently. Throws BracketError when
/// both endpoints agree.
ScanResult threshold_scan(const std::function<ScanPoint(double)>& evaluate_point, double lo, double hi, double tol,
                          int jobs = 1);

}  // namespace steer
