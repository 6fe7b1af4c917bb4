#pragma once

#include "steer/operators.hpp"
#include "steer/scenarios.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace steer {

/// Ordered product of Bob operators, as indices into a BobAlgebra.
using BobWord = std::vector<int>;

/// Bob's trusted operator set. Word matrices are always exact: finite algebras multiply their
/// matrices directly, bosonic algebras multiply at a larger truncation and crop to the
/// requested block, so ladder-operator edge effects never enter a word matrix.
class BobAlgebra {
 public:
  BobAlgebra() = default;

  static BobAlgebra finite(std::vector<std::string> names, std::vector<Operator> ops);
  /// Generalized quadratures q_N ("q") and p_N ("p") on the first `dim` Fock states.
  static BobAlgebra bosonic(int order, Index dim);
  /// Pauli X, Y, Z on a qubit.
  static BobAlgebra pauli();

  Index dim() const { return dim_; }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  bool is_bosonic() const { return order_ > 0; }
  int order() const { return order_; }

  int index_of(std::string_view name) const;
  CMatrix word_matrix(const BobWord& word) const { return word_matrix(word, dim_); }
  CMatrix word_matrix(const BobWord& word, Index dim) const;

  std::string word_name(const BobWord& word) const;
  BobWord parse_word(std::string_view text) const;
  std::vector<std::string> word_names(const BobWord& word) const;
  BobWord word_from_names(const std::vector<std::string>& names) const;

 private:
  std::vector<std::string> names_;
  std::vector<Operator> ops_;
  Index dim_ = 0;
  int order_ = 0;
};

/// Alice multiset (sorted input indices) and an ordered Bob word.
struct MomentWord {
  std::vector<int> alice;
  BobWord bob;

  bool operator==(const MomentWord&) const = default;
};

struct StringSet {
  std::vector<MomentWord> words;
  int level = -1;  // -1 for custom sets

  std::size_t size() const { return words.size(); }
};

struct LevelOptions {
  bool involutive_alice = false;  // A_x^2 = 1: drop repeated Alice factors
  bool involutive_bob = false;    // B_y^2 = 1: drop adjacent repeated Bob factors
};

/// One stratum of total length k before Alice canonicalization (Alice factors ordered).
std::vector<MomentWord> raw_level_stratum(int n_alice, int n_bob, int k, LevelOptions options = {});

/// All canonical words of total length <= k, identity word first.
StringSet generate_level(int n_alice, int n_bob, int k, LevelOptions options = {});

/// Validates and canonicalizes a user-supplied list; rejects duplicates after canonicalization.
StringSet custom_string_set(std::vector<MomentWord> words);

std::string describe_word(const MomentWord& word, const BobAlgebra& algebra);

enum class ObservabilityPolicy { Full, LocalRestricted };

std::string to_string(ObservabilityPolicy policy);
ObservabilityPolicy policy_from_string(std::string_view text);

struct AlicePower {
  std::size_t input = 0;
  int power = 1;
};

/// Data feeding the observable entries of a moment matrix.
class MomentSource {
 public:
  virtual ~MomentSource() = default;

  virtual std::size_t n_inputs() const = 0;
  /// Announced outcome values for input x; empty for continuous or unknown outcomes.
  virtual std::vector<double> outcome_values(std::size_t x) const = 0;
  /// <A_x^power ⊗ W> (Alice identity when `alice` is empty).
  virtual cplx moment(const std::optional<AlicePower>& alice, const BobWord& word,
                      const BobAlgebra& algebra) const = 0;
  /// <A_x^power ⊗ B> for an explicit Bob matrix; sources without a Hilbert space throw.
  virtual cplx moment_matrix(const std::optional<AlicePower>& alice, const CMatrix& bob_op) const;
  virtual std::string describe() const = 0;
};

/// Quantum state plus Alice's projective measurements.
class StateSource final : public MomentSource {
 public:
  StateSource(QuantumState state, std::vector<ProjectiveMeasurement> measurements);

  std::size_t n_inputs() const override { return measurements_.size(); }
  std::vector<double> outcome_values(std::size_t x) const override;
  cplx moment(const std::optional<AlicePower>& alice, const BobWord& word, const BobAlgebra& algebra) const override;
  cplx moment_matrix(const std::optional<AlicePower>& alice, const CMatrix& bob_op) const override;
  std::string describe() const override { return "state"; }

  const QuantumState& state() const { return state_; }
  const std::vector<ProjectiveMeasurement>& measurements() const { return measurements_; }
  Assemblage assemblage() const { return conditional_assemblage(state_, measurements_); }

 private:
  QuantumState state_;
  std::vector<ProjectiveMeasurement> measurements_;
};

class AssemblageSource final : public MomentSource {
 public:
  explicit AssemblageSource(Assemblage assemblage);

  std::size_t n_inputs() const override { return assemblage_.n_inputs(); }
  std::vector<double> outcome_values(std::size_t x) const override;
  cplx moment(const std::optional<AlicePower>& alice, const BobWord& word, const BobAlgebra& algebra) const override;
  cplx moment_matrix(const std::optional<AlicePower>& alice, const CMatrix& bob_op) const override;
  std::string describe() const override { return "assemblage"; }

  const Assemblage& assemblage() const { return assemblage_; }

 private:
  Assemblage assemblage_;
};

/// Zero-mean two-mode Gaussian data from a standard-form covariance matrix. Alice's inputs 0 and 1
/// are q_A and p_A; Bob's algebra must be the order-1 bosonic algebra. Higher moments use Wick's
/// theorem with <R_i R_j> = (gamma_ij + i Omega_ij) / 2.
class GaussianSource final : public MomentSource {
 public:
  explicit GaussianSource(GaussianStdForm form);

  std::size_t n_inputs() const override { return 2; }
  std::vector<double> outcome_values(std::size_t) const override { return {}; }
  cplx moment(const std::optional<AlicePower>& alice, const BobWord& word, const BobAlgebra& algebra) const override;
  std::string describe() const override { return "gaussian-std"; }

 private:
  GaussianStdForm form_;
};

struct CanonicalUnknown {
  std::vector<int> alice;       // reduced canonical multiset
  std::size_t basis_index = 0;  // into HermitianBasis::gell_mann(algebra.dim())
  bool observable = false;      // value fixed by the observable entries
  double value = 0.0;           // meaningful when observable
  int param = -1;               // free parameter index otherwise
};

struct EntryTerm {
  std::size_t unknown;
  cplx coeff;
};

/// One real equality Tr[Gamma A_i] = b_i fixing the real or imaginary part of an observable entry.
struct Pin {
  std::size_t row = 0, col = 0;
  bool imaginary = false;
  double value = 0.0;
  std::vector<int> alice;  // empty or a single input repeated `power` times
  BobWord word;
};

struct MomentTemplate {
  StringSet words;
  BobAlgebra algebra;
  ObservabilityPolicy policy = ObservabilityPolicy::Full;

  std::size_t k = 0;
  std::vector<std::vector<EntryTerm>> entries;  // row-major k*k
  std::vector<std::vector<int>> entry_alice;    // reduced Alice multiset per entry
  std::vector<BobWord> entry_word;              // reversed(bob_i) + bob_j per entry
  std::vector<CanonicalUnknown> unknowns;
  std::vector<Pin> pins;

  CMatrix gamma_obs;               // particular solution, Gamma_obs = sum_r b_r H_r
  std::vector<CMatrix> free_dirs;  // orthonormal Hermitian directions F_k
  std::vector<std::vector<std::pair<std::size_t, double>>> pin_coeffs;  // H_r as unknown -> coefficient
  std::vector<std::size_t> free_group;  // free direction -> index of its first unknown

  std::size_t n_free() const { return free_dirs.size(); }
  const std::vector<EntryTerm>& entry(std::size_t i, std::size_t j) const { return entries[i * k + j]; }
  /// Gamma_obs + sum_k t_k F_k.
  CMatrix evaluate(const RVector& t) const;
  /// Substitute values for every canonical unknown.
  CMatrix assemble(const RVector& unknown_values) const;
  /// H_r for pin r.
  CMatrix pin_dir(std::size_t r) const;
  /// The matrix of each canonical unknown, Gamma = sum_u value_u E_u.
  std::vector<CMatrix> unknown_dirs() const;
};

MomentTemplate build_template(const StringSet& words, const BobAlgebra& algebra, ObservabilityPolicy policy,
                              const MomentSource& source);

/// Physical moment matrix <S_i† S_j> using Alice's actual observables, in word order.
CMatrix instantiate_true(const MomentTemplate& tmpl, const StateSource& source);

/// True value of every canonical unknown when Alice's observables commute (separable models).
RVector true_unknown_values(const MomentTemplate& tmpl, const StateSource& source);

}  // namespace steer
