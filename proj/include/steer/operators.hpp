#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

namespace steer {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kHermitianTol = 1e-10;

/// Dense complex square matrix with a cached Hermiticity check.
class Operator {
 public:
  Operator() = default;
  explicit Operator(CMatrix entries);

  static Operator identity(Index dim);
  static Operator zero(Index dim);

  Index dim() const { return entries_.rows(); }
  const CMatrix& matrix() const { return entries_; }
  bool is_hermitian() const { return hermitian_; }

  cplx operator()(Index i, Index j) const { return entries_(i, j); }
  cplx trace() const { return entries_.trace(); }
  Operator adjoint() const { return Operator(entries_.adjoint()); }
  Operator pow(int exponent) const;

  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator+(const Operator& a, const Operator& b);
  friend Operator operator-(const Operator& a, const Operator& b);
  friend Operator operator*(cplx s, const Operator& a);

 private:
  CMatrix entries_;
  bool hermitian_ = true;
};

bool is_hermitian(const CMatrix& m, double tol = kHermitianTol);

struct PauliSet {
  Operator x, y, z, id;
};

PauliSet pauli_set();

/// Truncated annihilation operator raised to `power`, a|n> = sqrt(n)|n-1>.
Operator annihilation(Index dim, int power = 1);

struct Quadratures {
  Operator q, p;
};

/// q_N = (a†^N + a^N)/sqrt2, p_N = i(a†^N - a^N)/sqrt2 on the first `dim` Fock states.
Quadratures generalized_quadratures(int order, Index dim);

Operator tensor(const Operator& a, const Operator& b);

/// Hermitian basis of the d×d matrices under the trace inner product.
class HermitianBasis {
 public:
  struct Expansion {
    std::vector<double> re;  // coefficients of the Hermitian part
    std::vector<double> im;  // coefficients of the anti-Hermitian part / i
    double residual = 0.0;
  };

  /// Generalized Gell-Mann basis, orthonormal: Tr[E_j E_k] = delta_jk.
  /// Element 0 is identity/sqrt(d).
  static HermitianBasis gell_mann(Index dim);

  /// Arbitrary complete set of Hermitian matrices; rejects singular Gram matrices.
  explicit HermitianBasis(std::vector<Operator> elements);

  Index dim() const { return dim_; }
  std::size_t size() const { return elements_.size(); }
  const Operator& operator[](std::size_t k) const { return elements_[k]; }
  const std::vector<Operator>& elements() const { return elements_; }
  double gram_condition() const { return gram_condition_; }

  /// M = sum_k (re_k + i im_k) E_k. Coefficients below 1e-12 are snapped to zero.
  Expansion expand(const CMatrix& m) const;
  CMatrix reconstruct(const std::vector<double>& re, const std::vector<double>& im) const;

 private:
  Index dim_ = 0;
  std::vector<Operator> elements_;
  RMatrix gram_;
  Eigen::LDLT<RMatrix> gram_solver_;
  double gram_condition_ = 1.0;
};

HermitianBasis::Expansion expand_in_basis(const Operator& m, const HermitianBasis& basis);

double min_eigenvalue(const Operator& m);
double min_eigenvalue(const CMatrix& hermitian);
double min_eigenvalue_symmetric(const RMatrix& symmetric);
std::vector<double> eigenvalues(const Operator& m);

/// Real embedding H -> [[Re H, -Im H], [Im H, Re H]].
RMatrix real_embedding(const CMatrix& h);

}  // namespace steer
