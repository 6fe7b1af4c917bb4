#include "steer/operators.hpp"

#include "steer/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace steer {

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Operator::Operator(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw ConfigError("operator must be square, got " + std::to_string(entries_.rows()) + "x" +
                      std::to_string(entries_.cols()));
  }
  hermitian_ = entries_.size() == 0 || steer::is_hermitian(entries_);
}

Operator Operator::identity(Index dim) { return Operator(CMatrix::Identity(dim, dim)); }
Operator Operator::zero(Index dim) { return Operator(CMatrix::Zero(dim, dim)); }

Operator Operator::pow(int exponent) const {
  if (exponent < 0) throw ConfigError("negative operator power");
  CMatrix result = CMatrix::Identity(dim(), dim());
  for (int i = 0; i < exponent; ++i) result = result * entries_;
  return Operator(std::move(result));
}

Operator operator*(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) throw ConfigError("operator product: dimension mismatch");
  return Operator(a.entries_ * b.entries_);
}

Operator operator+(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) throw ConfigError("operator sum: dimension mismatch");
  return Operator(a.entries_ + b.entries_);
}

Operator operator-(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) throw ConfigError("operator difference: dimension mismatch");
  return Operator(a.entries_ - b.entries_);
}

Operator operator*(cplx s, const Operator& a) { return Operator(s * a.entries_); }

PauliSet pauli_set() {
  const cplx i(0.0, 1.0);
  CMatrix x(2, 2), y(2, 2), z(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  y << 0.0, -i, i, 0.0;
  z << 1.0, 0.0, 0.0, -1.0;
  return {Operator(x), Operator(y), Operator(z), Operator::identity(2)};
}

Operator annihilation(Index dim, int power) {
  if (dim <= 0) throw ConfigError("annihilation: dimension must be positive");
  CMatrix a = CMatrix::Zero(dim, dim);
  for (Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return Operator(a).pow(power);
}

Quadratures generalized_quadratures(int order, Index dim) {
  if (order < 1) throw ConfigError("quadrature order must be positive");
  if (dim <= order) {
    throw ConfigError("truncation dimension " + std::to_string(dim) + " must exceed order " +
                      std::to_string(order));
  }
  const CMatrix a = annihilation(dim, order).matrix();
  const CMatrix ad = a.adjoint();
  const double s = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  return {Operator(s * (ad + a)), Operator(i * s * (ad - a))};
}

Operator tensor(const Operator& a, const Operator& b) {
  const Index da = a.dim(), db = b.dim();
  CMatrix k(da * db, da * db);
  for (Index i = 0; i < da; ++i)
    for (Index j = 0; j < da; ++j) k.block(i * db, j * db, db, db) = a(i, j) * b.matrix();
  return Operator(std::move(k));
}

// ---------------------------------------------------------------------------

namespace {

double trace_inner(const CMatrix& a, const CMatrix& b) { return (a.adjoint() * b).trace().real(); }

}  // namespace

HermitianBasis HermitianBasis::gell_mann(Index dim) {
  if (dim <= 0) throw ConfigError("basis dimension must be positive");
  std::vector<Operator> elements;
  elements.reserve(static_cast<std::size_t>(dim * dim));
  elements.push_back(Operator(CMatrix::Identity(dim, dim) / std::sqrt(static_cast<double>(dim))));
  const double s = 1.0 / std::sqrt(2.0);
  // symmetric and antisymmetric off-diagonal generators
  for (Index j = 0; j < dim; ++j) {
    for (Index k = j + 1; k < dim; ++k) {
      CMatrix sym = CMatrix::Zero(dim, dim);
      sym(j, k) = s;
      sym(k, j) = s;
      elements.emplace_back(sym);
      CMatrix anti = CMatrix::Zero(dim, dim);
      anti(j, k) = cplx(0.0, -s);
      anti(k, j) = cplx(0.0, s);
      elements.emplace_back(anti);
    }
  }
  // traceless diagonal generators
  for (Index l = 1; l < dim; ++l) {
    CMatrix diag = CMatrix::Zero(dim, dim);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (Index m = 0; m < l; ++m) diag(m, m) = norm;
    diag(l, l) = -static_cast<double>(l) * norm;
    elements.emplace_back(diag);
  }
  return HermitianBasis(std::move(elements));
}

HermitianBasis::HermitianBasis(std::vector<Operator> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw ConfigError("empty Hermitian basis");
  dim_ = elements_.front().dim();
  const auto n = static_cast<Index>(elements_.size());
  if (n != dim_ * dim_) {
    throw ConfigError("Hermitian basis of dimension " + std::to_string(dim_) + " needs " +
                      std::to_string(dim_ * dim_) + " elements, got " + std::to_string(n));
  }
  gram_.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    const auto& ej = elements_[static_cast<std::size_t>(j)];
    if (ej.dim() != dim_) throw ConfigError("Hermitian basis elements differ in dimension");
    if (!ej.is_hermitian()) throw ConfigError("Hermitian basis element is not Hermitian");
    for (Index k = 0; k <= j; ++k) {
      gram_(j, k) = gram_(k, j) = trace_inner(ej.matrix(), elements_[static_cast<std::size_t>(k)].matrix());
    }
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(gram_, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 1e-12 * hi)) throw ConfigError("singular Gram matrix: basis is not complete");
  gram_condition_ = hi / lo;
  gram_solver_.compute(gram_);
}

HermitianBasis::Expansion HermitianBasis::expand(const CMatrix& m) const {
  if (m.rows() != dim_ || m.cols() != dim_) throw ConfigError("expand: dimension mismatch");
  const CMatrix herm = (m + m.adjoint()) / 2.0;
  const CMatrix anti = (m - m.adjoint()) / cplx(0.0, 2.0);  // Hermitian as well
  const auto n = static_cast<Index>(elements_.size());
  RVector rhs_re(n), rhs_im(n);
  for (Index k = 0; k < n; ++k) {
    const CMatrix& ek = elements_[static_cast<std::size_t>(k)].matrix();
    rhs_re(k) = trace_inner(ek, herm);
    rhs_im(k) = trace_inner(ek, anti);
  }
  const RVector c = gram_solver_.solve(rhs_re);
  const RVector d = gram_solver_.solve(rhs_im);
  Expansion out;
  out.re.resize(static_cast<std::size_t>(n));
  out.im.resize(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    out.re[static_cast<std::size_t>(k)] = std::abs(c(k)) < 1e-12 ? 0.0 : c(k);
    out.im[static_cast<std::size_t>(k)] = std::abs(d(k)) < 1e-12 ? 0.0 : d(k);
  }
  out.residual = (reconstruct(out.re, out.im) - m).norm();
  if (out.residual > 1e-9 * std::max(1.0, m.norm())) {
    throw NumericalError("basis expansion residual " + std::to_string(out.residual) + " above tolerance");
  }
  return out;
}

CMatrix HermitianBasis::reconstruct(const std::vector<double>& re, const std::vector<double>& im) const {
  CMatrix m = CMatrix::Zero(dim_, dim_);
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    if (re[k] != 0.0 || im[k] != 0.0) m += cplx(re[k], im[k]) * elements_[k].matrix();
  }
  return m;
}

HermitianBasis::Expansion expand_in_basis(const Operator& m, const HermitianBasis& basis) {
  return basis.expand(m.matrix());
}

std::vector<double> eigenvalues(const Operator& m) {
  if (!m.is_hermitian()) throw ConfigError("eigenvalues: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m.matrix(), Eigen::EigenvaluesOnly);
  const RVector& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double min_eigenvalue(const Operator& m) {
  if (!m.is_hermitian()) throw ConfigError("min_eigenvalue: operator is not Hermitian");
  return min_eigenvalue(m.matrix());
}

double min_eigenvalue(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double min_eigenvalue_symmetric(const RMatrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

RMatrix real_embedding(const CMatrix& h) {
  const Index k = h.rows();
  RMatrix e(2 * k, 2 * k);
  e.topLeftCorner(k, k) = h.real();
  e.topRightCorner(k, k) = -h.imag();
  e.bottomLeftCorner(k, k) = h.imag();
  e.bottomRightCorner(k, k) = h.real();
  return e;
}

}  // namespace steer
