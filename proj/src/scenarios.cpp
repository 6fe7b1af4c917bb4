#include "steer/scenarios.hpp"

#include "steer/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace steer {

QuantumState::QuantumState(Index dim_a, Index dim_b, CMatrix rho)
    : dim_a_(dim_a), dim_b_(dim_b), rho_(std::move(rho)) {
  if (dim_a <= 0 || dim_b <= 0) throw ConfigError("state dimensions must be positive");
  if (rho_.rows() != dim_a * dim_b || rho_.cols() != dim_a * dim_b) {
    throw ConfigError("density matrix size does not match dim_a*dim_b");
  }
  if (!is_hermitian(rho_)) throw ConfigError("density matrix is not Hermitian");
  if (std::abs(rho_.trace() - cplx(1.0)) > 1e-10) throw ConfigError("density matrix trace is not 1");
  if (min_eigenvalue(rho_) < -1e-10) throw ConfigError("density matrix is not positive semidefinite");
}

CMatrix QuantumState::conditional(const CMatrix& alice_op) const {
  if (alice_op.rows() != dim_a_ || alice_op.cols() != dim_a_) {
    throw ConfigError("Alice operator dimension mismatch");
  }
  CMatrix out = CMatrix::Zero(dim_b_, dim_b_);
  for (Index a = 0; a < dim_a_; ++a) {
    for (Index ap = 0; ap < dim_a_; ++ap) {
      const cplx m = alice_op(a, ap);
      if (m == cplx(0.0)) continue;
      out += m * rho_.block(ap * dim_b_, a * dim_b_, dim_b_, dim_b_);
    }
  }
  return out;
}

CMatrix QuantumState::bob_marginal() const { return conditional(CMatrix::Identity(dim_a_, dim_a_)); }

cplx QuantumState::expectation(const CMatrix& alice_op, const CMatrix& bob_op) const {
  if (bob_op.rows() != dim_b_ || bob_op.cols() != dim_b_) throw ConfigError("Bob operator dimension mismatch");
  return (conditional(alice_op) * bob_op).trace();
}

// ---------------------------------------------------------------------------

Index Assemblage::dim_b() const {
  if (sigma.empty() || sigma.front().empty()) throw ConfigError("empty assemblage");
  return sigma.front().front().rows();
}

CMatrix Assemblage::bob_marginal(std::size_t x) const {
  if (x >= sigma.size()) throw ConfigError("assemblage input index out of range");
  CMatrix sum = CMatrix::Zero(dim_b(), dim_b());
  for (const auto& s : sigma[x]) sum += s;
  return sum;
}

void Assemblage::validate(double tol) const {
  if (sigma.empty()) throw ConfigError("assemblage has no inputs");
  if (outcomes.size() != sigma.size()) throw ConfigError("assemblage outcome table does not match inputs");
  const Index d = dim_b();
  const CMatrix reference = bob_marginal(0);
  for (std::size_t x = 0; x < sigma.size(); ++x) {
    if (sigma[x].empty() || outcomes[x].size() != sigma[x].size()) {
      throw ConfigError("assemblage input " + std::to_string(x) + " has mismatched outcomes");
    }
    double total = 0.0;
    for (const auto& s : sigma[x]) {
      if (s.rows() != d || s.cols() != d) throw ConfigError("assemblage operators differ in dimension");
      if (!is_hermitian(s, tol)) throw ConfigError("assemblage operator is not Hermitian");
      if (min_eigenvalue(CMatrix((s + s.adjoint()) / 2.0)) < -tol) {
        throw ConfigError("assemblage operator is not positive semidefinite");
      }
      total += s.trace().real();
    }
    if (std::abs(total - 1.0) > tol) throw ConfigError("assemblage input " + std::to_string(x) + " not normalized");
    if ((bob_marginal(x) - reference).cwiseAbs().maxCoeff() > tol) {
      throw ConfigError("assemblage violates no-signalling at input " + std::to_string(x));
    }
  }
}

Assemblage LhsModel::assemblage() const {
  Assemblage out;
  out.outcomes = outcomes;
  out.sigma.resize(outcomes.size());
  const Index d = hidden_states.front().rows();
  for (std::size_t x = 0; x < outcomes.size(); ++x) {
    out.sigma[x].assign(outcomes[x].size(), CMatrix::Zero(d, d));
    for (std::size_t l = 0; l < weights.size(); ++l) {
      for (std::size_t a = 0; a < outcomes[x].size(); ++a) {
        out.sigma[x][a] += (weights[l] * response[l][x][a]) * hidden_states[l];
      }
    }
  }
  return out;
}

void LhsModel::validate(double tol) const {
  if (weights.empty() || weights.size() != response.size() || weights.size() != hidden_states.size()) {
    throw ConfigError("LHS model tables have inconsistent sizes");
  }
  double total = 0.0;
  for (double q : weights) {
    if (q < -tol) throw ConfigError("negative LHS weight");
    total += q;
  }
  if (std::abs(total - 1.0) > tol) throw ConfigError("LHS weights do not sum to one");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (response[l].size() != outcomes.size()) throw ConfigError("LHS response table input count mismatch");
    for (std::size_t x = 0; x < outcomes.size(); ++x) {
      if (response[l][x].size() != outcomes[x].size()) throw ConfigError("LHS response table outcome mismatch");
      double s = 0.0;
      for (double p : response[l][x]) {
        if (p < -tol) throw ConfigError("negative response probability");
        s += p;
      }
      if (std::abs(s - 1.0) > tol) throw ConfigError("response table is not stochastic");
    }
    const CMatrix& rho = hidden_states[l];
    if (!is_hermitian(rho) || std::abs(rho.trace() - cplx(1.0)) > tol || min_eigenvalue(rho) < -tol) {
      throw ConfigError("hidden state is not a valid density matrix");
    }
  }
}

// ---------------------------------------------------------------------------

RMatrix GaussianStdForm::covariance() const {
  RMatrix g = RMatrix::Zero(4, 4);
  g(0, 0) = g(1, 1) = a;
  g(2, 2) = g(3, 3) = b;
  g(0, 2) = g(2, 0) = c1;
  g(1, 3) = g(3, 1) = c2;
  return g;
}

bool GaussianStdForm::is_physical(double tol) const {
  CMatrix m = covariance().cast<cplx>();
  const cplx i(0.0, 1.0);
  m(0, 1) += i;
  m(1, 0) -= i;
  m(2, 3) += i;
  m(3, 2) -= i;
  return b * b >= 1.0 - tol && min_eigenvalue(m) >= -tol;
}

QuantumState werner_state(double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("Werner parameter must lie in [0,1]");
  Eigen::VectorXcd singlet = Eigen::VectorXcd::Zero(4);
  singlet(1) = 1.0 / std::sqrt(2.0);
  singlet(2) = -1.0 / std::sqrt(2.0);
  CMatrix rho = w * singlet * singlet.adjoint() + (1.0 - w) / 4.0 * CMatrix::Identity(4, 4);
  return QuantumState(2, 2, rho);
}

QuantumState lossy_noon_state(int n, double eta, Index d) {
  if (n < 1) throw ConfigError("N00N photon number must be positive");
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in [0,1]");
  if (d < n + 1) throw ConfigError("Fock truncation must be at least N+1");
  const Index dim = d * d;
  Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(dim);
  vac(0) = 1.0;
  Eigen::VectorXcd noon = Eigen::VectorXcd::Zero(dim);
  noon(n * d) = 1.0 / std::sqrt(2.0);   // |N0>
  noon(n) = -1.0 / std::sqrt(2.0);      // |0N>
  CMatrix rho = (1.0 - eta) * vac * vac.adjoint() + eta * noon * noon.adjoint();
  return QuantumState(d, d, rho);
}

GaussianStdForm two_mode_squeezed_std_form(double r) {
  if (!(r >= 0.0)) throw ConfigError("squeezing must be non-negative");
  const double ch = std::cosh(2.0 * r), sh = std::sinh(2.0 * r);
  return {ch, ch, sh, -sh};
}

ProjectiveMeasurement measurement_from_observable(const Operator& observable, double merge_tol) {
  if (!observable.is_hermitian()) throw ConfigError("measurement requires a Hermitian observable");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(observable.matrix());
  const RVector& ev = es.eigenvalues();
  const CMatrix& vecs = es.eigenvectors();
  ProjectiveMeasurement m;
  m.source_observable = observable;
  const Index d = observable.dim();
  Index start = 0;
  while (start < d) {
    Index end = start + 1;
    while (end < d && ev(end) - ev(end - 1) <= merge_tol) ++end;
    CMatrix proj = CMatrix::Zero(d, d);
    double value = 0.0;
    for (Index k = start; k < end; ++k) {
      proj += vecs.col(k) * vecs.col(k).adjoint();
      value += ev(k);
    }
    m.outcomes.push_back(value / static_cast<double>(end - start));
    m.projectors.emplace_back((proj + proj.adjoint()) / 2.0);
    start = end;
  }
  return m;
}

Assemblage conditional_assemblage(const QuantumState& state, const std::vector<ProjectiveMeasurement>& measurements) {
  Assemblage out;
  for (const auto& m : measurements) {
    std::vector<CMatrix> sig;
    for (const auto& proj : m.projectors) {
      if (proj.dim() != state.dim_a()) throw ConfigError("measurement dimension does not match Alice's space");
      const CMatrix s = state.conditional(proj.matrix());
      sig.emplace_back((s + s.adjoint()) / 2.0);
    }
    out.outcomes.push_back(m.outcomes);
    out.sigma.push_back(std::move(sig));
  }
  return out;
}

namespace {

std::vector<double> flat_simplex(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> v(n);
  for (auto& e : v) e = expo(rng);
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  for (auto& e : v) e /= s;
  return v;
}

CMatrix random_density(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix g(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) g(i, j) = cplx(gauss(rng), gauss(rng));
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return (rho + rho.adjoint()) / 2.0;
}

}  // namespace

UnsteerableSample random_unsteerable_assemblage(std::size_t n_inputs, std::size_t n_outcomes, Index dim_b,
                                                std::size_t n_lambda, std::uint64_t seed,
                                                std::vector<double> outcome_values) {
  if (n_inputs == 0 || n_outcomes == 0 || dim_b <= 0 || n_lambda == 0) {
    throw ConfigError("random assemblage counts must be positive");
  }
  if (outcome_values.empty()) {
    if (n_outcomes == 2) {
      outcome_values = {1.0, -1.0};
    } else {
      for (std::size_t a = 0; a < n_outcomes; ++a) outcome_values.push_back(static_cast<double>(a));
    }
  }
  if (outcome_values.size() != n_outcomes) throw ConfigError("outcome label count mismatch");

  std::mt19937_64 rng(seed);
  LhsModel model;
  model.weights = flat_simplex(n_lambda, rng);
  model.outcomes.assign(n_inputs, outcome_values);
  model.response.resize(n_lambda);
  for (std::size_t l = 0; l < n_lambda; ++l) {
    model.response[l].resize(n_inputs);
    for (std::size_t x = 0; x < n_inputs; ++x) model.response[l][x] = flat_simplex(n_outcomes, rng);
  }
  for (std::size_t l = 0; l < n_lambda; ++l) model.hidden_states.push_back(random_density(dim_b, rng));
  Assemblage as = model.assemblage();
  return {std::move(as), std::move(model)};
}

SeparableModel build_separable_model(const LhsModel& model, Index max_alice_dim) {
  model.validate();
  const std::size_t n = model.outcomes.size();
  Index alice_dim = 1;
  for (const auto& o : model.outcomes) {
    alice_dim *= static_cast<Index>(o.size());
    if (alice_dim > max_alice_dim) {
      throw ConfigError("separable model needs Alice dimension above cap " + std::to_string(max_alice_dim));
    }
  }
  const Index db = model.hidden_states.front().rows();
  CMatrix rho = CMatrix::Zero(alice_dim * db, alice_dim * db);
  std::vector<CMatrix> diag(n, CMatrix::Zero(alice_dim, alice_dim));

  std::vector<std::size_t> digits(n, 0);  // mixed radix, input 0 most significant
  for (Index idx = 0; idx < alice_dim; ++idx) {
    Index rem = idx;
    for (std::size_t x = n; x-- > 0;) {
      const auto radix = static_cast<Index>(model.outcomes[x].size());
      digits[x] = static_cast<std::size_t>(rem % radix);
      rem /= radix;
    }
    CMatrix omega = CMatrix::Zero(db, db);
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
      double p = model.weights[l];
      for (std::size_t x = 0; x < n; ++x) p *= model.response[l][x][digits[x]];
      omega += p * model.hidden_states[l];
    }
    rho.block(idx * db, idx * db, db, db) = omega;
    for (std::size_t x = 0; x < n; ++x) diag[x](idx, idx) = model.outcomes[x][digits[x]];
  }
  SeparableModel out{QuantumState(alice_dim, db, (rho + rho.adjoint()) / 2.0), {}};
  for (auto& m : diag) out.observables.emplace_back(std::move(m));
  return out;
}

cplx joint_moment(const QuantumState& state, const Operator& alice_observable, int power, const Operator& bob_op) {
  if (power < 0) throw ConfigError("moment power must be non-negative");
  return state.expectation(alice_observable.pow(power).matrix(), bob_op.matrix());
}

cplx joint_moment(const Assemblage& assemblage, std::size_t x, int power, const CMatrix& bob_op) {
  if (power < 0) throw ConfigError("moment power must be non-negative");
  if (x >= assemblage.n_inputs()) throw ConfigError("unknown input index " + std::to_string(x));
  if (bob_op.rows() != assemblage.dim_b()) throw ConfigError("Bob operator dimension mismatch");
  cplx sum = 0.0;
  for (std::size_t a = 0; a < assemblage.sigma[x].size(); ++a) {
    sum += std::pow(assemblage.outcomes[x][a], power) * (assemblage.sigma[x][a] * bob_op).trace();
  }
  return sum;
}

cplx joint_moment(const Assemblage& assemblage, std::size_t x, int power, const Operator& bob_op) {
  return joint_moment(assemblage, x, power, bob_op.matrix());
}

}  // namespace steer
