#include "steer/sdp.hpp"

#include "steer/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace steer {

namespace {

constexpr double kSymTol = 1e-12;

double inner(const RMatrix& a, const RMatrix& b) { return a.cwiseProduct(b).sum(); }

RMatrix sym(const RMatrix& m) { return 0.5 * (m + m.transpose()); }

// Largest alpha in (0, 1] keeping X + alpha dX positive definite, damped by gamma.
double step_length(const RMatrix& X, const RMatrix& dX, double gamma) {
  Eigen::LLT<RMatrix> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  const RMatrix L = llt.matrixL();
  RMatrix W = L.triangularView<Eigen::Lower>().solve(dX);
  W = L.triangularView<Eigen::Lower>().solve(W.transpose()).transpose();
  const double lmin = Eigen::SelfAdjointEigenSolver<RMatrix>(sym(W), Eigen::EigenvaluesOnly).eigenvalues()(0);
  if (lmin >= 0.0) return 1.0;
  return std::min(1.0, -gamma / lmin);
}

std::string format_num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string to_string(SolveStatus status) { return status == SolveStatus::Optimal ? "optimal" : "numerical-trouble"; }

std::string to_string(Decision decision) {
  switch (decision) {
    case Decision::Steering: return "steering";
    case Decision::NoDetection: return "no-detection";
    case Decision::InconclusiveMargin: return "inconclusive-margin";
  }
  return "unknown";
}

Decision decide(double lambda_star, double tol) {
  if (lambda_star < -10.0 * tol) return Decision::Steering;
  if (lambda_star >= -tol) return Decision::NoDetection;
  return Decision::InconclusiveMargin;
}

SdpProblem SdpProblem::from_template(const MomentTemplate& tmpl) {
  SdpProblem p;
  p.gamma_obs = real_embedding(tmpl.gamma_obs);
  for (std::size_t f = 0; f < tmpl.free_dirs.size(); ++f) {
    p.free_dirs.push_back(real_embedding(tmpl.free_dirs[f]));
    p.free_unknown.push_back(tmpl.free_group[f]);
  }
  if (!tmpl.pins.empty())
    for (const auto& e : tmpl.unknown_dirs()) p.unknown_dirs.push_back(real_embedding(e));
  p.pin_coeffs = tmpl.pin_coeffs;
  for (const auto& pin : tmpl.pins) p.pin_values.push_back(pin.value);
  p.validate();
  return p;
}

std::vector<double> SdpProblem::pin_multipliers(const RMatrix& Z) const {
  std::vector<double> traces(unknown_dirs.size());
  for (std::size_t u = 0; u < unknown_dirs.size(); ++u) traces[u] = inner(Z, unknown_dirs[u]);
  std::vector<double> mu;
  mu.reserve(pin_coeffs.size());
  for (const auto& coeffs : pin_coeffs) {
    double s = 0.0;
    for (const auto& [u, c] : coeffs) s += c * traces.at(u);
    mu.push_back(s);
  }
  return mu;
}

RMatrix SdpProblem::evaluate(const RVector& t) const {
  if (static_cast<std::size_t>(t.size()) != free_dirs.size()) throw ConfigError("free parameter vector has the wrong length");
  RMatrix g = gamma_obs;
  for (std::size_t k = 0; k < free_dirs.size(); ++k) g += t(static_cast<Index>(k)) * free_dirs[k];
  return g;
}

void SdpProblem::validate() const {
  const Index n = gamma_obs.rows();
  if (n == 0 || gamma_obs.cols() != n) throw ConfigError("constant matrix must be square and non-empty");
  auto check = [&](const RMatrix& m, const char* what) {
    if (m.rows() != n || m.cols() != n) throw ConfigError(std::string(what) + " has the wrong size");
    if (!m.allFinite()) throw ConfigError(std::string(what) + " has non-finite entries");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymTol * std::max(1.0, m.cwiseAbs().maxCoeff()))
      throw ConfigError(std::string(what) + " is not symmetric");
  };
  check(gamma_obs, "constant matrix");
  for (const auto& f : free_dirs) check(f, "free direction");
  if (pin_coeffs.size() != pin_values.size()) throw ConfigError("pin directions and values differ in count");
  for (const auto& e : unknown_dirs) check(e, "unknown direction");
  for (const auto& coeffs : pin_coeffs)
    for (const auto& [u, c] : coeffs)
      if (u >= unknown_dirs.size()) throw ConfigError("pin refers to an unknown without a direction");
  if (!free_dirs.empty()) {
    const auto m = static_cast<Index>(free_dirs.size());
    RMatrix gram(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j <= i; ++j) gram(i, j) = gram(j, i) = inner(free_dirs[i], free_dirs[j]);
    const auto eig = Eigen::SelfAdjointEigenSolver<RMatrix>(gram, Eigen::EigenvaluesOnly).eigenvalues();
    if (eig(0) <= 1e-10 * std::max(1.0, eig(m - 1))) throw ConfigError("free directions are linearly dependent");
  }
}

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options) {
  if (!(options.tol >= 1e-10 && options.tol <= 1e-4)) throw ConfigError("solver tolerance must lie in [1e-10, 1e-4]");
  if (options.max_iter < 1) throw ConfigError("iteration cap must be positive");
  problem.validate();

  const Index n = problem.size();
  const auto m = static_cast<Index>(problem.free_dirs.size()) + 1;
  const RMatrix& C = problem.gamma_obs;
  std::vector<RMatrix> A;
  A.reserve(static_cast<std::size_t>(m));
  A.push_back(RMatrix::Identity(n, n));
  for (const auto& f : problem.free_dirs) A.push_back(-f);
  RVector b = RVector::Zero(m);
  b(0) = 1.0;

  auto op = [&](const RMatrix& V) {
    RVector out(m);
    for (Index i = 0; i < m; ++i) out(i) = inner(A[static_cast<std::size_t>(i)], V);
    return out;
  };
  auto adj = [&](const RVector& y) {
    RMatrix out = RMatrix::Zero(n, n);
    for (Index i = 0; i < m; ++i) out += y(i) * A[static_cast<std::size_t>(i)];
    return out;
  };

  const double c_norm = std::max(1.0, C.norm());
  const double lmin_c = min_eigenvalue_symmetric(C);
  RVector y = RVector::Zero(m);
  y(0) = lmin_c - std::max(1.0, 0.1 * c_norm);
  RMatrix S = C - adj(y);
  RMatrix X = RMatrix::Identity(n, n) / static_cast<double>(n);

  SdpSolution sol;
  sol.status = SolveStatus::NumericalTrouble;
  const double divergence = 1e8 * c_norm;

  for (int it = 0; it <= options.max_iter; ++it) {
    const RVector rp = b - op(X);
    const RMatrix Rd = C - S - adj(y);
    const double pobj = inner(C, X);
    const double dobj = y(0);
    sol.iterations = it;
    sol.primal_infeasibility = rp.norm();
    sol.dual_infeasibility = Rd.norm();
    sol.duality_gap = pobj - dobj;
    if (std::abs(pobj - dobj) <= options.tol && sol.primal_infeasibility <= options.tol &&
        sol.dual_infeasibility <= options.tol) {
      sol.status = SolveStatus::Optimal;
      break;
    }
    if (it == options.max_iter) {
      sol.message = "iteration cap reached";
      break;
    }
    if (std::abs(y(0)) > divergence || X.norm() > divergence) {
      sol.message = "iterates diverge: problem unbounded or infeasible";
      break;
    }

    Eigen::LLT<RMatrix> s_llt(S);
    if (s_llt.info() != Eigen::Success) {
      sol.message = "dual slack lost positive definiteness";
      break;
    }
    const RMatrix Sinv = s_llt.solve(RMatrix::Identity(n, n));

    RMatrix M(m, m);
    std::vector<RMatrix> G(static_cast<std::size_t>(m));
    for (Index j = 0; j < m; ++j) G[static_cast<std::size_t>(j)] = X * A[static_cast<std::size_t>(j)] * Sinv;
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) M(i, j) = inner(A[static_cast<std::size_t>(i)], G[static_cast<std::size_t>(j)]);
    M = sym(M);
    Eigen::LDLT<RMatrix> m_ldlt(M);
    if (m_ldlt.info() != Eigen::Success) {
      sol.message = "Schur complement factorization failed";
      break;
    }

    const RVector base = rp + op(X * Rd * Sinv);
    auto direction = [&](const RMatrix& Rc, RMatrix& dX, RVector& dy, RMatrix& dS) {
      const RMatrix RcSinv = Rc * Sinv;
      dy = m_ldlt.solve(base - op(RcSinv));
      dS = Rd - adj(dy);
      dX = sym(RcSinv - X * dS * Sinv);
    };

    const double mu = inner(X, S) / static_cast<double>(n);
    RMatrix dXa, dSa;
    RVector dya;
    direction(-X * S, dXa, dya, dSa);
    const double ap_a = step_length(X, dXa, 1.0);
    const double ad_a = step_length(S, dSa, 1.0);
    const double mu_aff = inner(X + ap_a * dXa, S + ad_a * dSa) / static_cast<double>(n);
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    RMatrix dX, dS;
    RVector dy;
    direction(sigma * mu * RMatrix::Identity(n, n) - X * S - dXa * dSa, dX, dy, dS);
    const double gamma = it < 5 ? 0.9 : 0.98;
    const double ap = step_length(X, dX, gamma);
    const double ad = step_length(S, dS, gamma);
    if (ap <= 0.0 || ad <= 0.0 || !dX.allFinite() || !dS.allFinite()) {
      sol.message = "no progress along the search direction";
      break;
    }
    X += ap * dX;
    y += ad * dy;
    S += ad * dS;
    S = sym(S);
  }

  // project Z onto the affine constraints Tr Z = 1, Tr[Z F_k] = 0
  RMatrix gram(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j <= i; ++j)
      gram(i, j) = gram(j, i) = inner(A[static_cast<std::size_t>(i)], A[static_cast<std::size_t>(j)]);
  const RVector w = gram.ldlt().solve(b - op(X));
  sol.Z = sym(X + adj(w));
  sol.lambda_star = y(0);
  sol.t_star = y.tail(m - 1);
  sol.beta = inner(sol.Z, C);
  sol.duality_gap = sol.beta - sol.lambda_star;
  sol.mu = problem.pin_multipliers(sol.Z);
  if (sol.status == SolveStatus::Optimal) sol.message = "converged";
  return sol;
}

CertificateReport certify(const SdpSolution& solution, const SdpProblem& problem) {
  CertificateReport rep;
  auto fail = [&](const std::string& what, double value) {
    std::ostringstream os;
    os << what << " (" << std::setprecision(6) << value << ")";
    rep.violations.push_back(os.str());
  };
  const Index n = problem.size();
  if (solution.Z.rows() != n || solution.Z.cols() != n) {
    rep.violations.push_back("dual matrix has the wrong size");
    return rep;
  }
  if (static_cast<std::size_t>(solution.t_star.size()) != problem.n_free()) {
    rep.violations.push_back("free parameter vector has the wrong length");
    return rep;
  }
  const RMatrix Z = sym(solution.Z);
  rep.min_eig_z = min_eigenvalue_symmetric(Z);
  if (rep.min_eig_z < -1e-8) fail("dual matrix not positive semidefinite", rep.min_eig_z);
  rep.trace_z = Z.trace();
  if (std::abs(rep.trace_z - 1.0) > 1e-8) fail("dual trace differs from 1", rep.trace_z);
  for (const auto& f : problem.free_dirs) rep.max_free_residual = std::max(rep.max_free_residual, std::abs(inner(Z, f)));
  if (rep.max_free_residual > 1e-7) fail("dual not orthogonal to free directions", rep.max_free_residual);

  rep.beta = inner(Z, problem.gamma_obs);
  if (!problem.pin_coeffs.empty()) {
    const auto mu = problem.pin_multipliers(Z);
    for (std::size_t r = 0; r < mu.size(); ++r) rep.pin_sum += mu[r] * problem.pin_values[r];
    if (std::abs(rep.beta - rep.pin_sum) > 1e-6) fail("beta differs from the pinned multiplier sum", rep.beta - rep.pin_sum);
  } else {
    rep.pin_sum = rep.beta;
  }

  const RMatrix gamma = problem.evaluate(solution.t_star);
  rep.strong_duality_gap = std::abs(solution.lambda_star - inner(Z, gamma));
  if (rep.strong_duality_gap > 1e-6) fail("strong duality gap", rep.strong_duality_gap);
  rep.min_eig_gamma = min_eigenvalue_symmetric(gamma);
  if (rep.min_eig_gamma < solution.lambda_star - 1e-7) fail("lambda exceeds the moment matrix spectrum", rep.min_eig_gamma);
  rep.accepted = rep.violations.empty();
  return rep;
}

void write_sdpa(std::ostream& out, const SdpProblem& problem) {
  const Index n = problem.size();
  const std::size_t m = problem.n_free() + 1;
  out << "* moment-matrix steering test: min -x1 s.t. -x1*I + sum_k x_{k+1} F_k + Gamma_obs >= 0\n";
  out << m << "\n1\n" << n << "\n";
  out << "-1";
  for (std::size_t k = 1; k < m; ++k) out << " 0";
  out << "\n";
  auto emit = [&](std::size_t mat, const RMatrix& a, double scale) {
    for (Index i = 0; i < n; ++i)
      for (Index j = i; j < n; ++j) {
        const double v = scale * a(i, j);
        if (v != 0.0) out << mat << " 1 " << i + 1 << " " << j + 1 << " " << format_num(v) << "\n";
      }
  };
  emit(0, problem.gamma_obs, -1.0);
  emit(1, RMatrix::Identity(n, n), -1.0);
  for (std::size_t k = 0; k < problem.n_free(); ++k) emit(k + 2, problem.free_dirs[k], 1.0);
}

}  // namespace steer
