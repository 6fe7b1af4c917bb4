#include "steer/analytic.hpp"

#include "steer/error.hpp"

#include <cmath>

namespace steer {

namespace {

constexpr double kClosedFormTol = 1e-12;
constexpr double kEigenTol = 1e-10;

void require_physical(const GaussianStdForm& g) {
  if (!g.is_physical()) throw ConfigError("unphysical Gaussian covariance matrix");
}

}  // namespace

void PauliCorrelations::validate() const {
  for (double v : {cxx, cyy, czz})
    if (!(v >= -1.0 && v <= 1.0)) throw ConfigError("Pauli correlations must lie in [-1, 1]");
}

CriterionResult pauli_linear_witness(const PauliCorrelations& c) {
  c.validate();
  const double v = c.cxx + c.cyy + c.czz;
  return {v, v < -std::sqrt(3.0) - kClosedFormTol};
}

CriterionResult pauli_nonlinear_criterion(const PauliCorrelations& c) {
  c.validate();
  const double v = c.cxx * c.cxx + c.cyy * c.cyy + c.czz * c.czz;
  return {v, v > 1.0 + kClosedFormTol};
}

std::array<CriterionResult, 3> pauli_two_setting_criteria(const PauliCorrelations& c) {
  c.validate();
  auto pair = [](double u, double v) {
    const double val = 1.0 - u * u - v * v;
    return CriterionResult{val, val < -kClosedFormTol};
  };
  return {pair(c.cyy, c.czz), pair(c.cxx, c.czz), pair(c.cxx, c.cyy)};
}

CriterionResult gaussian_det_criterion(const GaussianStdForm& g) {
  require_physical(g);
  const double ab = g.a * g.b;
  const double v = (ab - g.c1 * g.c1) * (ab - g.c2 * g.c2) - g.a * g.a;
  return {v, v < -kClosedFormTol};
}

CriterionResult gaussian_wiseman_criterion(const GaussianStdForm& g) {
  require_physical(g);
  CMatrix m = g.covariance().cast<cplx>();
  m(2, 3) += cplx(0.0, 1.0);
  m(3, 2) -= cplx(0.0, 1.0);
  const double v = min_eigenvalue(m);
  return {v, v < -kEigenTol};
}

CMatrix gaussian_moment_matrix(const GaussianStdForm& g, double r) {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = g.a;
  m(2, 2) = m(3, 3) = g.b;
  m(0, 1) = m(1, 0) = r;
  m(0, 2) = m(2, 0) = g.c1;
  m(1, 3) = m(3, 1) = g.c2;
  m(2, 3) = cplx(0.0, 1.0);
  m(3, 2) = cplx(0.0, -1.0);
  return m;
}

CompletionResult gaussian_psd_completion(const GaussianStdForm& g) {
  require_physical(g);
  auto f = [&](double r) { return min_eigenvalue(gaussian_moment_matrix(g, r)); };
  // PSD forces |R| <= a; the minimum eigenvalue is concave in R
  double lo = -g.a, hi = g.a;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, g.a); ++i) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) < f(m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  CompletionResult res;
  res.best_r = 0.5 * (lo + hi);
  res.best_min_eigenvalue = f(res.best_r);
  res.completable = res.best_min_eigenvalue >= -kEigenTol;
  return res;
}

}  // namespace steer
