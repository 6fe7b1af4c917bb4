#include "steer/error.hpp"
#include "steer/io.hpp"
#include "steer/moments.hpp"
#include "steer/scenarios.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace steer;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<ProjectiveMeasurement> pauli_measurements() {
  const auto p = pauli_set();
  return {measurement_from_observable(p.x), measurement_from_observable(p.y), measurement_from_observable(p.z)};
}

}  // namespace

TEST(Werner, Endpoints) {
  EXPECT_LT(max_abs(werner_state(0.0).rho() - CMatrix::Identity(4, 4) / 4.0), 1e-15);
  const auto p = pauli_set();
  EXPECT_NEAR(werner_state(1.0).expectation(p.x.matrix(), p.x.matrix()).real(), -1.0, 1e-14);
  EXPECT_THROW(werner_state(-0.1), ConfigError);
  EXPECT_THROW(werner_state(1.1), ConfigError);
}

TEST(Werner, Correlations) {
  const auto p = pauli_set();
  const std::vector<Operator> ops{p.x, p.y, p.z};
  for (double w : {0.0, 0.3, 0.7, 1.0}) {
    const auto s = werner_state(w);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        EXPECT_NEAR(std::abs(s.expectation(ops[i].matrix(), ops[j].matrix()) - (i == j ? -w : 0.0)), 0.0, 1e-14);
  }
}

TEST(Noon, VacuumAtZeroEta) {
  const auto s = lossy_noon_state(1, 0.0, 4);
  EXPECT_NEAR(s.rho()(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(s.rho().trace().real(), 1.0, 1e-15);
}

TEST(Noon, QuadratureCorrelation) {
  const auto q = generalized_quadratures(1, 6);
  for (double eta : {0.2, 0.67, 1.0}) {
    const auto s = lossy_noon_state(1, eta, 6);
    EXPECT_NEAR(s.expectation(q.q.matrix(), q.q.matrix()).real(), -eta / 2.0, 1e-14);
  }
}

TEST(Noon, BobMarginalAtUnitEta) {
  const CMatrix b = lossy_noon_state(1, 1.0, 5).bob_marginal();
  CMatrix expect = CMatrix::Zero(5, 5);
  expect(0, 0) = expect(1, 1) = 0.5;
  EXPECT_LT(max_abs(b - expect), 1e-15);
}

TEST(Noon, RankAtMostTwo) {
  const auto s = lossy_noon_state(2, 0.4, 10);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(s.rho());
  int rank = 0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) rank += es.eigenvalues()(i) > 1e-12;
  EXPECT_EQ(rank, 2);
  EXPECT_THROW(lossy_noon_state(2, 0.5, 2), ConfigError);
  EXPECT_THROW(lossy_noon_state(1, 1.5, 4), ConfigError);
}

TEST(Gaussian, TwoModeSqueezed) {
  const auto vac = two_mode_squeezed_std_form(0.0);
  EXPECT_DOUBLE_EQ(vac.a, 1.0);
  EXPECT_DOUBLE_EQ(vac.c1, 0.0);
  EXPECT_NEAR(two_mode_squeezed_std_form(0.5).a, std::cosh(1.0), 1e-15);
  for (double r : {0.1, 0.5, 1.2}) {
    const auto g = two_mode_squeezed_std_form(r);
    EXPECT_NEAR(g.covariance().determinant(), 1.0, 1e-9);
    EXPECT_TRUE(g.is_physical());
    EXPECT_DOUBLE_EQ(g.c1, -g.c2);
  }
  EXPECT_FALSE((GaussianStdForm{1.0, 1.0, 0.5, 0.5}).is_physical());
}

TEST(Measurement, PauliZ) {
  const auto m = measurement_from_observable(pauli_set().z);
  ASSERT_EQ(m.outcomes.size(), 2u);
  EXPECT_DOUBLE_EQ(m.outcomes[0], -1.0);
  EXPECT_DOUBLE_EQ(m.outcomes[1], 1.0);
  EXPECT_NEAR(m.projectors[1](0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(m.projectors[0](1, 1).real(), 1.0, 1e-15);
}

TEST(Measurement, IdentityMergesToOneOutcome) {
  const auto m = measurement_from_observable(Operator::identity(3));
  ASSERT_EQ(m.outcomes.size(), 1u);
  EXPECT_LT(max_abs(m.projectors[0].matrix() - CMatrix::Identity(3, 3)), 1e-12);
}

TEST(Measurement, TruncatedQuadratureSpectrum) {
  const auto q = generalized_quadratures(1, 8).q;
  const auto m = measurement_from_observable(q);
  ASSERT_EQ(m.outcomes.size(), 8u);
  CMatrix sum = CMatrix::Zero(8, 8), recon = CMatrix::Zero(8, 8);
  for (std::size_t a = 0; a < 8; ++a) {
    EXPECT_NEAR(m.projectors[a].trace().real(), 1.0, 1e-9);
    EXPECT_LT(max_abs((m.projectors[a] * m.projectors[a]).matrix() - m.projectors[a].matrix()), 1e-9);
    sum += m.projectors[a].matrix();
    recon += m.outcomes[a] * m.projectors[a].matrix();
  }
  EXPECT_LT(max_abs(sum - CMatrix::Identity(8, 8)), 1e-9);
  EXPECT_LT(max_abs(recon - q.matrix()), 1e-9);
}

TEST(Measurement, RejectsNonHermitian) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(measurement_from_observable(Operator(m)), ConfigError);
}

TEST(Assemblage, ProductStateFactorizes) {
  CMatrix ra(2, 2), rb(2, 2);
  ra << 0.7, 0.1, 0.1, 0.3;
  rb << 0.6, cplx(0.0, 0.2), cplx(0.0, -0.2), 0.4;
  const QuantumState s(2, 2, tensor(Operator(ra), Operator(rb)).matrix());
  const auto a = conditional_assemblage(s, pauli_measurements());
  a.validate();
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t o = 0; o < a.sigma[x].size(); ++o) {
      const double p = a.sigma[x][o].trace().real();
      EXPECT_LT(max_abs(a.sigma[x][o] - p * rb), 1e-14);
    }
}

TEST(Assemblage, SingletConditional) {
  const auto a = conditional_assemblage(werner_state(1.0), {measurement_from_observable(pauli_set().z)});
  CMatrix expect = CMatrix::Zero(2, 2);
  expect(1, 1) = 0.5;
  EXPECT_LT(max_abs(a.sigma[0][1] - expect), 1e-14);  // outcome +1
  EXPECT_NEAR(a.sigma[0][0].trace().real() + a.sigma[0][1].trace().real(), 1.0, 1e-14);
  EXPECT_LT(max_abs(a.bob_marginal(0) - werner_state(1.0).bob_marginal()), 1e-14);
}

TEST(Assemblage, ValidateRejectsSignalling) {
  Assemblage a;
  a.outcomes = {{1.0, -1.0}, {1.0, -1.0}};
  CMatrix p0 = CMatrix::Zero(2, 2), p1 = CMatrix::Zero(2, 2);
  p0(0, 0) = 0.5;
  p1(1, 1) = 0.5;
  a.sigma = {{p0, p1}, {p0 * 2.0, CMatrix::Zero(2, 2)}};
  EXPECT_THROW(a.validate(), ConfigError);
}

TEST(Assemblage, DimensionMismatch) {
  EXPECT_THROW(conditional_assemblage(werner_state(0.5), {measurement_from_observable(Operator::identity(3))}),
               ConfigError);
}

TEST(RandomAssemblage, SingleHiddenState) {
  const auto s = random_unsteerable_assemblage(3, 2, 2, 1, 42);
  const CMatrix rho = s.model.hidden_states[0];
  for (std::size_t x = 0; x < 3; ++x)
    for (const auto& sig : s.assemblage.sigma[x]) EXPECT_LT(max_abs(sig - sig.trace().real() * rho), 1e-12);
}

TEST(RandomAssemblage, ReconstructionAndInvariants) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = random_unsteerable_assemblage(2 + seed % 2, 2 + seed % 3, 2 + seed % 2, 3, seed);
    EXPECT_NO_THROW(s.assemblage.validate());
    EXPECT_NO_THROW(s.model.validate());
    const auto rebuilt = s.model.assemblage();
    for (std::size_t x = 0; x < rebuilt.n_inputs(); ++x)
      for (std::size_t a = 0; a < rebuilt.sigma[x].size(); ++a)
        EXPECT_LT(max_abs(rebuilt.sigma[x][a] - s.assemblage.sigma[x][a]), 1e-12);
  }
}

TEST(RandomAssemblage, DeterministicAndLabelled) {
  const auto a = random_unsteerable_assemblage(2, 2, 3, 4, 9);
  const auto b = random_unsteerable_assemblage(2, 2, 3, 4, 9);
  EXPECT_EQ(max_abs(a.assemblage.sigma[1][0] - b.assemblage.sigma[1][0]), 0.0);
  EXPECT_EQ(a.assemblage.outcomes[0], (std::vector<double>{1.0, -1.0}));
  const auto c = random_unsteerable_assemblage(2, 3, 2, 4, 9);
  EXPECT_EQ(c.assemblage.outcomes[0], (std::vector<double>{0.0, 1.0, 2.0}));
}

TEST(SeparableModel, TwoInputsTwoOutcomes) {
  const auto s = random_unsteerable_assemblage(2, 2, 2, 3, 5);
  const auto sep = build_separable_model(s.model);
  EXPECT_EQ(sep.state.dim_a(), 4);
  for (const auto& o : sep.observables) {
    CMatrix off = o.matrix();
    off.diagonal().setZero();
    EXPECT_EQ(max_abs(off), 0.0);
  }
  const CMatrix comm = (sep.observables[0] * sep.observables[1] - sep.observables[1] * sep.observables[0]).matrix();
  EXPECT_EQ(max_abs(comm), 0.0);
}

TEST(SeparableModel, RoundTripAssemblage) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = random_unsteerable_assemblage(2 + seed % 2, 2, 2 + seed % 2, 4, seed);
    const auto sep = build_separable_model(s.model);
    std::vector<ProjectiveMeasurement> ms;
    for (const auto& o : sep.observables) ms.push_back(measurement_from_observable(o));
    const auto a = conditional_assemblage(sep.state, ms);
    for (std::size_t x = 0; x < a.n_inputs(); ++x)
      for (std::size_t o = 0; o < a.sigma[x].size(); ++o) {
        // measurement outcomes come out ascending; match by value
        const auto& vals = s.assemblage.outcomes[x];
        const auto it = std::find(vals.begin(), vals.end(), a.outcomes[x][o]);
        ASSERT_NE(it, vals.end());
        EXPECT_LT(max_abs(a.sigma[x][o] - s.assemblage.sigma[x][static_cast<std::size_t>(it - vals.begin())]), 1e-9);
      }
  }
}

TEST(SeparableModel, DimensionCap) {
  const auto s = random_unsteerable_assemblage(3, 3, 2, 2, 1);
  EXPECT_THROW(build_separable_model(s.model, 20), ConfigError);
  EXPECT_NO_THROW(build_separable_model(s.model, 27));
}

TEST(JointMoment, Normalization) {
  const auto a = conditional_assemblage(werner_state(0.4), pauli_measurements());
  EXPECT_NEAR(std::abs(joint_moment(a, 0, 0, Operator::identity(2)) - 1.0), 0.0, 1e-14);
  EXPECT_THROW(joint_moment(a, 5, 1, Operator::identity(2)), ConfigError);
}

TEST(JointMoment, RouteEquivalenceWerner) {
  const auto p = pauli_set();
  const auto ms = pauli_measurements();
  const auto s = werner_state(0.6);
  const auto a = conditional_assemblage(s, ms);
  for (std::size_t x = 0; x < 3; ++x)
    for (int power = 0; power < 3; ++power)
      for (const auto& b : {p.x, p.y, p.z, p.x * p.y})
        EXPECT_NEAR(std::abs(joint_moment(s, ms[x].source_observable, power, b) - joint_moment(a, x, power, b)), 0.0,
                    1e-8);
}

TEST(JointMoment, RouteEquivalenceNoon) {
  const Index d = 6;
  const auto q = generalized_quadratures(1, d);
  const std::vector<ProjectiveMeasurement> ms{measurement_from_observable(q.q), measurement_from_observable(q.p)};
  const auto s = lossy_noon_state(1, 0.8, d);
  const auto a = conditional_assemblage(s, ms);
  const auto alg = BobAlgebra::bosonic(1, d);
  for (std::size_t x = 0; x < 2; ++x)
    for (int power = 0; power < 4; ++power)
      for (const BobWord& w : {BobWord{0}, BobWord{0, 1}, BobWord{1, 1, 0}}) {
        const Operator b(alg.word_matrix(w));
        EXPECT_NEAR(std::abs(joint_moment(s, ms[x].source_observable, power, b) - joint_moment(a, x, power, b)), 0.0,
                    1e-8);
      }
}

TEST(AssemblageIo, RoundTrip) {
  const auto s = random_unsteerable_assemblage(2, 3, 3, 4, 8);
  const auto back = assemblage_from_json(Json::parse(assemblage_to_json(s.assemblage).dump()));
  ASSERT_EQ(back.n_inputs(), 2u);
  EXPECT_EQ(back.outcomes, s.assemblage.outcomes);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t a = 0; a < 3; ++a) EXPECT_EQ(max_abs(back.sigma[x][a] - s.assemblage.sigma[x][a]), 0.0);
}

TEST(AssemblageIo, RejectsMalformed) {
  EXPECT_THROW(assemblage_from_json(Json::parse(R"({"dim_b": 2})")), ConfigError);
  EXPECT_THROW(assemblage_from_json(Json::parse(R"({"dim_b": 1, "inputs": [{"outcomes": [1], "sigmas": [[[0.5, 0]]]}]})")),
               ConfigError);
  EXPECT_THROW(assemblage_from_json(Json::parse(R"({"dim_b": 1, "inputs": [], "extra": 1})")), ConfigError);
}
