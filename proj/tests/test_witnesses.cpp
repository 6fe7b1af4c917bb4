#include "steer/error.hpp"
#include "steer/io.hpp"
#include "steer/witnesses.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace steer;

namespace {

std::vector<ProjectiveMeasurement> pauli_measurements() {
  const auto p = pauli_set();
  return {measurement_from_observable(p.x), measurement_from_observable(p.y), measurement_from_observable(p.z)};
}

StateSource werner_source(double w) { return StateSource(werner_state(w), pauli_measurements()); }

StateSource noon_source(double eta, Index d, double sign = 1.0) {
  const auto q = generalized_quadratures(1, d);
  return StateSource(lossy_noon_state(1, eta, d),
                     {measurement_from_observable(sign * q.q), measurement_from_observable(sign * q.p)});
}

StringSet werner_set() { return custom_string_set({{{}, {}}, {{0}, {0}}, {{1}, {1}}, {{2}, {2}}}); }

StringSet noon_set() {
  return custom_string_set({{{}, {}}, {{0}, {0}}, {{0}, {1}}, {{1}, {0}}, {{1}, {1}}, {{0, 0}, {}}, {{1, 1}, {}},
                            {{}, {0, 0}}, {{}, {0, 1}}, {{}, {1, 0}}, {{}, {1, 1}}});
}

struct Extracted {
  Witness witness;
  SdpSolution solution;
};

Extracted extract(const StringSet& set, const BobAlgebra& alg, ObservabilityPolicy policy, const MomentSource& src) {
  const auto t = build_template(set, alg, policy, src);
  const auto p = SdpProblem::from_template(t);
  const auto s = solve(p);
  return {witness_from_dual(t, p, s, {"test", to_string(policy), {}, 1e-8, 1.0}), s};
}

WitnessLabel pauli_label(int x, const std::string& op) {
  WitnessLabel l;
  l.input = x;
  l.power = 1;
  l.word = {op};
  return l;
}

}  // namespace

TEST(FromDual, WernerOptimalWitness) {
  const auto alg = BobAlgebra::pauli();
  const auto e = extract(werner_set(), alg, ObservabilityPolicy::Full, werner_source(1.0));
  ASSERT_EQ(e.witness.terms.size(), 3u);
  const char* ops[] = {"X", "Y", "Z"};
  for (int x = 0; x < 3; ++x) {
    bool found = false;
    for (const auto& t : e.witness.terms)
      if (t.label == pauli_label(x, ops[x])) {
        found = true;
        EXPECT_NEAR(t.coeff.real(), 1.0, 1e-6);
        EXPECT_NEAR(t.coeff.imag(), 0.0, 1e-9);
      }
    EXPECT_TRUE(found) << x;
  }
  EXPECT_NEAR(e.witness.constant, std::sqrt(3.0), 1e-5);
}

TEST(FromDual, ReproducesBetaOnOwnData) {
  const auto alg = BobAlgebra::pauli();
  for (double w : {0.4, 0.8, 1.0}) {
    const auto src = werner_source(w);
    const auto e = extract(werner_set(), alg, ObservabilityPolicy::Full, src);
    EXPECT_NEAR(e.witness.provenance.scale * evaluate(e.witness, src, alg), e.solution.beta, 1e-6) << w;
  }
  const auto nalg = BobAlgebra::bosonic(1, 6);
  const auto nsrc = noon_source(0.8, 6);
  const auto n = extract(noon_set(), nalg, ObservabilityPolicy::LocalRestricted, nsrc);
  EXPECT_NEAR(n.witness.provenance.scale * evaluate(n.witness, nsrc, nalg), n.solution.beta, 1e-6);
}

TEST(FromDual, NoonWitnessHasFourthOrderBobTerms) {
  const auto alg = BobAlgebra::bosonic(1, 6);
  const auto src = noon_source(0.67, 6);
  const auto e = extract(noon_set(), alg, ObservabilityPolicy::LocalRestricted, src);
  ASSERT_LT(e.solution.lambda_star, 0.0);
  std::size_t fourth = 0;
  for (const auto& t : e.witness.terms)
    if (t.label.input < 0 && t.label.word.size() == 4 && std::abs(t.coeff) > 1e-6) ++fourth;
  EXPECT_GT(fourth, 0u);
  double max_coeff = 0.0;
  for (const auto& t : e.witness.terms) max_coeff = std::max(max_coeff, std::abs(t.coeff));
  EXPECT_NEAR(max_coeff, 1.0, 1e-12);
  EXPECT_LT(evaluate(e.witness, src, alg), 0.0);
}

TEST(FromDual, RejectsUncertifiedSolution) {
  const auto t = build_template(werner_set(), BobAlgebra::pauli(), ObservabilityPolicy::Full, werner_source(0.8));
  const auto p = SdpProblem::from_template(t);
  auto s = solve(p);
  s.Z *= 2.0;
  EXPECT_THROW(witness_from_dual(t, p, s), ConfigError);
  s = solve(p);
  s.status = SolveStatus::NumericalTrouble;
  EXPECT_THROW(witness_from_dual(t, p, s), ConfigError);
}

TEST(FromDual, SoundOnUnsteerableAssemblages) {
  const auto alg = BobAlgebra::pauli();
  const auto e = extract(generate_level(3, 3, 2), alg, ObservabilityPolicy::Full, werner_source(0.9));
  ASSERT_LT(e.solution.lambda_star, 0.0);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto sample = random_unsteerable_assemblage(3, 2, 2, 2 + seed % 6, 1000 + seed);
    EXPECT_GE(evaluate(e.witness, AssemblageSource(sample.assemblage), alg), -1e-7) << seed;
  }
}

TEST(Fixture, SinglePhotonValues) {
  const auto w = single_photon_fixture_witness();
  EXPECT_EQ(w.terms.size(), 18u);
  EXPECT_NEAR(w.constant, 8.1657, 1e-12);
  const auto alg = BobAlgebra::bosonic(1, 6);
  EXPECT_NEAR(evaluate(w, noon_source(1.0, 6, -1.0), alg), -0.1556, 5e-3);
  EXPECT_NEAR(evaluate(w, noon_source(0.67, 6, -1.0), alg), -8.88e-4, 2e-3);
  EXPECT_NEAR(evaluate(w, noon_source(0.67, 10, -1.0), alg), evaluate(w, noon_source(0.67, 6, -1.0), alg), 1e-10);
}

TEST(Fixture, WernerLinearWitness) {
  const auto w = werner_linear_witness();
  ASSERT_EQ(w.terms.size(), 3u);
  EXPECT_NEAR(w.constant, std::sqrt(3.0), 1e-15);
  const auto alg = BobAlgebra::pauli();
  for (double v : {0.0, 0.3, 1.0 / std::sqrt(3.0), 0.8, 1.0})
    EXPECT_NEAR(evaluate(w, werner_source(v), alg), -3.0 * v + std::sqrt(3.0), 1e-12);
}

TEST(Evaluate, UnresolvableLabels) {
  const auto w = werner_linear_witness();
  EXPECT_THROW(evaluate(w, noon_source(0.5, 6), BobAlgebra::bosonic(1, 6)), ConfigError);
  Witness bad;
  WitnessLabel l = pauli_label(0, "X");
  l.kind = BobKind::Basis;
  l.basis_index = 7;
  bad.terms.push_back({l, 1.0});
  EXPECT_THROW(evaluate(bad, werner_source(0.5), BobAlgebra::pauli()), ConfigError);
}

TEST(Evaluate, ImaginaryPartRejected) {
  Witness w;
  w.terms.push_back({pauli_label(0, "X"), cplx(0.0, 1.0)});
  EXPECT_THROW(evaluate(w, werner_source(0.5), BobAlgebra::pauli()), NumericalError);
}

TEST(Evaluate, BasisLabels) {
  Witness w;
  WitnessLabel l;
  l.input = 2;
  l.power = 1;
  l.kind = BobKind::Basis;
  l.basis_index = 3;  // diag(1, -1)/sqrt2
  w.terms.push_back({l, 1.0});
  EXPECT_NEAR(evaluate(w, werner_source(0.6), BobAlgebra::pauli()), -0.6 / std::sqrt(2.0), 1e-12);
}

TEST(Serialize, RoundTrip) {
  for (const auto& w : {single_photon_fixture_witness(), werner_linear_witness()}) {
    const auto back = deserialize(serialize(w));
    EXPECT_EQ(back, w);
    EXPECT_EQ(serialize(back), serialize(w));
  }
  const auto alg = BobAlgebra::pauli();
  auto e = extract(werner_set(), alg, ObservabilityPolicy::Full, werner_source(0.9)).witness;
  EXPECT_EQ(deserialize(serialize(e)), e);
}

TEST(Serialize, EmptyWitness) {
  const Witness w;
  const auto back = deserialize(serialize(w));
  EXPECT_TRUE(back.terms.empty());
  EXPECT_EQ(back.constant, 0.0);
  EXPECT_EQ(evaluate(back, werner_source(0.5), BobAlgebra::pauli()), 0.0);
}

TEST(Serialize, WernerDocument) {
  const auto doc = Json::parse(serialize(werner_linear_witness()));
  EXPECT_EQ(doc["version"], 1);
  EXPECT_EQ(doc["terms"].size(), 3u);
  EXPECT_EQ(doc["terms"][0]["bob"]["kind"], "word");
  EXPECT_EQ(doc["terms"][0]["coeff"].size(), 2u);
  EXPECT_NEAR(std::stod(doc["constant"].get<std::string>()), std::sqrt(3.0), 1e-15);
  EXPECT_GE(doc["constant"].get<std::string>().size(), 17u);
}

TEST(Serialize, SchemaErrors) {
  auto doc = Json::parse(serialize(werner_linear_witness()));
  EXPECT_THROW(deserialize("{"), ConfigError);
  auto v = doc;
  v["version"] = 2;
  EXPECT_THROW(deserialize(v.dump()), ConfigError);
  v = doc;
  v["extra"] = 1;
  EXPECT_THROW(deserialize(v.dump()), ConfigError);
  v = doc;
  v["constant"] = 1.5;
  EXPECT_THROW(deserialize(v.dump()), ConfigError);
  v = doc;
  v["terms"][0]["bob"]["kind"] = "matrix";
  EXPECT_THROW(deserialize(v.dump()), ConfigError);
  v = doc;
  v["terms"][0]["coeff"] = {"1"};
  EXPECT_THROW(deserialize(v.dump()), ConfigError);
}

TEST(Scan, WernerThreshold) {
  const auto alg = BobAlgebra::pauli();
  auto point = [&](double w) {
    const auto t = build_template(werner_set(), alg, ObservabilityPolicy::Full, werner_source(w));
    const auto p = SdpProblem::from_template(t);
    const auto s = solve(p);
    const auto d = decide(s.lambda_star, 1e-8);
    return ScanPoint{w, s.lambda_star, d == Decision::Steering, certify(s, p).accepted, to_string(d)};
  };
  const auto a = threshold_scan(point, 0.3, 0.9, 1e-3);
  EXPECT_NEAR(a.threshold, 1.0 / std::sqrt(3.0), 1e-3);
  EXPECT_LE(a.hi - a.lo, 1e-3);
  const auto b = threshold_scan(point, 0.3, 0.9, 1e-3);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].param, b.history[i].param);
    EXPECT_EQ(a.history[i].lambda_star, b.history[i].lambda_star);
  }
  const auto c = threshold_scan(point, 0.3, 0.9, 1e-3, 3);
  EXPECT_NEAR(c.threshold, 1.0 / std::sqrt(3.0), 1e-3);
  EXPECT_THROW(threshold_scan(point, 0.7, 0.9, 1e-3), BracketError);
  EXPECT_THROW(threshold_scan(point, 0.9, 0.3, 1e-3), ConfigError);
}

TEST(Fixture, ShippedDocumentMatchesBuiltIn) {
  const auto doc = read_text_file(std::string(STEER_SOURCE_DIR) + "/fixtures/single_photon_witness.json");
  EXPECT_EQ(deserialize(doc), single_photon_fixture_witness());
}
