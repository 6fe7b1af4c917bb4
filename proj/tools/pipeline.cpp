#include "pipeline.hpp"

#include "steer/error.hpp"

#include <chrono>
#include <cmath>
#include <set>

namespace steer::app {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double get_number(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing '" + key + "' in " + where);
  if (!j[key].is_number()) throw ConfigError("'" + key + "' in " + where + " must be a number");
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) throw ConfigError("'" + key + "' in " + where + " must be finite");
  return v;
}

long get_int(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing '" + key + "' in " + where);
  const auto& v = j[key];
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) return static_cast<long>(v.get<double>());
  throw ConfigError("'" + key + "' in " + where + " must be an integer");
}

BobAlgebra algebra_for(const std::string& kind, Index dim) {
  if (kind == "pauli") {
    if (dim != 2) throw ConfigError("pauli Bob operators need dim_b = 2");
    return BobAlgebra::pauli();
  }
  if (kind == "gell-mann") {
    const auto basis = HermitianBasis::gell_mann(dim);
    std::vector<std::string> names;
    std::vector<Operator> ops;
    for (std::size_t k = 1; k < basis.size(); ++k) {
      names.push_back("G" + std::to_string(k));
      ops.push_back(basis[k]);
    }
    return BobAlgebra::finite(std::move(names), std::move(ops));
  }
  throw ConfigError("unknown bob_ops '" + kind + "' (pauli | gell-mann)");
}

std::string default_bob_ops(Index dim) { return dim == 2 ? "pauli" : "gell-mann"; }

MomentWord word(std::vector<int> alice, const BobAlgebra& alg, const std::vector<std::string>& bob) {
  return {std::move(alice), alg.word_from_names(bob)};
}

StringSet named_set(const std::string& name, const Scenario& sc) {
  const auto& alg = sc.algebra;
  const auto n_inputs = sc.source->n_inputs();
  if (name == "werner") {
    if (n_inputs < 3) throw ConfigError("the werner set needs three Alice inputs");
    return custom_string_set({word({}, alg, {}), word({0}, alg, {"X"}), word({1}, alg, {"Y"}), word({2}, alg, {"Z"})});
  }
  if (name == "noon11") {
    if (n_inputs < 2) throw ConfigError("the noon11 set needs two Alice inputs");
    return custom_string_set({word({}, alg, {}), word({0}, alg, {"q"}), word({0}, alg, {"p"}), word({1}, alg, {"q"}),
                              word({1}, alg, {"p"}), word({0, 0}, alg, {}), word({1, 1}, alg, {}),
                              word({}, alg, {"q", "q"}), word({}, alg, {"q", "p"}), word({}, alg, {"p", "q"}),
                              word({}, alg, {"p", "p"})});
  }
  if (name == "gaussian4") {
    if (n_inputs < 2) throw ConfigError("the gaussian4 set needs two Alice inputs");
    return custom_string_set({word({0}, alg, {}), word({1}, alg, {}), word({}, alg, {"q"}), word({}, alg, {"p"})});
  }
  if (name == "bob-local") {
    std::vector<MomentWord> words{{{}, {}}};
    for (std::size_t b = 0; b < alg.size(); ++b) words.push_back({{}, {static_cast<int>(b)}});
    return custom_string_set(std::move(words));
  }
  throw ConfigError("unknown named string set '" + name + "' (werner | noon11 | gaussian4 | bob-local)");
}

std::string scenario_id(const Json& s) {
  std::string id = s["family"].get<std::string>() + "(";
  bool first = true;
  for (const auto& [key, value] : s.items()) {
    if (key == "family") continue;
    if (!first) id += ",";
    first = false;
    id += key + "=" + (value.is_string() ? value.get<std::string>() : value.dump());
  }
  return id + ")";
}

}  // namespace

Json normalize_scenario(const Json& scenario) {
  if (!scenario.is_object() || !scenario.contains("family") || !scenario["family"].is_string())
    throw ConfigError("scenario needs a string 'family'");
  const auto family = scenario["family"].get<std::string>();
  const std::string where = "scenario '" + family + "'";
  Json out = {{"family", family}};
  if (family == "werner") {
    check_keys(scenario, {"family", "w"}, where);
    const double w = get_number(scenario, "w", where);
    if (w < 0.0 || w > 1.0) throw ConfigError("w must lie in [0, 1]");
    out["w"] = w;
  } else if (family == "noon") {
    check_keys(scenario, {"family", "N", "eta", "d", "alice_sign"}, where);
    const long n = get_int(scenario, "N", where);
    if (n < 1) throw ConfigError("N must be positive");
    const double eta = get_number(scenario, "eta", where);
    if (eta < 0.0 || eta > 1.0) throw ConfigError("eta must lie in [0, 1]");
    const long d = scenario.contains("d") ? get_int(scenario, "d", where) : 4 * n + 2;
    if (d <= n) throw ConfigError("Fock truncation d must exceed N");
    const long sign = scenario.contains("alice_sign") ? get_int(scenario, "alice_sign", where) : 1;
    if (sign != 1 && sign != -1) throw ConfigError("alice_sign must be +1 or -1");
    out["N"] = n;
    out["eta"] = eta;
    out["d"] = d;
    out["alice_sign"] = sign;
  } else if (family == "gaussian-std") {
    check_keys(scenario, {"family", "r", "a", "b", "c1", "c2", "d"}, where);
    if (scenario.contains("r")) {
      for (const char* k : {"a", "b", "c1", "c2"})
        if (scenario.contains(k)) throw ConfigError("give either r or (a, b, c1, c2), not both");
      const double r = get_number(scenario, "r", where);
      if (r < 0.0) throw ConfigError("r must be non-negative");
      out["r"] = r;
    } else {
      for (const char* k : {"a", "b", "c1", "c2"}) out[k] = get_number(scenario, k, where);
    }
    const long d = scenario.contains("d") ? get_int(scenario, "d", where) : 4;
    if (d < 2) throw ConfigError("Bob truncation d must be at least 2");
    out["d"] = d;
  } else if (family == "assemblage-file") {
    check_keys(scenario, {"family", "path", "bob_ops"}, where);
    if (!scenario.contains("path") || !scenario["path"].is_string()) throw ConfigError("assemblage-file needs a 'path'");
    out["path"] = scenario["path"];
    if (scenario.contains("bob_ops")) out["bob_ops"] = scenario["bob_ops"].get<std::string>();
  } else if (family == "random-unsteerable") {
    check_keys(scenario, {"family", "n_inputs", "n_outcomes", "dim_b", "n_lambda", "bob_ops"}, where);
    for (const auto& [key, def] : std::vector<std::pair<std::string, long>>{
             {"n_inputs", 2}, {"n_outcomes", 2}, {"dim_b", 2}, {"n_lambda", 4}}) {
      const long v = scenario.contains(key) ? get_int(scenario, key, where) : def;
      if (v < 1) throw ConfigError(key + " must be positive");
      out[key] = v;
    }
    out["bob_ops"] = scenario.contains("bob_ops") ? scenario["bob_ops"].get<std::string>()
                                                  : default_bob_ops(out["dim_b"].get<Index>());
  } else {
    throw ConfigError("unknown scenario family '" + family +
                      "' (werner | noon | gaussian-std | assemblage-file | random-unsteerable)");
  }
  return out;
}

Json RunConfig::to_json() const {
  Json j = {{"version", kConfigVersion}, {"scenario", scenario}};
  if (!string_set.is_null()) j["string_set"] = string_set;
  j["policy"] = steer::to_string(policy);
  j["solver"] = {{"tol", solver.tol}, {"max_iter", solver.max_iter}};
  j["output"] = {{"dir", out_dir}};
  j["seed"] = seed;
  return j;
}

RunConfig parse_config(const Json& doc) {
  try {
    check_keys(doc, {"version", "scenario", "string_set", "policy", "solver", "output", "seed"}, "config");
    if (!doc.contains("version") || !doc["version"].is_number_integer() || doc["version"].get<int>() != kConfigVersion)
      throw ConfigError("config 'version' must be " + std::to_string(kConfigVersion));
    if (!doc.contains("scenario")) throw ConfigError("config needs a 'scenario'");
    RunConfig c;
    c.scenario = normalize_scenario(doc["scenario"]);
    if (doc.contains("string_set")) {
      const auto& s = doc["string_set"];
      check_keys(s, {"level", "involutive", "named", "words"}, "string_set");
      const int kinds = static_cast<int>(s.contains("level")) + static_cast<int>(s.contains("named")) +
                        static_cast<int>(s.contains("words"));
      if (kinds != 1) throw ConfigError("string_set needs exactly one of level, named, words");
      if (s.contains("involutive") && !s.contains("level")) throw ConfigError("'involutive' applies to levels only");
      if (s.contains("level") && get_int(s, "level", "string_set") < 0) throw ConfigError("level must be non-negative");
      if (s.contains("words")) {
        if (!s["words"].is_array() || s["words"].empty()) throw ConfigError("'words' must be a non-empty array");
        for (const auto& w : s["words"]) {
          check_keys(w, {"alice", "bob"}, "string_set word");
          if (w.contains("alice")) (void)w["alice"].get<std::vector<int>>();
          if (w.contains("bob")) (void)w["bob"].get<std::vector<std::string>>();
        }
      }
      c.string_set = s;
    }
    if (doc.contains("policy")) {
      if (!doc["policy"].is_string()) throw ConfigError("policy must be a string");
      c.policy = policy_from_string(doc["policy"].get<std::string>());
    }
    if (doc.contains("solver")) {
      const auto& s = doc["solver"];
      check_keys(s, {"tol", "max_iter"}, "solver");
      if (s.contains("tol")) c.solver.tol = get_number(s, "tol", "solver");
      if (s.contains("max_iter")) c.solver.max_iter = static_cast<int>(get_int(s, "max_iter", "solver"));
    }
    if (!(c.solver.tol >= 1e-10 && c.solver.tol <= 1e-4)) throw ConfigError("solver tol must lie in [1e-10, 1e-4]");
    if (c.solver.max_iter < 1) throw ConfigError("solver max_iter must be positive");
    if (doc.contains("output")) {
      check_keys(doc["output"], {"dir"}, "output");
      if (doc["output"].contains("dir")) c.out_dir = doc["output"]["dir"].get<std::string>();
    }
    if (doc.contains("seed")) {
      if (!doc["seed"].is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
      c.seed = doc["seed"].get<std::uint64_t>();
    }
    return c;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config schema violation: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  Json doc;
  try {
    doc = Json::parse(read_text_file(path));
  } catch (const Json::exception& e) {
    throw ConfigError("malformed config " + path + ": " + e.what());
  }
  return parse_config(doc);
}

Scenario make_scenario(const Json& raw, std::uint64_t seed) {
  const Json s = normalize_scenario(raw);
  const auto family = s["family"].get<std::string>();
  Scenario sc;
  sc.id = scenario_id(s);
  if (family == "werner") {
    const auto p = pauli_set();
    sc.source = std::make_unique<StateSource>(
        werner_state(s["w"].get<double>()),
        std::vector<ProjectiveMeasurement>{measurement_from_observable(p.x), measurement_from_observable(p.y),
                                           measurement_from_observable(p.z)});
    sc.algebra = BobAlgebra::pauli();
    sc.default_set = named_set("werner", sc);
  } else if (family == "noon") {
    const int n = s["N"].get<int>();
    const Index d = s["d"].get<Index>();
    const double sign = s["alice_sign"].get<double>();
    const auto quad = generalized_quadratures(n, d);
    sc.source = std::make_unique<StateSource>(
        lossy_noon_state(n, s["eta"].get<double>(), d),
        std::vector<ProjectiveMeasurement>{measurement_from_observable(sign * quad.q),
                                           measurement_from_observable(sign * quad.p)});
    sc.algebra = BobAlgebra::bosonic(n, d);
    sc.default_set = named_set("noon11", sc);
  } else if (family == "gaussian-std") {
    GaussianStdForm g = s.contains("r") ? two_mode_squeezed_std_form(s["r"].get<double>())
                                        : GaussianStdForm{s["a"].get<double>(), s["b"].get<double>(),
                                                          s["c1"].get<double>(), s["c2"].get<double>()};
    sc.source = std::make_unique<GaussianSource>(g);
    sc.algebra = BobAlgebra::bosonic(1, s["d"].get<Index>());
    sc.default_set = named_set("gaussian4", sc);
  } else if (family == "assemblage-file") {
    auto a = load_assemblage(s["path"].get<std::string>());
    const Index dim = a.dim_b();
    sc.algebra = algebra_for(s.contains("bob_ops") ? s["bob_ops"].get<std::string>() : default_bob_ops(dim), dim);
    sc.source = std::make_unique<AssemblageSource>(std::move(a));
    sc.default_set = generate_level(static_cast<int>(sc.source->n_inputs()), static_cast<int>(sc.algebra.size()), 2);
  } else {
    auto sample = random_unsteerable_assemblage(s["n_inputs"].get<std::size_t>(), s["n_outcomes"].get<std::size_t>(),
                                                s["dim_b"].get<Index>(), s["n_lambda"].get<std::size_t>(), seed);
    sc.algebra = algebra_for(s["bob_ops"].get<std::string>(), s["dim_b"].get<Index>());
    sc.source = std::make_unique<AssemblageSource>(std::move(sample.assemblage));
    sc.default_set = generate_level(static_cast<int>(sc.source->n_inputs()), static_cast<int>(sc.algebra.size()), 2);
  }
  return sc;
}

StringSet make_string_set(const Json& spec, const Scenario& sc) {
  if (spec.is_null()) return sc.default_set;
  if (spec.contains("level")) {
    const bool inv = spec.value("involutive", false);
    return generate_level(static_cast<int>(sc.source->n_inputs()), static_cast<int>(sc.algebra.size()),
                          spec["level"].get<int>(), {inv, inv});
  }
  if (spec.contains("named")) return named_set(spec["named"].get<std::string>(), sc);
  std::vector<MomentWord> words;
  for (const auto& w : spec["words"]) {
    MomentWord mw;
    if (w.contains("alice")) mw.alice = w["alice"].get<std::vector<int>>();
    if (w.contains("bob")) mw.bob = sc.algebra.word_from_names(w["bob"].get<std::vector<std::string>>());
    words.push_back(std::move(mw));
  }
  return custom_string_set(std::move(words));
}

PipelineResult run_pipeline(const RunConfig& config, const Scenario& sc) {
  PipelineResult r;
  auto t0 = Clock::now();
  const StringSet set = make_string_set(config.string_set, sc);
  r.tmpl = build_template(set, sc.algebra, config.policy, *sc.source);
  r.problem = SdpProblem::from_template(r.tmpl);
  r.build_ms = ms_since(t0);
  t0 = Clock::now();
  r.solution = solve(r.problem, config.solver);
  r.solve_ms = ms_since(t0);
  r.certificate = certify(r.solution, r.problem);
  r.decision = decide(r.solution.lambda_star, config.solver.tol);
  return r;
}

PipelineResult run_pipeline(const RunConfig& config) {
  const Scenario sc = make_scenario(config.scenario, config.seed);
  return run_pipeline(config, sc);
}

std::optional<Json> stability_rerun(const RunConfig& config, const PipelineResult& base) {
  if (config.scenario["family"] != "noon") return std::nullopt;
  RunConfig c = config;
  c.scenario["d"] = config.scenario["d"].get<long>() + 2;
  const auto r = run_pipeline(c);
  return Json{{"d", c.scenario["d"]},
              {"lambda_star", r.solution.lambda_star},
              {"decision", to_string(r.decision)},
              {"certified", r.certificate.accepted},
              {"agrees", r.decision == base.decision}};
}

Witness extract_witness(const RunConfig& config, const PipelineResult& result) {
  Provenance p;
  p.scenario = scenario_id(config.scenario);
  p.policy = to_string(config.policy);
  for (const auto& w : result.tmpl.words.words) p.string_set.push_back(describe_word(w, result.tmpl.algebra));
  p.solver_tol = config.solver.tol;
  return witness_from_dual(result.tmpl, result.problem, result.solution, std::move(p));
}

ScanPoint scan_point(const RunConfig& config, const std::string& param, double value) {
  RunConfig c = config;
  if (!c.scenario.contains(param) || !c.scenario[param].is_number())
    throw ConfigError("scenario has no numeric parameter '" + param + "'");
  c.scenario[param] = value;
  c.scenario = normalize_scenario(c.scenario);
  const auto r = run_pipeline(c);
  if (r.solution.status != SolveStatus::Optimal)
    throw NumericalError("solver failed at " + param + "=" + std::to_string(value) + ": " + r.solution.message);
  ScanPoint p;
  p.param = value;
  p.lambda_star = r.solution.lambda_star;
  p.steering = r.decision == Decision::Steering;
  p.certified = r.certificate.accepted;
  p.decision = to_string(r.decision);
  return p;
}

}  // namespace steer::app
