#include "steer/witnesses.hpp"

#include "steer/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <future>
#include <set>

namespace steer {

namespace {

using json = nlohmann::ordered_json;

constexpr int kWitnessVersion = 1;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

double parse_num(const json& j, const char* what) {
  if (!j.is_string()) throw ConfigError(std::string("witness field '") + what + "' must be a decimal string");
  const auto s = j.get<std::string>();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError(std::string("malformed number in witness field '") + what + "': " + s);
  return v;
}

void require_keys(const json& j, const std::set<std::string>& allowed, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError(std::string("unknown key '") + key + "' in " + where);
  for (const auto& key : allowed)
    if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "' in " + where);
}

std::optional<AlicePower> alice_of(const WitnessLabel& label) {
  if (label.input < 0 || label.power == 0) return std::nullopt;
  if (label.power < 0) throw ConfigError("negative Alice power in witness label");
  return AlicePower{static_cast<std::size_t>(label.input), label.power};
}

WitnessLabel word_label(int input, int power, std::vector<std::string> word) {
  WitnessLabel l;
  l.input = power == 0 ? -1 : input;
  l.power = l.input < 0 ? 0 : power;
  l.kind = BobKind::Word;
  l.word = std::move(word);
  return l;
}

}  // namespace

Witness witness_from_dual(const MomentTemplate& tmpl, const SdpProblem& problem, const SdpSolution& solution,
                          Provenance provenance) {
  if (solution.status != SolveStatus::Optimal) throw ConfigError("witness extraction needs an optimal solution");
  const auto cert = certify(solution, problem);
  if (!cert.accepted) throw ConfigError("witness extraction rejected: " + cert.violations.front());
  if (solution.mu.size() != tmpl.pins.size()) throw ConfigError("dual multipliers do not match the template pins");

  std::vector<WitnessTerm> raw;
  auto add = [&](WitnessLabel label, cplx c) {
    for (auto& t : raw)
      if (t.label == label) {
        t.coeff += c;
        return;
      }
    raw.push_back({std::move(label), c});
  };
  for (std::size_t r = 0; r < tmpl.pins.size(); ++r) {
    const auto& pin = tmpl.pins[r];
    const double mu = solution.mu[r];
    const int input = pin.alice.empty() ? -1 : pin.alice.front();
    const int power = static_cast<int>(pin.alice.size());
    const BobWord rev(pin.word.rbegin(), pin.word.rend());
    const cplx half = pin.imaginary ? cplx(0.0, -mu / 2.0) : cplx(mu / 2.0, 0.0);
    add(word_label(input, power, tmpl.algebra.word_names(pin.word)), half);
    add(word_label(input, power, tmpl.algebra.word_names(rev)), std::conj(half));
  }

  Witness w;
  cplx constant = 0.0;
  for (auto& t : raw) {
    if (t.label.input < 0) {
      const CMatrix m = tmpl.algebra.word_matrix(tmpl.algebra.word_from_names(t.label.word));
      const cplx c = m.trace() / static_cast<double>(m.rows());
      if ((m - c * CMatrix::Identity(m.rows(), m.cols())).norm() <= 1e-12 * (1.0 + m.norm())) {
        constant += t.coeff * c;
        continue;
      }
    }
    w.terms.push_back(t);
  }
  double scale = 0.0;
  for (const auto& t : w.terms) scale = std::max(scale, std::abs(t.coeff));
  std::erase_if(w.terms, [&](const WitnessTerm& t) { return std::abs(t.coeff) <= 1e-12 * scale; });
  if (scale == 0.0) scale = std::max(1.0, std::abs(constant.real()));
  for (auto& t : w.terms) t.coeff /= scale;
  w.constant = constant.real() / scale;
  provenance.scale = scale;
  w.provenance = std::move(provenance);
  return w;
}

cplx evaluate_complex(const Witness& witness, const MomentSource& data, const BobAlgebra& algebra) {
  cplx beta = witness.constant;
  std::optional<HermitianBasis> basis;
  for (const auto& t : witness.terms) {
    const auto alice = alice_of(t.label);
    if (alice && alice->input >= data.n_inputs())
      throw ConfigError("witness refers to Alice input " + std::to_string(alice->input) + " missing from the data");
    cplx m;
    if (t.label.kind == BobKind::Word) {
      m = data.moment(alice, algebra.word_from_names(t.label.word), algebra);
    } else {
      if (!basis) basis = HermitianBasis::gell_mann(algebra.dim());
      if (t.label.basis_index >= basis->size()) throw ConfigError("witness basis index out of range");
      m = data.moment_matrix(alice, (*basis)[t.label.basis_index].matrix());
    }
    beta += t.coeff * m;
  }
  return beta;
}

double evaluate(const Witness& witness, const MomentSource& data, const BobAlgebra& algebra) {
  const cplx beta = evaluate_complex(witness, data, algebra);
  double weight = std::abs(witness.constant);
  for (const auto& t : witness.terms) weight += std::abs(t.coeff);
  if (std::abs(beta.imag()) > 1e-9 * std::max(1.0, weight))
    throw NumericalError("witness value has an imaginary part " + num(beta.imag()));
  return beta.real();
}

std::string serialize(const Witness& witness) {
  json terms = json::array();
  for (const auto& t : witness.terms) {
    json bob;
    if (t.label.kind == BobKind::Word) {
      bob = {{"kind", "word"}, {"ref", t.label.word}};
    } else {
      bob = {{"kind", "basis"}, {"ref", t.label.basis_index}};
    }
    terms.push_back({{"x", t.label.input},
                     {"power", t.label.power},
                     {"bob", bob},
                     {"coeff", {num(t.coeff.real()), num(t.coeff.imag())}}});
  }
  const auto& p = witness.provenance;
  json doc = {{"version", kWitnessVersion},
              {"terms", terms},
              {"constant", num(witness.constant)},
              {"provenance",
               {{"scenario", p.scenario},
                {"policy", p.policy},
                {"string_set", p.string_set},
                {"solver_tol", num(p.solver_tol)},
                {"scale", num(p.scale)}}}};
  return doc.dump(2) + "\n";
}

Witness deserialize(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed witness document: ") + e.what());
  }
  try {
    require_keys(doc, {"version", "terms", "constant", "provenance"}, "witness");
    if (!doc["version"].is_number_integer() || doc["version"].get<int>() != kWitnessVersion)
      throw ConfigError("unsupported witness version");
    Witness w;
    if (!doc["terms"].is_array()) throw ConfigError("witness terms must be an array");
    for (const auto& jt : doc["terms"]) {
      require_keys(jt, {"x", "power", "bob", "coeff"}, "witness term");
      WitnessTerm t;
      t.label.input = jt["x"].get<int>();
      t.label.power = jt["power"].get<int>();
      if (t.label.input < -1 || t.label.power < 0) throw ConfigError("invalid Alice label in witness term");
      if ((t.label.input < 0) != (t.label.power == 0)) throw ConfigError("Alice identity needs x = -1 and power = 0");
      const auto& bob = jt["bob"];
      require_keys(bob, {"kind", "ref"}, "witness bob descriptor");
      const auto kind = bob["kind"].get<std::string>();
      if (kind == "word") {
        t.label.kind = BobKind::Word;
        t.label.word = bob["ref"].get<std::vector<std::string>>();
      } else if (kind == "basis") {
        t.label.kind = BobKind::Basis;
        t.label.basis_index = bob["ref"].get<std::size_t>();
      } else {
        throw ConfigError("unknown bob descriptor kind '" + kind + "'");
      }
      const auto& c = jt["coeff"];
      if (!c.is_array() || c.size() != 2) throw ConfigError("witness coefficient must be a [re, im] pair");
      t.coeff = cplx(parse_num(c[0], "coeff"), parse_num(c[1], "coeff"));
      w.terms.push_back(std::move(t));
    }
    w.constant = parse_num(doc["constant"], "constant");
    const auto& p = doc["provenance"];
    require_keys(p, {"scenario", "policy", "string_set", "solver_tol", "scale"}, "witness provenance");
    w.provenance.scenario = p["scenario"].get<std::string>();
    w.provenance.policy = p["policy"].get<std::string>();
    w.provenance.string_set = p["string_set"].get<std::vector<std::string>>();
    w.provenance.solver_tol = parse_num(p["solver_tol"], "solver_tol");
    w.provenance.scale = parse_num(p["scale"], "scale");
    return w;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("witness schema mismatch: ") + e.what());
  }
}

Witness single_photon_fixture_witness() {
  Witness w;
  w.constant = 8.1657;
  auto add = [&](int x, int power, std::vector<std::string> word, cplx c) {
    w.terms.push_back({word_label(x, power, std::move(word)), c});
  };
  add(0, 1, {"q"}, -1.0);
  add(1, 1, {"p"}, -1.0);
  add(0, 1, {"q", "q", "q"}, 0.2508);
  add(1, 1, {"p", "p", "p"}, 0.2508);
  add(0, 2, {}, -0.3110);
  add(1, 2, {}, -0.3110);
  add(0, 2, {"q", "q"}, 0.3205);
  add(1, 2, {"p", "p"}, 0.3205);
  add(0, 2, {"p", "p"}, 0.3020);
  add(1, 2, {"q", "q"}, 0.3020);
  add(0, 3, {"q"}, -0.0001);
  add(1, 3, {"p"}, -0.0001);
  add(-1, 0, {"q", "q", "q", "q"}, 7.7217);
  add(-1, 0, {"p", "p", "p", "p"}, 7.7217);
  add(-1, 0, {"q", "q", "p", "p"}, 15.5451);
  add(-1, 0, {"q", "q"}, -31.0941);
  add(-1, 0, {"p", "p"}, -31.0941);
  add(-1, 0, {"q", "p"}, cplx(0.0, -31.0903));
  w.provenance.scenario = "noon N=1 eta=0.67 (printed coefficients)";
  w.provenance.policy = "local-restricted";
  w.provenance.string_set = {"1*1", "A0*q", "A0*p", "A1*q", "A1*p", "A0A0*1", "A1A1*1", "1*qq", "1*qp", "1*pq", "1*pp"};
  return w;
}

Witness werner_linear_witness() {
  Witness w;
  w.constant = std::sqrt(3.0);
  w.terms.push_back({word_label(0, 1, {"X"}), 1.0});
  w.terms.push_back({word_label(1, 1, {"Y"}), 1.0});
  w.terms.push_back({word_label(2, 1, {"Z"}), 1.0});
  w.provenance.scenario = "werner";
  w.provenance.policy = "full";
  w.provenance.string_set = {"1*1", "A0*X", "A1*Y", "A2*Z"};
  return w;
}

ScanResult threshold_scan(const std::function<ScanPoint(double)>& evaluate_point, double lo, double hi, double tol,
                          int jobs) {
  if (!(lo < hi)) throw ConfigError("scan range must satisfy min < max");
  if (!(tol > 0.0)) throw ConfigError("scan tolerance must be positive");
  jobs = std::max(1, jobs);
  ScanResult res;
  const ScanPoint first = evaluate_point(lo);
  const ScanPoint last = evaluate_point(hi);
  res.history = {first, last};
  if (first.steering == last.steering)
    throw BracketError(std::string("no threshold in range: both endpoints ") +
                       (first.steering ? "show steering" : "show no steering"));
  const bool lo_side = first.steering;
  while (hi - lo > tol) {
    std::vector<double> params;
    for (int i = 1; i <= jobs; ++i) params.push_back(lo + (hi - lo) * i / (jobs + 1));
    std::vector<ScanPoint> points(params.size());
    if (jobs == 1) {
      points[0] = evaluate_point(params[0]);
    } else {
      std::vector<std::future<ScanPoint>> futs;
      for (double p : params) futs.push_back(std::async(std::launch::async, evaluate_point, p));
      for (std::size_t i = 0; i < futs.size(); ++i) points[i] = futs[i].get();
    }
    res.history.insert(res.history.end(), points.begin(), points.end());
    double new_lo = lo, new_hi = hi;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].steering != lo_side) {
        new_hi = params[i];
        break;
      }
      new_lo = params[i];
    }
    lo = new_lo;
    hi = new_hi;
  }
  res.lo = lo;
  res.hi = hi;
  res.threshold = 0.5 * (lo + hi);
  return res;
}

}  // namespace steer
