#include "steer/io.hpp"

#include "steer/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace steer {

namespace {

Json complex_matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

CMatrix complex_matrix_from_json(const Json& j, Index dim) {
  if (!j.is_array() || static_cast<Index>(j.size()) != dim) throw ConfigError("sigma must have dim_b rows");
  CMatrix m(dim, dim);
  for (Index r = 0; r < dim; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != dim) throw ConfigError("sigma rows must have dim_b entries");
    for (Index c = 0; c < dim; ++c) {
      const auto& e = row[static_cast<std::size_t>(c)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ConfigError("matrix entries must be [re, im] number pairs");
      m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  for (const auto& key : allowed)
    if (!j.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
}

}  // namespace

Json assemblage_to_json(const Assemblage& assemblage) {
  Json inputs = Json::array();
  for (std::size_t x = 0; x < assemblage.n_inputs(); ++x) {
    Json sigmas = Json::array();
    for (const auto& s : assemblage.sigma[x]) sigmas.push_back(complex_matrix_to_json(s));
    inputs.push_back({{"outcomes", assemblage.outcomes[x]}, {"sigmas", sigmas}});
  }
  return {{"dim_b", assemblage.dim_b()}, {"inputs", inputs}};
}

Assemblage assemblage_from_json(const Json& doc) {
  try {
    check_keys(doc, {"dim_b", "inputs"}, "assemblage");
    const auto dim = doc["dim_b"].get<Index>();
    if (dim < 1) throw ConfigError("dim_b must be positive");
    if (!doc["inputs"].is_array() || doc["inputs"].empty()) throw ConfigError("assemblage needs at least one input");
    Assemblage a;
    for (const auto& in : doc["inputs"]) {
      check_keys(in, {"outcomes", "sigmas"}, "assemblage input");
      auto outcomes = in["outcomes"].get<std::vector<double>>();
      if (!in["sigmas"].is_array() || in["sigmas"].size() != outcomes.size())
        throw ConfigError("each outcome needs exactly one sigma");
      std::vector<CMatrix> sig;
      for (const auto& s : in["sigmas"]) sig.push_back(complex_matrix_from_json(s, dim));
      a.outcomes.push_back(std::move(outcomes));
      a.sigma.push_back(std::move(sig));
    }
    a.validate();
    return a;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed assemblage document: ") + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
  if (!out) throw ConfigError("write failed for " + path);
}

Assemblage load_assemblage(const std::string& path) {
  Json doc;
  try {
    doc = Json::parse(read_text_file(path));
  } catch (const Json::exception& e) {
    throw ConfigError("malformed assemblage file " + path + ": " + e.what());
  }
  return assemblage_from_json(doc);
}

void save_assemblage(const Assemblage& assemblage, const std::string& path) {
  write_text_file(path, assemblage_to_json(assemblage).dump(2) + "\n");
}

Json template_to_json(const MomentTemplate& tmpl) {
  Json words = Json::array();
  for (const auto& w : tmpl.words.words) words.push_back(describe_word(w, tmpl.algebra));
  Json unknowns = Json::array();
  for (const auto& u : tmpl.unknowns) {
    Json j = {{"alice", u.alice}, {"basis_index", u.basis_index}};
    if (u.observable) {
      j["classification"] = "observable";
      j["value"] = u.value;
    } else {
      j["classification"] = "free";
      j["param"] = u.param;
    }
    unknowns.push_back(j);
  }
  Json entries = Json::array();
  for (std::size_t i = 0; i < tmpl.k; ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < tmpl.k; ++j) {
      Json terms = Json::array();
      for (const auto& t : tmpl.entry(i, j))
        terms.push_back({{"unknown", t.unknown}, {"coeff", {t.coeff.real(), t.coeff.imag()}}});
      row.push_back(terms);
    }
    entries.push_back(row);
  }
  Json pins = Json::array();
  for (const auto& p : tmpl.pins)
    pins.push_back({{"row", p.row},
                    {"col", p.col},
                    {"part", p.imaginary ? "im" : "re"},
                    {"alice", p.alice},
                    {"bob", tmpl.algebra.word_names(p.word)},
                    {"value", p.value}});
  return {{"words", words},
          {"bob_ops", tmpl.algebra.names()},
          {"bob_dim", tmpl.algebra.dim()},
          {"policy", to_string(tmpl.policy)},
          {"k", tmpl.k},
          {"n_free", tmpl.n_free()},
          {"unknowns", unknowns},
          {"pins", pins},
          {"entries", entries}};
}

Json certificate_to_json(const CertificateReport& cert) {
  return {{"accepted", cert.accepted},
          {"violations", cert.violations},
          {"beta", cert.beta},
          {"pin_sum", cert.pin_sum},
          {"min_eig_z", cert.min_eig_z},
          {"trace_z", cert.trace_z},
          {"max_free_residual", cert.max_free_residual},
          {"strong_duality_gap", cert.strong_duality_gap},
          {"min_eig_gamma", cert.min_eig_gamma}};
}

}  // namespace steer
