#include "commands.hpp"

#include "steer/analytic.hpp"
#include "steer/error.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace steer::app {

namespace {

namespace fs = std::filesystem;

RunConfig load_with_overrides(const std::string& path, const GlobalOptions& opts) {
  RunConfig c = load_config(path);
  if (opts.seed) c.seed = *opts.seed;
  if (opts.tol) {
    if (!(*opts.tol >= 1e-10 && *opts.tol <= 1e-4)) throw ConfigError("--tol must lie in [1e-10, 1e-4]");
    c.solver.tol = *opts.tol;
  }
  if (opts.out_dir) c.out_dir = *opts.out_dir;
  return c;
}

std::string prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
  return dir;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

Json solution_json(const PipelineResult& r) {
  return {{"lambda_star", r.solution.lambda_star},
          {"beta_star", r.solution.beta},
          {"duality_gap", r.solution.duality_gap},
          {"decision", to_string(r.decision)},
          {"status", to_string(r.solution.status)},
          {"message", r.solution.message},
          {"iterations", r.solution.iterations},
          {"k", r.tmpl.k},
          {"n_free", r.tmpl.n_free()},
          {"embedded_dim", r.problem.size()},
          {"certificate", certificate_to_json(r.certificate)}};
}

void write_dumps(const PipelineResult& r, const std::string& dir, const GlobalOptions& opts, Json& report) {
  if (opts.dump_template) {
    const auto path = (fs::path(dir) / "template.json").string();
    write_text_file(path, template_to_json(r.tmpl).dump(2) + "\n");
    report["template_path"] = path;
  }
  if (opts.dump_sdpa) {
    const auto path = (fs::path(dir) / "problem.dat-s").string();
    std::ostringstream os;
    write_sdpa(os, r.problem);
    write_text_file(path, os.str());
    report["sdpa_path"] = path;
  }
}

void print_summary(std::ostream& out, const std::string& scenario, const PipelineResult& r) {
  out << "scenario     " << scenario << "\n";
  out << "words        " << r.tmpl.k << "   free parameters " << r.tmpl.n_free() << "   embedded size "
      << r.problem.size() << "\n";
  out << "lambda*      " << sci(r.solution.lambda_star) << "\n";
  out << "beta*        " << sci(r.solution.beta) << "\n";
  out << "gap          " << sci(r.solution.duality_gap) << "   iterations " << r.solution.iterations << "\n";
  out << "status       " << to_string(r.solution.status) << "\n";
  out << "certificate  " << (r.certificate.accepted ? "accepted" : "rejected");
  for (const auto& v : r.certificate.violations) out << "; " << v;
  out << "\n";
  out << "decision     " << to_string(r.decision) << "\n";
}

Witness load_witness(const std::string& ref) {
  if (ref == "fixture:single-photon") return single_photon_fixture_witness();
  if (ref == "fixture:werner-linear") return werner_linear_witness();
  return deserialize(read_text_file(ref));
}

}  // namespace

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const BracketError& e) {
    err << "bracketing failure: " << e.what() << "\n";
    return kBracketFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUnexpected;
  }
}

int cmd_solve(const std::string& config_path, const GlobalOptions& opts, std::ostream& out) {
  const RunConfig config = load_with_overrides(config_path, opts);
  const Scenario sc = make_scenario(config.scenario, config.seed);
  const PipelineResult r = run_pipeline(config, sc);
  const std::string dir = prepare_dir(config.out_dir);

  Json report = {{"version", kConfigVersion}, {"config", config.to_json()}, {"scenario_id", sc.id}};
  report["string_set"] = Json::array();
  for (const auto& w : r.tmpl.words.words) report["string_set"].push_back(describe_word(w, r.tmpl.algebra));
  report["policy"] = to_string(config.policy);
  report.update(solution_json(r));

  const bool ok = r.solution.status == SolveStatus::Optimal && r.certificate.accepted;
  if (ok) {
    const auto path = (fs::path(dir) / "witness.json").string();
    write_text_file(path, serialize(extract_witness(config, r)));
    report["witness_path"] = path;
  } else {
    report["witness_path"] = nullptr;
  }
  if (auto stab = stability_rerun(config, r)) report["stability"] = *stab;
  write_dumps(r, dir, opts, report);
  if (opts.timings) report["timings_ms"] = {{"build", r.build_ms}, {"solve", r.solve_ms}};

  const auto report_path = (fs::path(dir) / "report.json").string();
  write_text_file(report_path, report.dump(2) + "\n");

  print_summary(out, sc.id, r);
  if (report.contains("stability")) {
    const auto& s = report["stability"];
    out << "stability    d=" << s["d"].get<long>() << " lambda* " << sci(s["lambda_star"].get<double>()) << " "
        << s["decision"].get<std::string>() << (s["agrees"].get<bool>() ? " (agrees)" : " (DISAGREES)") << "\n";
  }
  out << "timings      build " << r.build_ms << " ms, solve " << r.solve_ms << " ms\n";
  out << "report       " << report_path << "\n";
  return ok ? kOk : kNumericalFailure;
}

int cmd_scan(const std::string& config_path, const std::string& param, double min, double max, double tol, int jobs,
             const GlobalOptions& opts, std::ostream& out) {
  const RunConfig config = load_with_overrides(config_path, opts);
  if (jobs < 1) throw ConfigError("--jobs must be positive");
  const auto result =
      threshold_scan([&](double v) { return scan_point(config, param, v); }, min, max, tol, jobs);

  Json history = Json::array();
  for (const auto& p : result.history)
    history.push_back(
        {{param, p.param}, {"lambda_star", p.lambda_star}, {"decision", p.decision}, {"certified", p.certified}});
  Json report = {{"version", kConfigVersion},
                 {"config", config.to_json()},
                 {"param", param},
                 {"range", {min, max}},
                 {"tol", tol},
                 {"threshold", result.threshold},
                 {"bracket", {result.lo, result.hi}},
                 {"history", history}};

  bool stable = true;
  if (config.scenario["family"] == "noon") {
    RunConfig c = config;
    c.scenario["d"] = config.scenario["d"].get<long>() + 2;
    const auto lo = scan_point(c, param, result.lo);
    const auto hi = scan_point(c, param, result.hi);
    stable = lo.steering != hi.steering;
    report["stability"] = {{"d", c.scenario["d"]},
                           {"lo", {{"lambda_star", lo.lambda_star}, {"decision", lo.decision}}},
                           {"hi", {{"lambda_star", hi.lambda_star}, {"decision", hi.decision}}},
                           {"bracket_preserved", stable}};
  }
  const std::string dir = prepare_dir(config.out_dir);
  const auto path = (fs::path(dir) / "scan.json").string();
  write_text_file(path, report.dump(2) + "\n");

  out << "scan         " << param << " in [" << min << ", " << max << "], tol " << tol << ", " << result.history.size()
      << " solves\n";
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.6f  bracket [%.6f, %.6f]", result.threshold, result.lo, result.hi);
  out << "threshold    " << buf << "\n";
  if (report.contains("stability"))
    out << "stability    d=" << report["stability"]["d"].get<long>() << (stable ? " bracket preserved" : " BRACKET LOST")
        << "\n";
  out << "report       " << path << "\n";
  return kOk;
}

int cmd_witness_extract(const std::string& config_path, const GlobalOptions& opts, std::ostream& out) {
  const RunConfig config = load_with_overrides(config_path, opts);
  const Scenario sc = make_scenario(config.scenario, config.seed);
  const PipelineResult r = run_pipeline(config, sc);
  if (r.solution.status != SolveStatus::Optimal) throw NumericalError("solver did not converge: " + r.solution.message);
  const Witness w = extract_witness(config, r);
  const std::string dir = prepare_dir(config.out_dir);
  const auto path = (fs::path(dir) / "witness.json").string();
  write_text_file(path, serialize(w));
  const double beta = evaluate(w, *sc.source, sc.algebra);
  out << "terms        " << w.terms.size() << "   constant " << sci(w.constant) << "   scale " << sci(w.provenance.scale)
      << "\n";
  out << "beta         " << sci(beta) << " (normalized), " << sci(beta * w.provenance.scale) << " (solver scale)\n";
  out << "decision     " << to_string(r.decision) << "\n";
  out << "witness      " << path << "\n";
  return kOk;
}

int cmd_witness_eval(const std::string& witness_ref, const std::string& config_path, const GlobalOptions& opts,
                     std::ostream& out) {
  const RunConfig config = load_with_overrides(config_path, opts);
  const Scenario sc = make_scenario(config.scenario, config.seed);
  const Witness w = load_witness(witness_ref);
  const double beta = evaluate(w, *sc.source, sc.algebra);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", beta);
  out << "beta " << buf << (beta < 0.0 ? "  (violated: steering certified)" : "  (satisfied)") << "\n";
  return kOk;
}

int cmd_analytic(const std::string& name, const AnalyticArgs& args, std::ostream& out) {
  Json line = {{"criterion", name}};
  const bool pauli = name.rfind("pauli-", 0) == 0;
  if (pauli) {
    PauliCorrelations c;
    if (args.werner) {
      if (!args.corr.empty()) throw ConfigError("give either --werner or --corr");
      c = {-*args.werner, -*args.werner, -*args.werner};
      line["input"] = {{"werner", *args.werner}};
    } else if (args.corr.size() == 3) {
      c = {args.corr[0], args.corr[1], args.corr[2]};
      line["input"] = {{"corr", args.corr}};
    } else {
      throw ConfigError(name + " needs --corr CXX CYY CZZ or --werner W");
    }
    if (name == "pauli-linear") {
      const auto r = pauli_linear_witness(c);
      line["value"] = r.value;
      line["steering"] = r.steering;
    } else if (name == "pauli-nonlinear") {
      const auto r = pauli_nonlinear_criterion(c);
      line["value"] = r.value;
      line["steering"] = r.steering;
    } else if (name == "pauli-two-setting") {
      const auto rs = pauli_two_setting_criteria(c);
      line["values"] = Json::array();
      bool any = false;
      for (const auto& r : rs) {
        line["values"].push_back(r.value);
        any = any || r.steering;
      }
      line["steering"] = any;
    } else {
      throw ConfigError("unknown criterion '" + name + "'");
    }
  } else {
    GaussianStdForm g;
    if (args.r) {
      if (!args.std_form.empty()) throw ConfigError("give either --r or --std");
      g = two_mode_squeezed_std_form(*args.r);
      line["input"] = {{"r", *args.r}};
    } else if (args.std_form.size() == 4) {
      g = {args.std_form[0], args.std_form[1], args.std_form[2], args.std_form[3]};
      line["input"] = {{"std", args.std_form}};
    } else {
      throw ConfigError(name + " needs --r R or --std A B C1 C2");
    }
    if (name == "gaussian-det") {
      const auto r = gaussian_det_criterion(g);
      line["value"] = r.value;
      line["steering"] = r.steering;
    } else if (name == "gaussian-wiseman") {
      const auto r = gaussian_wiseman_criterion(g);
      line["value"] = r.value;
      line["steering"] = r.steering;
    } else if (name == "gaussian-completion") {
      const auto r = gaussian_psd_completion(g);
      line["value"] = r.best_min_eigenvalue;
      line["best_r"] = r.best_r;
      line["steering"] = !r.completable;
    } else {
      throw ConfigError("unknown criterion '" + name +
                        "' (pauli-linear | pauli-nonlinear | pauli-two-setting | gaussian-det | gaussian-wiseman | "
                        "gaussian-completion)");
    }
  }
  out << line.dump() << "\n";
  return kOk;
}

}  // namespace steer::app
