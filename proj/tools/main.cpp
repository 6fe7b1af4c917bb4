#include "commands.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  using namespace steer::app;

  CLI::App app{"Moment-matrix EPR steering detection"};
  app.require_subcommand(1);

  GlobalOptions g;
  std::uint64_t seed = 0;
  double tol = 0.0;
  std::string out_dir;
  auto* seed_opt = app.add_option("--seed", seed, "Seed for random scenario families");
  auto* tol_opt = app.add_option("--tol", tol, "Solver tolerance (duality gap)");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--timings", g.timings, "Record wall-clock timings in JSON reports");
  app.add_flag("--dump-template", g.dump_template, "Write the moment template as JSON");
  app.add_flag("--dump-sdpa", g.dump_sdpa, "Write the SDP in SDPA sparse format");

  std::string config;

  auto* solve = app.add_subcommand("solve", "Build, solve and certify one scenario");
  solve->add_option("--config", config, "Run configuration (JSON)")->required();

  std::string param;
  double min = 0.0, max = 0.0, scan_tol = 1e-3;
  int jobs = 1;
  auto* scan = app.add_subcommand("scan", "Bisect the steering threshold over one scenario parameter");
  scan->add_option("--config", config, "Run configuration (JSON)")->required();
  scan->add_option("--param", param, "Scenario parameter to scan")->required();
  scan->add_option("--min", min, "Lower end of the range")->required();
  scan->add_option("--max", max, "Upper end of the range")->required();
  scan->add_option("--tol", scan_tol, "Bracket width at which to stop");
  scan->add_option("--jobs", jobs, "Concurrent solves per bisection round")->check(CLI::PositiveNumber);

  auto* witness = app.add_subcommand("witness", "Extract or evaluate steering witnesses");
  witness->require_subcommand(1);
  auto* extract = witness->add_subcommand("extract", "Solve and write the dual witness");
  extract->add_option("--config", config, "Run configuration (JSON)")->required();
  std::string witness_ref;
  auto* eval = witness->add_subcommand("eval", "Evaluate a witness on a scenario's data");
  eval->add_option("--witness", witness_ref, "Witness document, or fixture:single-photon / fixture:werner-linear")
      ->required();
  eval->add_option("--config", config, "Run configuration providing the data")->required();

  std::string criterion;
  AnalyticArgs aargs;
  double werner = 0.0, r = 0.0;
  auto* analytic = app.add_subcommand("analytic", "Closed-form criteria");
  analytic->add_option("name", criterion, "pauli-linear | pauli-nonlinear | pauli-two-setting | gaussian-det | "
                                          "gaussian-wiseman | gaussian-completion")
      ->required();
  analytic->add_option("--corr", aargs.corr, "Correlations <A0 X> <A1 Y> <A2 Z>")->expected(3);
  auto* werner_opt = analytic->add_option("--werner", werner, "Werner weight w");
  auto* r_opt = analytic->add_option("--r", r, "Two-mode squeezing r");
  analytic->add_option("--std", aargs.std_form, "Standard form a b c1 c2")->expected(4);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigFailure;
  }

  if (*seed_opt) g.seed = seed;
  if (*tol_opt) g.tol = tol;
  if (*out_opt) g.out_dir = out_dir;
  if (*werner_opt) aargs.werner = werner;
  if (*r_opt) aargs.r = r;

  return guarded(
      [&] {
        if (*solve) return cmd_solve(config, g, std::cout);
        if (*scan) return cmd_scan(config, param, min, max, scan_tol, jobs, g, std::cout);
        if (*extract) return cmd_witness_extract(config, g, std::cout);
        if (*eval) return cmd_witness_eval(witness_ref, config, g, std::cout);
        return cmd_analytic(criterion, aargs, std::cout);
      },
      std::cerr);
}
