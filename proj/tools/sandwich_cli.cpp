#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "sandwich/config.hpp"
#include "sandwich/scenario.hpp"

using namespace sandwich;

int main(int argc, char** argv) {
  CLI::App app{"Simulator and safe boundary-control harness for ODE-PDE-ODE cascades"};
  app.require_subcommand(1);

  std::string config_path, mode_str, out_dir;
  int nx_override = 0, levels = 3;
  double dt_override = 0.0, horizon_override = 0.0;
  unsigned seed = 0;
  bool seed_set = false;

  CLI::App* sim = app.add_subcommand("simulate", "run one configured scenario");
  sim->add_option("--config", config_path, "config file path")->required();
  sim->add_option("--mode", mode_str, "open-loop|nominal|adaptive (overrides config)");
  sim->add_option("--out", out_dir, "output directory (overrides config)");
  sim->add_option("--nx", nx_override, "spatial cells (overrides config)");
  sim->add_option("--dt", dt_override, "time step (overrides config)");
  sim->add_option("--horizon", horizon_override, "horizon in seconds (overrides config)");
  sim->add_option("--seed", seed, "rng seed recorded with the run")
      ->each([&](const std::string&) { seed_set = true; });

  CLI::App* ref = app.add_subcommand("refine", "grid refinement study");
  ref->add_option("--config", config_path, "config file path")->required();
  ref->add_option("--levels", levels, "number of refinement levels (>= 2)");

  CLI::App* val = app.add_subcommand("validate", "check config and model assumptions");
  val->add_option("--config", config_path, "config file path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    ScenarioConfig cfg = parse_config(config_path);
    if (!mode_str.empty()) cfg.mode = run_mode_from_string(mode_str);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (nx_override > 0) cfg.grid.nx = nx_override;
    if (dt_override > 0.0) cfg.grid.dt = dt_override;
    if (horizon_override > 0.0) cfg.horizon = horizon_override;
    if (seed_set) cfg.seed = seed;

    if (sim->parsed()) {
      const RunResult res = run_scenario(cfg);
      std::cout << res.summary_text;
      if (!cfg.out_dir.empty()) std::cout << "traces written to " << cfg.out_dir << "\n";
      return res.fault ? 1 : 0;
    }
    if (ref->parsed()) {
      const RefinementStudy study = refinement_study(cfg, levels);
      std::cout << study.table_text;
      return 0;
    }
    if (val->parsed()) {
      const PlantState state0 = cfg.initial_state();
      double gamma0 = std::numeric_limits<double>::quiet_NaN();
      if (cfg.mode != RunMode::OpenLoop) {
        ContextCache cache(cfg.plant, cfg.gains, cfg.grid.nx, cfg.kernel_refine);
        const ControllerContext& ctx = cache.get(cfg.plant.theta());
        PlantState s = state0;
        enforce_boundary_compatibility(s, cfg.plant);
        gamma0 = gamma_derivs(s, ctx, 0)[0];
      }
      PlantState s = state0;
      const ValidationReport report = validate(cfg.plant, s, cfg.grid, gamma0);
      auto line = [](const char* name, bool ok) {
        std::printf("%-24s %s\n", name, ok ? "PASS" : "FAIL");
      };
      line("cfl", report.cfl_ok);
      line("assumption1 (f(0)=0)", report.assumption1_ok);
      line("assumption2 (theta box)", report.assumption2_ok);
      line("assumption3 (free y1)", report.assumption3_ok);
      line("assumption4 (h1(0)>0)", report.assumption4_ok);
      line("boundary compatibility", report.boundary_compatible);
      for (const auto& m : report.messages) std::cout << "note: " << m << "\n";
      std::printf("assumption3 min %.6g, terminal %.6g; assumption4 margin %.6g\n",
                  report.assumption3_min, report.assumption3_terminal,
                  report.assumption4_margin);
      return report.all_ok() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
