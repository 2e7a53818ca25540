#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "alm/errors.hpp"
#include "alm/runner_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> scenarios;
  std::string out;
};

void add_common(CLI::App* app, Common& c, bool config_required = true) {
  auto* opt = app->add_option("--config", c.config, "run configuration (JSON)");
  if (config_required) opt->required();
  app->add_option("--seed", c.seed, "RNG seed");
  app->add_option("--scenarios", c.scenarios, "number of scenarios");
  app->add_option("--out", c.out, "output directory");
}

alm::RunConfig load(const Common& c) {
  alm::RunConfig cfg = alm::RunConfig::load(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.scenarios) cfg.scenarios = *c.scenarios;
  if (!c.out.empty()) cfg.out_dir = c.out;
  return cfg;
}

void write(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw alm::ConfigError("cannot write " + path.string());
  f << text;
}

int report(const alm::RunSummary& s) {
  std::cout << alm::results_table(s.cells);
  for (const auto& f : s.failures) std::cerr << "FAIL " << f << '\n';
  return s.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo ALM engine and FDB estimator"};
  app.require_subcommand(1);

  Common sim_opts, diag_opts, grid_opts, run_opts, est_opts;

  auto* simulate = app.add_subcommand("simulate", "project the base cell and write the ledger and valuation");
  add_common(simulate, sim_opts);

  auto* estimate = app.add_subcommand("estimate", "closed-form LB/UB/FDB-hat estimate");
  add_common(estimate, est_opts, false);
  std::string public_data;
  alm::PublicDataFlags flags;
  bool no_gc = false, no_ug = false;
  estimate->add_option("--public-data", public_data, "public-data input file");
  estimate->add_flag("--no-gc-adjust", no_gc, "do not add GC to GB");
  estimate->add_flag("--no-ug-scale", no_ug, "do not scale UG_0 to L_0");
  estimate->add_flag("--deduct-sf", flags.deduct_sf, "deduct SF_0 from the computed FDB_0");

  auto* diagnose = app.add_subcommand("diagnose", "write evidence series for the base cell");
  add_common(diagnose, diag_opts);

  auto* grid = app.add_subcommand("grid", "run the full perturbation grid");
  add_common(grid, grid_opts);

  auto* run = app.add_subcommand("run", "run the base cell or the full grid");
  add_common(run, run_opts);
  std::string which = "base";
  run->add_option("--grid", which, "base or full")->check(CLI::IsMember({"base", "full"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      const alm::RunConfig cfg = load(sim_opts);
      const fs::path out = cfg.out_dir;
      fs::create_directories(out);
      const alm::Books base = alm::load_books(cfg);
      const alm::ScenarioSet scenarios = alm::generate_scenarios(alm::esg_config(cfg, base.curve));
      const auto iv = cfg.iv ? std::vector<double>(static_cast<std::size_t>(cfg.horizon) + 1, *cfg.iv)
                             : alm::implied_normal_vols(scenarios, cfg.horizon);
      alm::ProjectionLedger ledger;
      const alm::CellResult cell =
          alm::run_cell(cfg, base, scenarios, iv, cfg.base_ug_ratio, cfg.base_pi0, &ledger);
      write(out / "ledger.csv", alm::ledger_csv(ledger));
      write(out / "valuation.json", alm::valuation_json(cell.valuation));
      std::cout << alm::results_table({cell});
      return 0;
    }
    if (*estimate) {
      if (!public_data.empty()) {
        flags.gc_adjust = !no_gc;
        flags.ug_scale = !no_ug;
        const alm::PublicData data = alm::ingest_public_data(public_data, flags);
        const alm::EstimatorResult r = alm::bounds(data.inputs);
        std::cout << alm::public_estimate_table(data, r);
        if (!est_opts.out.empty()) {
          fs::create_directories(est_opts.out);
          write(fs::path(est_opts.out) / "estimate.json", alm::estimator_json(r));
        }
        return 0;
      }
      if (est_opts.config.empty()) throw alm::ConfigError("estimate: --config or --public-data is required");
      const alm::RunConfig cfg = load(est_opts);
      const alm::Books books = alm::perturb_initial_state(alm::load_books(cfg), cfg.base_ug_ratio, cfg.base_pi0);
      std::vector<double> iv;
      if (cfg.iv) {
        iv.assign(static_cast<std::size_t>(cfg.horizon) + 1, *cfg.iv);
      } else {
        iv = alm::implied_normal_vols(alm::generate_scenarios(alm::esg_config(cfg, books.curve)), cfg.horizon);
      }
      const alm::EstimatorResult r =
          alm::bounds(alm::estimator_inputs(books, cfg.horizon, cfg.management.gph, cfg.management.theta, iv));
      std::cout << "Values in 10^6 units of currency\n" << alm::estimator_json(r) << '\n';
      return 0;
    }
    if (*diagnose) {
      const alm::RunConfig cfg = load(diag_opts);
      return report(alm::run(cfg, false, cfg.out_dir));
    }
    if (*grid) {
      const alm::RunConfig cfg = load(grid_opts);
      return report(alm::run(cfg, true, cfg.out_dir));
    }
    if (*run) {
      const alm::RunConfig cfg = load(run_opts);
      return report(alm::run(cfg, which == "full", cfg.out_dir));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
