#include <benchmark/benchmark.h>

#include <filesystem>

#include "alm/estimator.hpp"
#include "alm/runner_io.hpp"

namespace {

void BM_RunCell(benchmark::State& state) {
  auto cfg = alm::RunConfig::load(std::filesystem::path(ALM_DATA_DIR) / "synthetic" / "config.json");
  cfg.scenarios = static_cast<std::size_t>(state.range(0));
  const auto books = alm::load_books(cfg);
  const auto scenarios = alm::generate_scenarios(alm::esg_config(cfg, books.curve));
  const auto iv = alm::implied_normal_vols(scenarios, cfg.horizon);
  for (auto _ : state) benchmark::DoNotOptimize(alm::run_cell(cfg, books, scenarios, iv, books.ug_ratio(), 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunCell)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
