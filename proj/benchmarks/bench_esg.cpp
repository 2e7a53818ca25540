#include <benchmark/benchmark.h>

#include <filesystem>

#include "alm/estimator.hpp"
#include "alm/runner_io.hpp"

namespace {

const alm::RunConfig& config() {
  static const auto c = alm::RunConfig::load(std::filesystem::path(ALM_DATA_DIR) / "synthetic" / "config.json");
  return c;
}

void BM_GenerateScenarios(benchmark::State& state) {
  const auto curve = alm::load_books(config()).curve;
  auto esg = alm::esg_config(config(), curve);
  esg.scenarios = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(alm::generate_scenarios(esg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateScenarios)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_FloorletBlack(benchmark::State& state) {
  double k = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(alm::floorlet_black(10, 0.02, k, 0.006, 0.8));
    k += 1e-9;
  }
}
BENCHMARK(BM_FloorletBlack);

}  // namespace

BENCHMARK_MAIN();
