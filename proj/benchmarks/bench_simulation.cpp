#include <benchmark/benchmark.h>

#include "aerotwin/simulation.hpp"

using namespace aerotwin;

namespace {

void BM_SimulationTick(benchmark::State& state) {
  Simulation sim{Config{}};
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
}
BENCHMARK(BM_SimulationTick);

void BM_SimulationTickWithCommand(benchmark::State& state) {
  const Config config;
  Simulation sim(config);
  OperatorCommand cmd;
  cmd.payload = TeleopPayload{{0.2, 0.6, 0.4, 0.0}};
  cmd.grip_fraction = 0.5;
  const OperatorCommand cmds[] = {cmd};
  for (auto _ : state) benchmark::DoNotOptimize(sim.step(cmds));
}
BENCHMARK(BM_SimulationTickWithCommand);

}  // namespace
