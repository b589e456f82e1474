#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "aerotwin/kinematics.hpp"

using namespace aerotwin;

namespace {

std::vector<JointAngles> samples(std::size_t n) {
  const JointLimits l;
  std::mt19937_64 rng(1);
  auto pick = [&](const JointRange& r) {
    return std::uniform_real_distribution<double>(r.min, r.max)(rng);
  };
  std::vector<JointAngles> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({pick(l.theta), pick(l.beta), pick(l.alpha), 0.0});
  return out;
}

void BM_ForwardGrip(benchmark::State& state) {
  const LinkGeometry g;
  const auto qs = samples(1024);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(fk_grip(g, {}, qs[i++ & 1023]));
}
BENCHMARK(BM_ForwardGrip);

void BM_InverseSolve(benchmark::State& state) {
  const LinkGeometry g;
  const JointLimits l;
  std::vector<PlanarPose> targets;
  for (const JointAngles& q : samples(1024)) targets.push_back(fk_grip(g, {}, q));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ik_solve(g, targets[i++ & 1023], l));
}
BENCHMARK(BM_InverseSolve);

void BM_StaticTorques(benchmark::State& state) {
  const LinkGeometry g;
  const MassModel m;
  const auto qs = samples(1024);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(static_torques(g, m, qs[i++ & 1023], true));
}
BENCHMARK(BM_StaticTorques);

}  // namespace
