#include <benchmark/benchmark.h>

#include "aerotwin/protocol.hpp"

using namespace aerotwin;

namespace {

TelemetryFrame sample_frame() {
  TelemetryFrame f;
  f.seq = 1234;
  f.t = 12.34;
  f.drone = {0.01, -0.02, 1.5, 0.015, -0.0325, 0.001};
  f.joints = {0.1, 0.5, 0.4, 0.0};
  f.grip = 0.75;
  f.grip_pose = {0.55, -0.1, 0.0};
  f.torques = {2.5, 0.75, 0.125};
  f.forces = {0.35, 0.35};
  f.events = {{12.34, EventKind::Contact, 0.35}, {12.34, EventKind::Haptic, 0.35}};
  return f;
}

void BM_EncodeFrame(benchmark::State& state) {
  const TelemetryFrame f = sample_frame();
  for (auto _ : state) benchmark::DoNotOptimize(encode_frame(f));
}
BENCHMARK(BM_EncodeFrame);

void BM_DecodeFrame(benchmark::State& state) {
  const std::string bytes = encode_frame(sample_frame());
  for (auto _ : state) benchmark::DoNotOptimize(decode_frame(bytes));
}
BENCHMARK(BM_DecodeFrame);

}  // namespace
