// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include <unistd.h>

#include <boost/asio.hpp>

#include "aerotwin/config.hpp"
#include "aerotwin/kinematics.hpp"
#include "aerotwin/protocol.hpp"
#include "aerotwin/record.hpp"
#include "aerotwin/server.hpp"
#include "aerotwin/stats.hpp"
#include "commands.hpp"

namespace fs = std::filesystem;
using namespace aerotwin;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

fs::path source(const std::string& rel) { return fs::path(AEROTWIN_SOURCE_DIR) / rel; }

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path work_dir() {
  const fs::path dir =
      fs::temp_directory_path() / ("aerotwin_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Config shipped_config() { return load_config(source("config/default.json")); }

Outcome round_trip() {
  const Config c = shipped_config();
  std::mt19937_64 rng(2024);
  auto pick = [&](const JointRange& r) {
    return std::uniform_real_distribution<double>(r.min, r.max)(rng);
  };
  const auto start = std::chrono::steady_clock::now();
  int passed = 0;
  double worst_pos = 0.0;
  double worst_ang = 0.0;
  constexpr int kSamples = 10000;
  for (int i = 0; i < kSamples; ++i) {
    const JointAngles q{pick(c.limits.theta), pick(c.limits.beta), pick(c.limits.alpha), 0.0};
    const PlanarPose p = fk_grip(c.geometry, {}, q);
    const IkResult r = ik_solve(c.geometry, p, c.limits);
    if (!r.ok()) continue;
    const PlanarPose b = fk_grip(c.geometry, {}, r.angles);
    const double dp = std::max(std::abs(b.x - p.x), std::abs(b.z - p.z));
    const double da = std::abs(b.phi - p.phi);
    worst_pos = std::max(worst_pos, dp);
    worst_ang = std::max(worst_ang, da);
    if (dp <= 1e-9 && da <= 1e-9) ++passed;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {passed == kSamples && secs < 5.0,
          fmt("%d/%d within 1e-9 (worst %.1e m, %.1e rad) in %.3f s", passed, kSamples,
              worst_pos, worst_ang, secs)};
}

Outcome ground_parallel() {
  const Config c = shipped_config();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-0.8, 0.8);
  int solved = 0;
  double worst = 0.0;
  auto check = [&](double x, double z) {
    const IkResult r = ik_solve(c.geometry, {x, z, 0.0}, c.limits);
    if (!r.ok()) return;
    ++solved;
    worst = std::max(worst, std::abs(r.angles.alpha - r.angles.beta + r.angles.theta));
  };
  for (int i = -80; i <= 80; ++i) {
    for (int k = -80; k <= 80; ++k) check(i * 0.01, k * 0.01);
  }
  for (int i = 0; i < 20000; ++i) check(ux(rng), ux(rng));
  return {solved > 1000 && worst <= 1e-12,
          fmt("%d phi=0 solutions, max |alpha - beta + theta| = %.1e rad", solved, worst)};
}

Outcome geometry_anchor() {
  const Config c = shipped_config();
  const PlanarPose p = fk_grip(c.geometry, {}, {});
  return {p.x == 0.740,
          fmt("zero-pose grip x = %.17g m, %s 0.740", p.x, p.x == 0.740 ? "equals" : "differs from")};
}

Outcome torque_anchor() {
  const Config c = shipped_config();
  MassModel m = c.masses;
  m.payload_mass = 0.4;
  const JointTorques t = static_torques(c.geometry, m, {}, true);
  return {std::abs(t.t1 - 5.3) <= 0.1, fmt("shoulder torque %.4f N*m (target 5.3 +- 0.1)", t.t1)};
}

/// First release time and how long pitch stays outside 0.5 deg after it.
std::pair<double, double> settle_after_release(const SessionRecord& r) {
  double release = -1.0;
  for (const IndexedEvent& e : r.events) {
    if (e.event.kind == EventKind::Release) {
      release = e.event.t;
      break;
    }
  }
  if (release < 0.0) return {-1.0, 1e9};
  double last_outside = release;
  for (const TelemetryFrame& f : r.frames) {
    if (f.t > release && std::abs(rad_to_deg(f.drone.pitch)) > 0.5) last_outside = f.t;
  }
  return {release, last_outside - release};
}

Outcome settle_anchor(const fs::path& dir) {
  const Config c = shipped_config();
  const auto a = cli::cmd_replay(c, source("scripts/vr_grasp.json"), dir / "vr_a.json");
  const auto b = cli::cmd_replay(c, source("scripts/vr_grasp.json"), dir / "vr_b.json");
  const auto [release, settle] = settle_after_release(a.record);
  const bool same = slurp(a.record_path) == slurp(b.record_path);
  double peak = 0.0;
  for (const TelemetryFrame& f : a.record.frames) {
    if (f.t > release) peak = std::max(peak, std::abs(rad_to_deg(f.drone.pitch)));
  }
  return {release >= 0.0 && settle <= 4.0 && same,
          fmt("release at %.2f s, pitch within 0.5 deg after %.2f s (peak %.2f deg), %s",
              release, settle, peak, same ? "deterministic" : "NOT deterministic")};
}

Outcome deviation_envelope(const fs::path& dir) {
  const auto out =
      cli::cmd_replay(shipped_config(), source("scripts/gui_trajectory.json"), dir / "gui.json");
  const SessionRecord& r = out.record;
  const DeviationStats pitch = compute_stats(r, AttitudeSignal::Pitch, full_window(r));
  const DeviationStats roll = compute_stats(r, AttitudeSignal::Roll, full_window(r));
  // contact, then grasp, then release, in timeline order
  std::size_t stage = 0;
  const EventKind order[] = {EventKind::Contact, EventKind::Grasp, EventKind::Release};
  for (const IndexedEvent& e : r.events) {
    if (stage < 3 && e.event.kind == order[stage]) ++stage;
  }
  const bool pass = pitch.max_abs <= 10.0 && roll.max_abs <= 6.0 && stage == 3;
  return {pass, fmt("max |pitch| %.2f deg (<= 10), max |roll| %.2f deg (<= 6), "
                    "contact->grasp->release %s",
                    pitch.max_abs, roll.max_abs, stage == 3 ? "present" : "missing")};
}

TelemetryFrame expected_event_frame() {
  TelemetryFrame f;
  f.seq = 42;
  f.t = 0.42;
  f.drone = {0.01, -0.02, 1.5, 0.015, -0.0325, 0.0};
  f.joints = {0.1, 0.5, 0.4, 0.0};
  f.grip = 0.75;
  f.grip_pose = {0.55, -0.1, 0.0};
  f.torques = {2.5, 0.75, 0.125};
  f.forces = {0.35, 0.35};
  f.events = {{0.42, EventKind::Contact, 0.35},
              {0.42, EventKind::Grasp, 0.35},
              {0.42, EventKind::Haptic, 0.35}};
  return f;
}

std::size_t serve_one_second() {
  ServerOptions options;
  options.port = 0;
  options.bind_address = "127.0.0.1";
  options.autostart = false;
  options.max_ticks = 100;
  TelemetryServer server(shipped_config(), options);

  namespace asio = boost::asio;
  asio::io_context io;
  asio::ip::tcp::socket socket(io);
  socket.connect({asio::ip::make_address("127.0.0.1"), server.port()});
  asio::write(socket, asio::buffer(encode_message(Hello{SessionRole::Observer, "acceptance"})));
  MessageReader reader;
  std::atomic<std::size_t> frames{0};
  std::atomic<bool> welcomed{false};
  std::thread consumer([&] {
    char chunk[8192];
    boost::system::error_code ec;
    for (;;) {
      const std::size_t n = socket.read_some(asio::buffer(chunk), ec);
      if (ec) return;
      reader.feed({chunk, n});
      while (auto body = reader.next_body()) {
        const Message m = decode_body(*body);
        if (std::holds_alternative<Welcome>(m)) welcomed = true;
        if (std::holds_alternative<TelemetryFrame>(m)) ++frames;
      }
    }
  });
  // the welcome guarantees the subscription exists before the clock starts
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(2);
  while (!welcomed && std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  server.start_simulation();
  server.wait_for_simulation();
  server.stop();
  consumer.join();
  return frames;
}

Outcome protocol() {
  const bool zero = decode_frame(slurp(source("tests/fixtures/zero_frame.bin"))) == TelemetryFrame{};
  const bool event =
      decode_frame(slurp(source("tests/fixtures/event_frame.bin"))) == expected_event_frame();

  std::mt19937_64 rng(99);
  auto value = [&] {
    if (rng() % 10 == 0) {
      for (;;) {
        const double d = std::bit_cast<double>(rng());
        if (std::isfinite(d)) return d;
      }
    }
    return std::uniform_real_distribution<double>(-10.0, 10.0)(rng);
  };
  int lossless = 0;
  for (int i = 0; i < 10000; ++i) {
    TelemetryFrame f;
    f.seq = rng();
    f.t = value();
    f.drone = {value(), value(), value(), value(), value(), value()};
    f.joints = {value(), value(), value(), value()};
    f.grip = value();
    f.grip_pose = {value(), value(), value()};
    f.torques = {value(), value(), value()};
    f.forces = {value(), value()};
    for (std::uint64_t k = rng() % 4; k > 0; --k) {
      f.events.push_back({value(), static_cast<EventKind>(rng() % 5), value()});
    }
    if (decode_frame(encode_frame(f)) == f) ++lossless;
  }
  const std::size_t served = serve_one_second();
  return {zero && event && lossless == 10000 && served == 100,
          fmt("golden fixtures %s, %d/10000 lossless round trips, 1 s serve delivered %zu frames",
              zero && event ? "decode" : "MISMATCH", lossless, served)};
}

Outcome stats_oracle() {
  constexpr int kPerPeriod = 1000;
  std::vector<TelemetryFrame> sine;
  for (int k = 0; k < 4 * kPerPeriod; ++k) {
    TelemetryFrame f;
    f.t = 0.01 * (k + 1);
    f.drone.pitch = deg_to_rad(5.0 * std::sin(2.0 * kPi * k / kPerPeriod));
    sine.push_back(f);
  }
  const DeviationStats s = compute_stats(sine, AttitudeSignal::Pitch, {0.0, 1e9});
  const bool closed = std::abs(s.std_dev - 3.536) <= 0.001 && std::abs(s.max_abs - 5.0) <= 1e-9;

  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int run = 0; run < 100; ++run) {
    std::normal_distribution<double> noise(std::uniform_real_distribution<double>(-3, 3)(rng),
                                           std::uniform_real_distribution<double>(0.1, 8)(rng));
    std::vector<TelemetryFrame> frames(100 + rng() % 2000);
    std::vector<double> deg;
    for (std::size_t k = 0; k < frames.size(); ++k) {
      frames[k].t = 0.01 * static_cast<double>(k + 1);
      frames[k].drone.roll = noise(rng);
      deg.push_back(frames[k].drone.roll * 180.0 / kPi);
    }
    double mean = 0.0;
    for (double d : deg) mean += d;
    mean /= static_cast<double>(deg.size());
    double ss = 0.0;
    for (double d : deg) ss += (d - mean) * (d - mean);
    const double naive = std::sqrt(ss / static_cast<double>(deg.size()));
    const DeviationStats w = compute_stats(frames, AttitudeSignal::Roll, {0.0, 1e9});
    worst = std::max(worst, std::abs(w.std_dev - naive) / naive);
  }
  return {closed && worst <= 1e-12,
          fmt("sine std %.6f max %.12f, worst relative error vs naive %.1e", s.std_dev,
              s.max_abs, worst)};
}

Outcome replay_determinism(const fs::path& dir) {
  const Config c = shipped_config();
  const auto a = cli::cmd_replay(c, source("scripts/gui_trajectory.json"), dir / "det_a.json");
  const auto b = cli::cmd_replay(c, source("scripts/gui_trajectory.json"), dir / "det_b.json");
  const std::string ba = slurp(a.record_path);
  const std::string bb = slurp(b.record_path);
  return {!ba.empty() && ba == bb,
          fmt("two replays wrote %zu and %zu bytes, %s", ba.size(), bb.size(),
              ba == bb ? "identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  const fs::path dir = work_dir();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"fk-ik-round-trip", round_trip},
      {"ground-parallel-constraint", ground_parallel},
      {"geometry-anchor", geometry_anchor},
      {"torque-anchor", torque_anchor},
      {"settle-anchor", [&] { return settle_anchor(dir); }},
      {"deviation-envelope", [&] { return deviation_envelope(dir); }},
      {"protocol", protocol},
      {"stats-oracle", stats_oracle},
      {"replay-determinism", [&] { return replay_determinism(dir); }},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  return failed == 0 ? 0 : 1;
}
