#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "aerotwin/csv.hpp"
#include "aerotwin/error.hpp"
#include "aerotwin/stats.hpp"
#include "test_support.hpp"

using namespace aerotwin;
using aerotwin::test::scratch_dir;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<TelemetryFrame> pitch_series(const std::vector<double>& degrees, double dt = 0.01) {
  std::vector<TelemetryFrame> frames;
  for (std::size_t k = 0; k < degrees.size(); ++k) {
    TelemetryFrame f;
    f.seq = k + 1;
    f.t = static_cast<double>(k + 1) * dt;
    f.drone.pitch = degrees[k] * kPi / 180.0;
    f.drone.roll = -f.drone.pitch;
    frames.push_back(f);
  }
  return frames;
}

/// Plain two-pass mean and population variance.
struct Naive {
  double max_abs = 0.0, mean = 0.0, std_dev = 0.0;
};

Naive naive_stats(const std::vector<TelemetryFrame>& frames) {
  Naive n;
  std::vector<double> dev;
  for (const auto& f : frames) dev.push_back(f.drone.pitch * 180.0 / kPi);
  for (double d : dev) {
    n.mean += d;
    n.max_abs = std::max(n.max_abs, std::abs(d));
  }
  n.mean /= static_cast<double>(dev.size());
  double ss = 0.0;
  for (double d : dev) ss += (d - n.mean) * (d - n.mean);
  n.std_dev = std::sqrt(ss / static_cast<double>(dev.size()));
  return n;
}

TelemetryFrame busy_frame(std::uint64_t seq) {
  TelemetryFrame f;
  f.seq = seq;
  f.t = static_cast<double>(seq) / 100.0;
  f.grip_pose = {0.123456789012, -0.3 + 1e-3 * static_cast<double>(seq), 0.0};
  f.torques = {5.29917, 1.0 / 3.0, -2e-7};
  f.drone.roll = 0.0123;
  f.drone.pitch = -0.0456;
  f.forces = {0.31, 0.3};
  return f;
}

}  // namespace

TEST(Stats, SineOverWholePeriodsMatchesClosedForm) {
  for (int n : {400, 1000, 2000}) {
    std::vector<double> deg;
    for (int periods = 0; periods < 3; ++periods) {
      for (int k = 0; k < n; ++k) deg.push_back(5.0 * std::sin(2.0 * kPi * k / n));
    }
    const auto frames = pitch_series(deg);
    const DeviationStats s =
        compute_stats(frames, AttitudeSignal::Pitch, {0.0, frames.back().t});
    EXPECT_NEAR(s.std_dev, 5.0 / std::sqrt(2.0), 1e-9) << n;
    EXPECT_NEAR(s.std_dev, 3.536, 0.001);
    EXPECT_NEAR(s.max_abs, 5.0, 1e-9);
    EXPECT_NEAR(s.mean, 0.0, 1e-9);
    EXPECT_EQ(s.samples, deg.size());
  }
}

TEST(Stats, ConstantAtSetpointIsAllZero) {
  const auto frames = pitch_series(std::vector<double>(500, 0.0));
  const DeviationStats s = compute_stats(frames, AttitudeSignal::Roll, {0.0, 10.0});
  EXPECT_EQ(s.max_abs, 0.0);
  EXPECT_EQ(s.std_dev, 0.0);
  EXPECT_EQ(s.mean, 0.0);
}

TEST(Stats, SetpointIsSubtracted) {
  const auto frames = pitch_series(std::vector<double>(10, 2.0));
  const DeviationStats s =
      compute_stats(frames, AttitudeSignal::Pitch, {0.0, 1.0}, 2.0 * kPi / 180.0);
  EXPECT_NEAR(s.max_abs, 0.0, 1e-12);
  EXPECT_NEAR(s.std_dev, 0.0, 1e-12);
}

TEST(Stats, AgreesWithNaiveTwoPassOnRandomSignals) {
  std::mt19937_64 rng(31);
  for (int run = 0; run < 100; ++run) {
    const std::size_t n = 10 + rng() % 3000;
    const double offset = std::uniform_real_distribution<double>(-5.0, 5.0)(rng);
    const double scale = std::uniform_real_distribution<double>(0.01, 10.0)(rng);
    std::normal_distribution<double> noise(offset, scale);
    std::vector<double> deg(n);
    for (double& d : deg) d = noise(rng);
    const auto frames = pitch_series(deg);
    const DeviationStats s = compute_stats(frames, AttitudeSignal::Pitch, {0.0, 1e9});
    const Naive o = naive_stats(frames);
    EXPECT_NEAR(s.std_dev, o.std_dev, 1e-12 * o.std_dev) << run;
    EXPECT_NEAR(s.mean, o.mean, 1e-12 * std::max(1.0, std::abs(o.mean))) << run;
    EXPECT_NEAR(s.max_abs, o.max_abs, 1e-12 * o.max_abs);
    EXPECT_GE(s.max_abs, s.std_dev);
  }
}

TEST(Stats, WindowSelectsInclusiveRange) {
  const auto frames = pitch_series({1.0, 2.0, 3.0, 4.0, 5.0});
  const DeviationStats s = compute_stats(frames, AttitudeSignal::Pitch, {0.02, 0.04});
  EXPECT_EQ(s.samples, 3u);
  EXPECT_NEAR(s.max_abs, 4.0, 1e-12);
  EXPECT_NEAR(s.mean, 3.0, 1e-12);
}

TEST(Stats, EmptyWindowIsAnError) {
  const auto frames = pitch_series({1.0, 2.0});
  try {
    compute_stats(frames, AttitudeSignal::Pitch, {5.0, 6.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyWindow);
  }
  EXPECT_THROW(compute_stats(std::vector<TelemetryFrame>{}, AttitudeSignal::Roll, {0.0, 1.0}),
               Error);
}

TEST(Csv, ThreeFramesGiveHeaderPlusThreeRows) {
  const std::vector<TelemetryFrame> frames{busy_frame(1), busy_frame(2), busy_frame(3)};
  const std::string text = format_csv(frames);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "t,x_grip,z_grip,t1,t2,t3,roll_deg,pitch_deg,force_l,force_r,event");
}

TEST(Csv, ReimportMatchesToNineSignificantDigits) {
  std::vector<TelemetryFrame> frames;
  for (std::uint64_t s = 1; s <= 50; ++s) frames.push_back(busy_frame(s));
  const auto path = scratch_dir() / "out.csv";
  export_csv(frames, path);
  const std::vector<CsvRow> rows = import_csv(path);
  ASSERT_EQ(rows.size(), frames.size());
  auto near9 = [](double got, double want) {
    return std::abs(got - want) <= 5e-9 * std::abs(want) + 1e-300;
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const CsvRow want = to_csv_row(frames[i]);
    for (auto [got, exp] : {std::pair{rows[i].t, want.t}, {rows[i].x_grip, want.x_grip},
                            {rows[i].z_grip, want.z_grip}, {rows[i].t1, want.t1},
                            {rows[i].t2, want.t2}, {rows[i].t3, want.t3},
                            {rows[i].roll_deg, want.roll_deg}, {rows[i].pitch_deg, want.pitch_deg},
                            {rows[i].force_l, want.force_l}, {rows[i].force_r, want.force_r}}) {
      EXPECT_TRUE(near9(got, exp)) << got << " vs " << exp;
    }
    EXPECT_EQ(rows[i].event, "");
  }
}

TEST(Csv, AttitudeColumnsAreDegrees) {
  TelemetryFrame f;
  f.drone.roll = kPi / 2.0;
  f.drone.pitch = -kPi / 4.0;
  const CsvRow row = to_csv_row(f);
  EXPECT_NEAR(row.roll_deg, 90.0, 1e-12);
  EXPECT_NEAR(row.pitch_deg, -45.0, 1e-12);
}

TEST(Csv, EventColumnListsContactStatesButNotHaptics) {
  TelemetryFrame f = busy_frame(1);
  f.events = {{0.01, EventKind::Contact, 0.3},
              {0.01, EventKind::Haptic, 0.3},
              {0.01, EventKind::Grasp, 0.3}};
  EXPECT_EQ(to_csv_row(f).event, "contact;grasp");
  f.events = {{0.01, EventKind::Haptic, 0.0}};
  EXPECT_EQ(to_csv_row(f).event, "");
  const auto rows = parse_csv(format_csv(std::vector<TelemetryFrame>{busy_frame(1)}));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].event, "");
}

TEST(Csv, EmptyRecordAndBadInputRejected) {
  EXPECT_THROW(export_csv({}, scratch_dir() / "x.csv"), Error);
  EXPECT_THROW(parse_csv("a,b\n1,2\n"), Error);
  EXPECT_THROW(parse_csv(std::string(kCsvHeader) + "\n1,2,3\n"), Error);
  EXPECT_THROW(export_csv(std::vector<TelemetryFrame>{busy_frame(1)},
                          "/nonexistent_dir/aerotwin/x.csv"),
               Error);
}
