#include "aerotwin/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "aerotwin/error.hpp"

namespace aerotwin {

std::string_view to_string(AttitudeSignal signal) {
  return signal == AttitudeSignal::Roll ? "roll" : "pitch";
}

double rad_to_deg(double radians) { return radians * (180.0 / std::numbers::pi); }
double deg_to_rad(double degrees) { return degrees * (std::numbers::pi / 180.0); }

DeviationStats compute_stats(std::span<const TelemetryFrame> frames, AttitudeSignal signal,
                             TimeWindow window, double setpoint) {
  // Welford's running mean/variance on the deviation in degrees.
  DeviationStats stats;
  double mean = 0.0;
  double m2 = 0.0;
  for (const TelemetryFrame& f : frames) {
    if (f.t < window.from || f.t > window.to) continue;
    const double value = signal == AttitudeSignal::Roll ? f.drone.roll : f.drone.pitch;
    const double dev = rad_to_deg(value - setpoint);
    ++stats.samples;
    const double delta = dev - mean;
    mean += delta / static_cast<double>(stats.samples);
    m2 += delta * (dev - mean);
    stats.max_abs = std::max(stats.max_abs, std::abs(dev));
  }
  if (stats.samples == 0) {
    throw Error(ErrorCode::EmptyWindow, "no frames in window [" + std::to_string(window.from) +
                                            ", " + std::to_string(window.to) + "] s");
  }
  stats.mean = mean;
  stats.std_dev = std::sqrt(std::max(0.0, m2 / static_cast<double>(stats.samples)));
  return stats;
}

DeviationStats compute_stats(const SessionRecord& record, AttitudeSignal signal,
                             TimeWindow window) {
  return compute_stats(record.frames, signal, window, 0.0);
}

TimeWindow full_window(const SessionRecord& record) {
  if (record.frames.empty()) return {0.0, 0.0};
  return {record.frames.front().t, record.frames.back().t};
}

}  // namespace aerotwin
