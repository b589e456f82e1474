#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "aerotwin/protocol.hpp"
#include "aerotwin/record.hpp"

namespace aerotwin {

enum class AttitudeSignal { Roll, Pitch };

std::string_view to_string(AttitudeSignal signal);

/// Deviation of an attitude signal from its setpoint, in degrees. The
/// standard deviation is the population one (divide by N).
struct DeviationStats {
  double max_abs = 0.0;
  double std_dev = 0.0;
  double mean = 0.0;
  std::size_t samples = 0;
};

struct TimeWindow {
  double from = 0.0;
  double to = 0.0;
};

/// Statistics over frames with t in [window.from, window.to]. Throws
/// Error(EmptyWindow) when no frame falls inside.
DeviationStats compute_stats(std::span<const TelemetryFrame> frames, AttitudeSignal signal,
                             TimeWindow window, double setpoint = 0.0);
DeviationStats compute_stats(const SessionRecord& record, AttitudeSignal signal,
                             TimeWindow window);

/// Whole-record window.
TimeWindow full_window(const SessionRecord& record);

double rad_to_deg(double radians);
double deg_to_rad(double degrees);

}  // namespace aerotwin
