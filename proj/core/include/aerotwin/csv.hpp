#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "aerotwin/protocol.hpp"

namespace aerotwin {

/// One exported row. Attitude is in degrees; `event` lists the contact-state
/// event kinds of the frame separated by ';' (haptic updates are omitted).
struct CsvRow {
  double t = 0.0;
  double x_grip = 0.0;
  double z_grip = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double roll_deg = 0.0;
  double pitch_deg = 0.0;
  double force_l = 0.0;
  double force_r = 0.0;
  std::string event;
};

inline constexpr const char* kCsvHeader =
    "t,x_grip,z_grip,t1,t2,t3,roll_deg,pitch_deg,force_l,force_r,event";

CsvRow to_csv_row(const TelemetryFrame& frame);

/// Header plus one row per frame; numbers carry 9 significant digits.
std::string format_csv(std::span<const TelemetryFrame> frames);
void export_csv(std::span<const TelemetryFrame> frames, const std::filesystem::path& path);
std::vector<CsvRow> import_csv(const std::filesystem::path& path);
std::vector<CsvRow> parse_csv(const std::string& text);

}  // namespace aerotwin
