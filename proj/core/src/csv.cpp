#include "aerotwin/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "aerotwin/config.hpp"
#include "aerotwin/error.hpp"
#include "aerotwin/stats.hpp"

namespace aerotwin {

CsvRow to_csv_row(const TelemetryFrame& f) {
  CsvRow row{f.t,
             f.grip_pose.x,
             f.grip_pose.z,
             f.torques.t1,
             f.torques.t2,
             f.torques.t3,
             rad_to_deg(f.drone.roll),
             rad_to_deg(f.drone.pitch),
             f.forces.left,
             f.forces.right,
             {}};
  for (const FrameEvent& e : f.events) {
    if (e.kind == EventKind::Haptic) continue;
    if (!row.event.empty()) row.event += ';';
    row.event += to_string(e.kind);
  }
  return row;
}

std::string format_csv(std::span<const TelemetryFrame> frames) {
  std::string out = kCsvHeader;
  out += '\n';
  char buf[64];
  for (const TelemetryFrame& f : frames) {
    const CsvRow row = to_csv_row(f);
    for (double v : {row.t, row.x_grip, row.z_grip, row.t1, row.t2, row.t3, row.roll_deg,
                     row.pitch_deg, row.force_l, row.force_r}) {
      std::snprintf(buf, sizeof buf, "%.9g,", v);
      out += buf;
    }
    out += row.event;
    out += '\n';
  }
  return out;
}

void export_csv(std::span<const TelemetryFrame> frames, const std::filesystem::path& path) {
  if (frames.empty()) throw Error(ErrorCode::Validation, "export_csv: record has no frames");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << format_csv(frames);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::vector<CsvRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw Error(ErrorCode::CorruptRecord, "CSV header does not match the export schema");
  }
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (std::size_t i = 0; i < 10; ++i) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) throw Error(ErrorCode::CorruptRecord, "short CSV row");
      cells.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    cells.push_back(line.substr(start));
    try {
      rows.push_back({std::stod(cells[0]), std::stod(cells[1]), std::stod(cells[2]),
                      std::stod(cells[3]), std::stod(cells[4]), std::stod(cells[5]),
                      std::stod(cells[6]), std::stod(cells[7]), std::stod(cells[8]),
                      std::stod(cells[9]), cells[10]});
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::CorruptRecord, "non-numeric CSV cell");
    }
  }
  return rows;
}

std::vector<CsvRow> import_csv(const std::filesystem::path& path) {
  return parse_csv(read_text_file(path));
}

}  // namespace aerotwin
