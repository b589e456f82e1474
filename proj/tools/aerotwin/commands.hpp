/**
 * @file commands.hpp
 * @brief The aerotwin subcommands as callable functions.
 *
 * main() only parses flags and maps errors to exit codes; everything else
 * lives here so tests can drive the same code paths.
 */
#pragma once

#include <atomic>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aerotwin/config.hpp"
#include "aerotwin/operator.hpp"
#include "aerotwin/record.hpp"
#include "aerotwin/stats.hpp"

namespace aerotwin::cli {

/// A script file: waypoints plus an optional scene that replaces the
/// config's scene for the run.
struct ScriptFile {
  std::vector<ScriptWaypoint> waypoints;
  std::optional<Scene> scene;
};

ScriptFile script_from_json(const nlohmann::json& doc);
nlohmann::json script_to_json(const ScriptFile& script);
/// Throws Error(Validation) for malformed files, naming the waypoint.
ScriptFile load_script(const std::filesystem::path& path);

struct ReplayOutput {
  SessionRecord record;
  std::string report;
  std::filesystem::path record_path;
  std::filesystem::path csv_path;
  std::filesystem::path report_path;
};

/// Runs the script headlessly and writes `<out>` (record), `<out stem>.csv`
/// and `<out stem>.report.txt`.
ReplayOutput cmd_replay(const Config& config, const std::filesystem::path& script_path,
                        const std::filesystem::path& out_record);

/// In-memory part of cmd_replay.
SessionRecord run_script(const Config& config, const ScriptFile& script);

enum class Reference { None, Gui, Vr };
Reference reference_from_string(const std::string& name);

struct AnalyzeOptions {
  std::optional<double> from;
  std::optional<double> to;
  Reference reference = Reference::None;
};

std::string analyze_report(const SessionRecord& record, const AnalyzeOptions& options);
std::string cmd_analyze(const std::filesystem::path& record_path, const AnalyzeOptions& options);

/// Returns a one-line summary; throws on the first problem found.
std::string cmd_validate(const std::filesystem::path& config_path,
                         const std::optional<std::filesystem::path>& script_path);

struct ServeOptions {
  int port = 7450;
  std::optional<double> duration;  ///< seconds of simulation, unbounded if empty
  std::optional<std::filesystem::path> record_path;
};

/// Runs the server until `stop` becomes true or the duration elapses.
void cmd_serve(const Config& config, const ServeOptions& options, const std::atomic<bool>& stop);

/// Full command line entry point; returns the process exit code. `stop`, if
/// given, ends a running serve.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const std::atomic<bool>* stop = nullptr);

}  // namespace aerotwin::cli
