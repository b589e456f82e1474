#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "aerotwin/csv.hpp"
#include "aerotwin/error.hpp"
#include "aerotwin/server.hpp"
#include "aerotwin/simulation.hpp"

namespace aerotwin::cli {

using nlohmann::json;

namespace {

constexpr const char* kScriptFormat = "aerotwin-script";
constexpr int kScriptVersion = 1;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw Error(ErrorCode::Validation, where + ": unknown key '" + key + "'");
  }
}

double number_at(const json& obj, const char* key, const std::string& where,
                 std::optional<double> fallback = std::nullopt) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    if (fallback) return *fallback;
    throw Error(ErrorCode::Validation, where + ": missing '" + key + "'");
  }
  if (!it->is_number()) throw Error(ErrorCode::Validation, where + ": '" + key + "' must be a number");
  return it->get<double>();
}

std::string num(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

std::filesystem::path sibling(const std::filesystem::path& path, const std::string& suffix) {
  std::filesystem::path out = path;
  out.replace_extension();
  out += suffix;
  return out;
}

struct Published {
  std::optional<double> max_abs;
  std::optional<double> std_dev;
};

Published published(Reference ref, AttitudeSignal signal) {
  const bool roll = signal == AttitudeSignal::Roll;
  switch (ref) {
    case Reference::Gui: return roll ? Published{5.22, 0.99} : Published{9.38, 3.51};
    case Reference::Vr: return roll ? Published{std::nullopt, 0.83} : Published{7.15, 2.03};
    case Reference::None: break;
  }
  return {};
}

std::string opt_cell(const std::optional<double>& v) {
  return v ? num("%8.2f", *v) : std::string("       -");
}

/// Waypoint whose commands were active at each recorded tick.
std::vector<std::size_t> active_waypoints(const SessionRecord& record) {
  std::vector<std::size_t> out(record.frames.size(), 0);
  std::size_t current = 0;
  std::size_t next = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    while (next < record.commands.size() && record.commands[next].tick <= i) {
      for (const OperatorCommand& c : record.commands[next].commands) {
        if (const auto* s = std::get_if<ScriptPayload>(&c.payload); s && !s->end_of_script) {
          current = s->waypoint;
        }
      }
      ++next;
    }
    out[i] = current;
  }
  return out;
}

void write_stats_table(std::ostream& os, const SessionRecord& record, TimeWindow window,
                       Reference ref) {
  os << "signal   max_abs_deg  std_deg   mean_deg  samples";
  if (ref != Reference::None) os << "  ref_max  ref_std";
  os << "\n";
  for (AttitudeSignal signal : {AttitudeSignal::Roll, AttitudeSignal::Pitch}) {
    const DeviationStats s = compute_stats(record, signal, window);
    char line[160];
    std::snprintf(line, sizeof line, "%-8s %11.4f %8.4f %10.4f %8zu",
                  std::string(to_string(signal)).c_str(), s.max_abs, s.std_dev, s.mean,
                  s.samples);
    os << line;
    if (ref != Reference::None) {
      const Published p = published(ref, signal);
      os << " " << opt_cell(p.max_abs) << " " << opt_cell(p.std_dev);
    }
    os << "\n";
  }
  if (ref != Reference::None) {
    os << "(ref columns: published flight-test values, "
       << (ref == Reference::Gui ? "GUI trajectory test" : "VR grasping test")
       << "; shown for comparison, not reproduced)\n";
  }
}

void write_torques(std::ostream& os, const SessionRecord& record, TimeWindow window) {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  for (const TelemetryFrame& f : record.frames) {
    if (f.t < window.from || f.t > window.to) continue;
    m1 = std::max(m1, std::abs(f.torques.t1));
    m2 = std::max(m2, std::abs(f.torques.t2));
    m3 = std::max(m3, std::abs(f.torques.t3));
  }
  os << "max |torque| N*m: t1 " << num("%.4f", m1) << "  t2 " << num("%.4f", m2) << "  t3 "
     << num("%.4f", m3) << "\n";
}

void write_timeline(std::ostream& os, const SessionRecord& record, TimeWindow window,
                    bool with_waypoints) {
  const std::vector<std::size_t> waypoints =
      with_waypoints ? active_waypoints(record) : std::vector<std::size_t>{};
  os << "events:\n";
  std::size_t shown = 0;
  for (const IndexedEvent& e : record.events) {
    if (e.event.t < window.from || e.event.t > window.to) continue;
    os << "  t=" << num("%.2f", e.event.t) << "  " << to_string(e.event.kind)
       << "  force=" << num("%.4f", e.event.value);
    if (with_waypoints && waypoints[e.frame] > 0) os << "  waypoint " << waypoints[e.frame];
    os << "\n";
    ++shown;
  }
  if (shown == 0) os << "  (none)\n";
}

std::string replay_report(const SessionRecord& record, const ScriptFile& script) {
  std::ostringstream os;
  const TimeWindow window = full_window(record);
  os << "aerotwin replay report\n";
  os << "frames " << record.frames.size() << ", duration " << num("%.2f", record.duration())
     << " s, rate " << num("%g", record.config.telemetry.rate) << " Hz, seed "
     << record.config.seed << "\n";
  if (record.config.scene.object) {
    os << "object mass " << num("%.3f", record.config.scene.object->mass) << " kg\n";
  }
  os << "\nattitude deviation (deg, population std):\n";
  write_stats_table(os, record, window, Reference::None);
  os << "\n";
  write_torques(os, record, window);
  os << "\nscript actions:\n";
  bool any_action = false;
  for (const TickCommands& tc : record.commands) {
    for (const OperatorCommand& c : tc.commands) {
      const auto* s = std::get_if<ScriptPayload>(&c.payload);
      if (!s || !s->transition || s->action == ScriptAction::None) continue;
      os << "  t=" << num("%.2f", c.timestamp) << "  " << to_string(s->action) << " at waypoint "
         << s->waypoint << "\n";
      any_action = true;
    }
  }
  if (!any_action) os << "  (none)\n";
  os << "\n";
  write_timeline(os, record, window, true);
  os << "\nwaypoints: " << script.waypoints.size() << "\n";
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace

ScriptFile script_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::Validation, "script must be a JSON object");
  reject_unknown(doc, {"format", "version", "scene", "waypoints"}, "script");
  if (doc.contains("format") && doc.at("format") != kScriptFormat) {
    throw Error(ErrorCode::Validation, "script: format must be \"aerotwin-script\"");
  }
  if (doc.contains("version") && doc.at("version") != kScriptVersion) {
    throw Error(ErrorCode::Validation, "script: unsupported version");
  }
  ScriptFile script;
  if (doc.contains("scene") && !doc.at("scene").is_null()) {
    try {
      script.scene = scene_from_json(doc.at("scene"));
    } catch (const Error& e) {
      throw Error(ErrorCode::Validation, std::string("script scene: ") + e.what());
    }
  }
  const auto it = doc.find("waypoints");
  if (it == doc.end() || !it->is_array()) {
    throw Error(ErrorCode::Validation, "script: 'waypoints' must be an array");
  }
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& w = (*it)[i];
    const std::string where = "waypoint " + std::to_string(i + 1);
    if (!w.is_object()) throw Error(ErrorCode::Validation, where + ": must be an object");
    reject_unknown(w, {"x", "z", "phi", "dwell", "action"}, where);
    ScriptWaypoint wp;
    wp.target.x = number_at(w, "x", where);
    wp.target.z = number_at(w, "z", where);
    wp.target.phi = number_at(w, "phi", where, 0.0);
    wp.dwell = number_at(w, "dwell", where, 0.0);
    if (w.contains("action")) {
      if (!w.at("action").is_string()) {
        throw Error(ErrorCode::Validation, where + ": 'action' must be a string");
      }
      try {
        wp.action = script_action_from_string(w.at("action").get<std::string>());
      } catch (const Error& e) {
        throw Error(ErrorCode::Validation, where + ": " + e.what());
      }
    }
    script.waypoints.push_back(wp);
  }
  if (script.waypoints.empty()) throw Error(ErrorCode::Validation, "script has no waypoints");
  return script;
}

json script_to_json(const ScriptFile& script) {
  json waypoints = json::array();
  for (const ScriptWaypoint& wp : script.waypoints) {
    waypoints.push_back({{"x", wp.target.x},
                         {"z", wp.target.z},
                         {"phi", wp.target.phi},
                         {"dwell", wp.dwell},
                         {"action", std::string(to_string(wp.action))}});
  }
  json doc = {{"format", kScriptFormat}, {"version", kScriptVersion}, {"waypoints", waypoints}};
  if (script.scene) doc["scene"] = scene_to_json(*script.scene);
  return doc;
}

ScriptFile load_script(const std::filesystem::path& path) {
  return script_from_json(parse_document(read_text_file(path), path.string(), ErrorCode::Validation));
}

SessionRecord run_script(const Config& config, const ScriptFile& script) {
  Config cfg = config;
  if (script.scene) cfg.scene = *script.scene;
  cfg.validate();
  validate_script(script.waypoints, cfg.geometry, cfg.limits);

  Simulation sim(cfg);
  SessionRecorder recorder(cfg);
  ScriptPlayer player(script.waypoints, cfg.geometry, cfg.limits, cfg.telemetry.rate,
                      cfg.scene.initial_grip, sim.joint_targets().wrist_roll);
  while (auto cmd = player.next()) {
    const std::uint64_t tick = sim.tick();
    const OperatorCommand applied[] = {*cmd};
    const TelemetryFrame frame = sim.step(applied);
    recorder.record(tick, applied, frame);
  }
  return recorder.record();
}

ReplayOutput cmd_replay(const Config& config, const std::filesystem::path& script_path,
                        const std::filesystem::path& out_record) {
  const ScriptFile script = load_script(script_path);
  ReplayOutput out;
  out.record = run_script(config, script);
  out.report = replay_report(out.record, script);
  out.record_path = out_record;
  out.csv_path = sibling(out_record, ".csv");
  out.report_path = sibling(out_record, ".report.txt");
  save_record(out.record, out.record_path);
  export_csv(out.record.frames, out.csv_path);
  write_text(out.report_path, out.report);
  return out;
}

Reference reference_from_string(const std::string& name) {
  if (name.empty() || name == "none") return Reference::None;
  if (name == "gui") return Reference::Gui;
  if (name == "vr") return Reference::Vr;
  throw Error(ErrorCode::Validation, "unknown reference '" + name + "' (expected gui, vr or none)");
}

std::string analyze_report(const SessionRecord& record, const AnalyzeOptions& options) {
  if (record.frames.empty()) throw Error(ErrorCode::EmptyWindow, "record has no frames");
  TimeWindow window = full_window(record);
  if (options.from) window.from = *options.from;
  if (options.to) window.to = *options.to;
  if (window.to < window.from) {
    throw Error(ErrorCode::Validation, "window end precedes its start");
  }
  std::ostringstream os;
  os << "window " << num("%.3f", window.from) << " .. " << num("%.3f", window.to) << " s\n";
  write_stats_table(os, record, window, options.reference);
  write_torques(os, record, window);
  write_timeline(os, record, window, false);
  return os.str();
}

std::string cmd_analyze(const std::filesystem::path& record_path, const AnalyzeOptions& options) {
  return analyze_report(load_record(record_path), options);
}

std::string cmd_validate(const std::filesystem::path& config_path,
                         const std::optional<std::filesystem::path>& script_path) {
  Config config = load_config(config_path);
  std::string summary = "config ok: " + config_path.string();
  if (script_path) {
    const ScriptFile script = load_script(*script_path);
    if (script.scene) {
      config.scene = *script.scene;
      config.validate();
    }
    validate_script(script.waypoints, config.geometry, config.limits);
    summary += ", script ok: " + script_path->string() + " (" +
               std::to_string(script.waypoints.size()) + " waypoints)";
  }
  return summary;
}

void cmd_serve(const Config& config, const ServeOptions& options, const std::atomic<bool>& stop) {
  ServerOptions server_options;
  server_options.port = options.port;
  server_options.record = options.record_path.has_value();
  if (options.duration) {
    server_options.max_ticks =
        static_cast<std::uint64_t>(std::llround(*options.duration * config.telemetry.rate));
  }
  TelemetryServer server(config, server_options);
  spdlog::info("serving on port {} at {} Hz", server.port(), config.telemetry.rate);
  while (!stop && !server.loop().finished()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  spdlog::info("shutting down after {} ticks", server.loop().tick());
  server.stop();
  if (options.record_path) {
    save_record(server.record(), *options.record_path);
    spdlog::info("record written to {}", options.record_path->string());
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const std::atomic<bool>* stop) {
  CLI::App app{"aerotwin: aerial manipulator digital twin"};
  app.require_subcommand(1);

  std::string config_path;
  std::string script_path;
  std::string out_path;
  std::string record_path;
  std::string reference = "none";
  std::optional<double> from;
  std::optional<double> to;
  std::optional<double> duration;
  if (const char* env = std::getenv("AEROTWIN_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
  int port = 7450;
  if (const char* env = std::getenv("AEROTWIN_PORT")) {
    try {
      port = std::stoi(env);
    } catch (const std::exception&) {
      err << "error INVALID_CONFIG: AEROTWIN_PORT is not a number\n";
      return 1;
    }
  }

  CLI::App* serve = app.add_subcommand("serve", "run the simulation and telemetry server");
  serve->add_option("--config", config_path, "config file")->required();
  serve->add_option("--port", port, "listening port (env AEROTWIN_PORT)");
  serve->add_option("--duration", duration, "stop after this many simulated seconds");
  serve->add_option("--record", record_path, "write a session record on shutdown");

  CLI::App* replay = app.add_subcommand("replay", "run a waypoint script headlessly");
  replay->add_option("--config", config_path, "config file")->required();
  replay->add_option("--script", script_path, "script file")->required();
  replay->add_option("--out", out_path, "session record to write")->required();

  CLI::App* analyze = app.add_subcommand("analyze", "attitude statistics of a record");
  analyze->add_option("--record", record_path, "session record")->required();
  analyze->add_option("--from", from, "window start, s");
  analyze->add_option("--to", to, "window end, s");
  analyze->add_option("--reference", reference, "published values to show: gui, vr or none");

  CLI::App* validate = app.add_subcommand("validate", "check a config and optionally a script");
  validate->add_option("--config", config_path, "config file")->required();
  validate->add_option("--script", script_path, "script file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error USAGE: " << e.what() << "\n";
    return 2;
  }

  try {
    if (serve->parsed()) {
      ServeOptions options;
      options.port = port;
      options.duration = duration;
      if (!record_path.empty()) options.record_path = record_path;
      std::atomic<bool> never{false};
      cmd_serve(load_config(config_path), options, stop ? *stop : never);
    } else if (replay->parsed()) {
      const ReplayOutput result = cmd_replay(load_config(config_path), script_path, out_path);
      out << result.report;
      out << "\nwrote " << result.record_path.string() << ", " << result.csv_path.string()
          << ", " << result.report_path.string() << "\n";
    } else if (analyze->parsed()) {
      out << cmd_analyze(record_path, {from, to, reference_from_string(reference)});
    } else if (validate->parsed()) {
      std::optional<std::filesystem::path> script;
      if (!script_path.empty()) script = script_path;
      out << cmd_validate(config_path, script) << "\n";
    }
  } catch (const Error& e) {
    err << "error " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error INTERNAL: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace aerotwin::cli
