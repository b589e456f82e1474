#include "aerotwin/record.hpp"

#include <fstream>

#include "aerotwin/error.hpp"
#include "aerotwin/simulation.hpp"

namespace aerotwin {

using nlohmann::json;

namespace {

constexpr const char* kRecordFormat = "aerotwin-record";
constexpr int kRecordVersion = 1;

json joints_json(const JointAngles& q) {
  return {{"theta", q.theta}, {"beta", q.beta}, {"alpha", q.alpha}, {"wrist_roll", q.wrist_roll}};
}

JointAngles joints_from(const json& j) {
  return {j.at("theta").get<double>(), j.at("beta").get<double>(), j.at("alpha").get<double>(),
          j.at("wrist_roll").get<double>()};
}

CommandMode mode_from(const std::string& name) {
  for (CommandMode m : {CommandMode::Teleop, CommandMode::Jog, CommandMode::Script}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::CorruptRecord, "unknown command mode '" + name + "'");
}

}  // namespace

SessionRecorder::SessionRecorder(Config config) { record_.config = std::move(config); }

void SessionRecorder::record(std::uint64_t tick, std::span<const OperatorCommand> commands,
                             const TelemetryFrame& frame) {
  if (!commands.empty()) {
    record_.commands.push_back({tick, {commands.begin(), commands.end()}});
  }
  const std::size_t index = record_.frames.size();
  for (const FrameEvent& e : frame.events) {
    if (e.kind != EventKind::Haptic) record_.events.push_back({index, e});
  }
  record_.frames.push_back(frame);
}

json command_to_json(const OperatorCommand& c) {
  json payload = std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, HoldPayload>) {
          return {{"kind", "hold"}};
        } else if constexpr (std::is_same_v<P, TeleopPayload>) {
          return {{"kind", "teleop"}, {"joints", joints_json(p.joint_targets)}};
        } else if constexpr (std::is_same_v<P, JogPayload>) {
          return {{"kind", "jog"},
                  {"dx", p.step.dx},
                  {"dz", p.step.dz},
                  {"joints", joints_json(p.joint_targets)}};
        } else {
          return {{"kind", "script"},
                  {"joints", joints_json(p.joint_targets)},
                  {"action", std::string(to_string(p.action))},
                  {"waypoint", p.waypoint},
                  {"transition", p.transition},
                  {"end_of_script", p.end_of_script}};
        }
      },
      c.payload);
  return {{"mode", std::string(to_string(c.mode))},
          {"t", c.timestamp},
          {"grip", c.grip_fraction},
          {"payload", std::move(payload)}};
}

OperatorCommand command_from_json(const json& j) {
  OperatorCommand c;
  c.mode = mode_from(j.at("mode").get<std::string>());
  c.timestamp = j.at("t").get<double>();
  c.grip_fraction = j.at("grip").get<double>();
  const json& p = j.at("payload");
  const std::string kind = p.at("kind").get<std::string>();
  if (kind == "hold") {
    c.payload = HoldPayload{};
  } else if (kind == "teleop") {
    c.payload = TeleopPayload{joints_from(p.at("joints"))};
  } else if (kind == "jog") {
    c.payload = JogPayload{{p.at("dx").get<double>(), p.at("dz").get<double>()},
                           joints_from(p.at("joints"))};
  } else if (kind == "script") {
    ScriptPayload s;
    s.joint_targets = joints_from(p.at("joints"));
    s.action = script_action_from_string(p.at("action").get<std::string>());
    s.waypoint = p.at("waypoint").get<std::size_t>();
    s.transition = p.at("transition").get<bool>();
    s.end_of_script = p.at("end_of_script").get<bool>();
    c.payload = s;
  } else {
    throw Error(ErrorCode::CorruptRecord, "unknown command payload '" + kind + "'");
  }
  return c;
}

json record_to_json(const SessionRecord& r) {
  json commands = json::array();
  for (const TickCommands& tc : r.commands) {
    json list = json::array();
    for (const OperatorCommand& c : tc.commands) list.push_back(command_to_json(c));
    commands.push_back({{"tick", tc.tick}, {"commands", std::move(list)}});
  }
  json frames = json::array();
  for (const TelemetryFrame& f : r.frames) {
    json fj = frame_to_json(f);
    fj.erase("type");
    fj.erase("protocol_version");
    frames.push_back(std::move(fj));
  }
  json events = json::array();
  for (const IndexedEvent& e : r.events) {
    events.push_back({{"frame", e.frame},
                      {"t", e.event.t},
                      {"kind", std::string(to_string(e.event.kind))},
                      {"value", e.event.value}});
  }
  return {{"format", kRecordFormat},
          {"version", kRecordVersion},
          {"protocol_version", kProtocolVersion},
          {"config", config_to_json(r.config)},
          {"commands", std::move(commands)},
          {"frames", std::move(frames)},
          {"events", std::move(events)}};
}

SessionRecord record_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kRecordFormat ||
        j.at("version").get<int>() != kRecordVersion) {
      throw Error(ErrorCode::CorruptRecord, "not an aerotwin record (format/version mismatch)");
    }
    SessionRecord r;
    try {
      r.config = config_from_json(j.at("config"));
    } catch (const Error& e) {
      throw Error(ErrorCode::CorruptRecord, std::string("embedded config: ") + e.what());
    }
    for (const json& tc : j.at("commands")) {
      TickCommands entry;
      entry.tick = tc.at("tick").get<std::uint64_t>();
      for (const json& c : tc.at("commands")) entry.commands.push_back(command_from_json(c));
      r.commands.push_back(std::move(entry));
    }
    for (const json& f : j.at("frames")) r.frames.push_back(frame_from_json(f));
    for (const json& e : j.at("events")) {
      const auto kind = event_kind_from_string(e.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::CorruptRecord, "unknown event kind in index");
      const std::size_t frame = e.at("frame").get<std::size_t>();
      if (frame >= r.frames.size()) {
        throw Error(ErrorCode::CorruptRecord, "event index points past the last frame");
      }
      r.events.push_back({frame, {e.at("t").get<double>(), *kind, e.at("value").get<double>()}});
    }
    for (std::size_t i = 1; i < r.frames.size(); ++i) {
      if (!(r.frames[i].t > r.frames[i - 1].t)) {
        throw Error(ErrorCode::CorruptRecord, "frame timestamps are not strictly increasing");
      }
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptRecord, std::string("malformed record: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptRecord) throw;
    throw Error(ErrorCode::CorruptRecord, e.what());
  }
}

std::string serialize_record(const SessionRecord& record) {
  return record_to_json(record).dump() + "\n";
}

void save_record(const SessionRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << serialize_record(record);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

SessionRecord load_record(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::CorruptRecord, e.what());
  }
  const json doc = parse_document(text, path.string(), ErrorCode::CorruptRecord);
  return record_from_json(doc);
}

std::vector<TelemetryFrame> replay_commands(const Config& config,
                                            std::span<const TickCommands> commands,
                                            std::uint64_t ticks) {
  Simulation sim(config);
  std::vector<TelemetryFrame> frames;
  frames.reserve(ticks);
  std::size_t next = 0;
  for (std::uint64_t tick = 0; tick < ticks; ++tick) {
    std::span<const OperatorCommand> applied;
    if (next < commands.size() && commands[next].tick == tick) {
      applied = commands[next].commands;
      ++next;
    }
    frames.push_back(sim.step(applied));
  }
  return frames;
}

}  // namespace aerotwin
