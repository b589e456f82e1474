#include "aerotwin/protocol.hpp"

#include <array>
#include <cmath>

#include "aerotwin/error.hpp"

namespace aerotwin {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedMessage, what);
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) malformed(std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) malformed(std::string("field '") + key + "' is not a number");
  return v.get<double>();
}

std::string text(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) malformed(std::string("field '") + key + "' is not a string");
  return v.get<std::string>();
}

const json& object(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_object()) malformed(std::string("field '") + key + "' is not an object");
  return v;
}

json header(const char* type) { return {{"type", type}, {"protocol_version", kProtocolVersion}}; }

json geometry_json(const LinkGeometry& g) {
  return {{"l1", g.l1}, {"l2", g.l2}, {"l3", g.l3}, {"l_dis", g.l_dis}};
}

json limits_json(const JointLimits& l) {
  auto r = [](const JointRange& range) { return json::array({range.min, range.max}); };
  return {{"theta", r(l.theta)}, {"beta", r(l.beta)}, {"alpha", r(l.alpha)},
          {"wrist_roll", r(l.wrist_roll)}};
}

JointRange range_from(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    malformed(std::string("field '") + key + "' is not a [min, max] pair");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

SessionRole role_from(const std::string& name) {
  if (name == "control") return SessionRole::Control;
  if (name == "observer") return SessionRole::Observer;
  malformed("unknown role '" + name + "'");
}

WireMode mode_from(const std::string& name) {
  if (name == "teleop") return WireMode::Teleop;
  if (name == "jog") return WireMode::Jog;
  if (name == "hold") return WireMode::Hold;
  malformed("unknown command mode '" + name + "'");
}

std::uint64_t unsigned_number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    malformed(std::string("field '") + key + "' is not an unsigned integer");
  }
  return v.get<std::uint64_t>();
}

struct ToJson {
  json operator()(const TelemetryFrame& f) const { return frame_to_json(f); }

  json operator()(const GapMarker& g) const {
    json j = header("gap");
    j["first_seq"] = g.first_seq;
    j["dropped"] = g.dropped;
    return j;
  }

  json operator()(const WireCommand& c) const {
    json j = header("command");
    j["t"] = c.t;
    j["mode"] = std::string(to_string(c.mode));
    j["grip"] = c.grip;
    if (c.mode == WireMode::Teleop) {
      j["theta"] = c.joints.theta;
      j["beta"] = c.joints.beta;
      j["alpha"] = c.joints.alpha;
      j["wrist_roll"] = c.joints.wrist_roll;
    } else if (c.mode == WireMode::Jog) {
      j["dx"] = c.step.dx;
      j["dz"] = c.step.dz;
    }
    return j;
  }

  json operator()(const Hello& h) const {
    json j = header("hello");
    j["role"] = std::string(to_string(h.role));
    j["client"] = h.client;
    return j;
  }

  json operator()(const Welcome& w) const {
    json j = header("welcome");
    j["role"] = std::string(to_string(w.role));
    j["rate"] = w.rate;
    j["geometry"] = geometry_json(w.geometry);
    j["limits"] = limits_json(w.limits);
    j["jog_step"] = w.jog_step;
    return j;
  }

  json operator()(const Reject& r) const {
    json j = header("reject");
    j["reason"] = r.reason;
    return j;
  }
};

std::uint32_t read_length(std::string_view bytes) {
  return (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[0])) << 24) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[1])) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[2])) << 8) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[3]));
}

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Contact: return "contact";
    case EventKind::Grasp: return "grasp";
    case EventKind::Release: return "release";
    case EventKind::Drop: return "drop";
    case EventKind::Haptic: return "haptic";
  }
  return "unknown";
}

std::optional<EventKind> event_kind_from_string(std::string_view name) {
  for (EventKind k : {EventKind::Contact, EventKind::Grasp, EventKind::Release, EventKind::Drop,
                      EventKind::Haptic}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

EventKind to_event_kind(ContactKind kind) {
  switch (kind) {
    case ContactKind::Contact: return EventKind::Contact;
    case ContactKind::Grasp: return EventKind::Grasp;
    case ContactKind::Release: return EventKind::Release;
    case ContactKind::Drop: return EventKind::Drop;
  }
  return EventKind::Contact;
}

std::string_view to_string(WireMode mode) {
  switch (mode) {
    case WireMode::Teleop: return "teleop";
    case WireMode::Jog: return "jog";
    case WireMode::Hold: return "hold";
  }
  return "hold";
}

std::string_view to_string(SessionRole role) {
  return role == SessionRole::Control ? "control" : "observer";
}

json frame_to_json(const TelemetryFrame& f) {
  json j = header("frame");
  j["seq"] = f.seq;
  j["t"] = f.t;
  j["drone"] = {{"x", f.drone.x},       {"y", f.drone.y},         {"z", f.drone.z},
                {"roll", f.drone.roll}, {"pitch", f.drone.pitch}, {"yaw", f.drone.yaw}};
  j["joints"] = {{"theta", f.joints.theta},
                 {"beta", f.joints.beta},
                 {"alpha", f.joints.alpha},
                 {"wrist_roll", f.joints.wrist_roll},
                 {"grip", f.grip}};
  j["grip_pose"] = {{"x", f.grip_pose.x}, {"z", f.grip_pose.z}, {"phi", f.grip_pose.phi}};
  j["torques"] = {{"t1", f.torques.t1}, {"t2", f.torques.t2}, {"t3", f.torques.t3}};
  j["forces"] = {{"left", f.forces.left}, {"right", f.forces.right}};
  json events = json::array();
  for (const FrameEvent& e : f.events) {
    events.push_back({{"t", e.t}, {"kind", std::string(to_string(e.kind))}, {"value", e.value}});
  }
  j["events"] = std::move(events);
  return j;
}

TelemetryFrame frame_from_json(const json& j) {
  TelemetryFrame f;
  f.seq = unsigned_number(j, "seq");
  f.t = number(j, "t");
  const json& d = object(j, "drone");
  f.drone = {number(d, "x"),    number(d, "y"),     number(d, "z"),
             number(d, "roll"), number(d, "pitch"), number(d, "yaw")};
  const json& q = object(j, "joints");
  f.joints = {number(q, "theta"), number(q, "beta"), number(q, "alpha"), number(q, "wrist_roll")};
  f.grip = number(q, "grip");
  const json& p = object(j, "grip_pose");
  f.grip_pose = {number(p, "x"), number(p, "z"), number(p, "phi")};
  const json& t = object(j, "torques");
  f.torques = {number(t, "t1"), number(t, "t2"), number(t, "t3")};
  const json& fo = object(j, "forces");
  f.forces = {number(fo, "left"), number(fo, "right")};
  const json& events = field(j, "events");
  if (!events.is_array()) malformed("field 'events' is not an array");
  for (const json& e : events) {
    if (!e.is_object()) malformed("event entry is not an object");
    const auto kind = event_kind_from_string(text(e, "kind"));
    if (!kind) malformed("unknown event kind");
    f.events.push_back({number(e, "t"), *kind, number(e, "value")});
  }
  return f;
}

json message_to_json(const Message& message) { return std::visit(ToJson{}, message); }

Message message_from_json(const json& j) {
  if (!j.is_object()) malformed("message body is not a JSON object");
  const json& version = field(j, "protocol_version");
  if (!version.is_number_integer() || version.get<int>() != kProtocolVersion) {
    malformed("unsupported protocol_version (expected " + std::to_string(kProtocolVersion) + ")");
  }
  const std::string type = text(j, "type");
  if (type == "frame") return frame_from_json(j);
  if (type == "gap") return GapMarker{unsigned_number(j, "first_seq"), unsigned_number(j, "dropped")};
  if (type == "command") {
    WireCommand c;
    c.t = number(j, "t");
    c.mode = mode_from(text(j, "mode"));
    c.grip = number(j, "grip");
    if (c.mode == WireMode::Teleop) {
      c.joints = {number(j, "theta"), number(j, "beta"), number(j, "alpha"),
                  number(j, "wrist_roll")};
    } else if (c.mode == WireMode::Jog) {
      c.step = {number(j, "dx"), number(j, "dz")};
    }
    return c;
  }
  if (type == "hello") {
    Hello h;
    h.role = role_from(text(j, "role"));
    if (j.contains("client") && j["client"].is_string()) h.client = j["client"].get<std::string>();
    return h;
  }
  if (type == "welcome") {
    Welcome w;
    w.role = role_from(text(j, "role"));
    w.rate = number(j, "rate");
    const json& g = object(j, "geometry");
    w.geometry = {number(g, "l1"), number(g, "l2"), number(g, "l3"), number(g, "l_dis")};
    const json& l = object(j, "limits");
    w.limits = {range_from(l, "theta"), range_from(l, "beta"), range_from(l, "alpha"),
                range_from(l, "wrist_roll")};
    w.jog_step = number(j, "jog_step");
    return w;
  }
  if (type == "reject") return Reject{text(j, "reason")};
  malformed("unknown message type '" + type + "'");
}

std::string encode_body(const Message& message) { return message_to_json(message).dump(); }

Message decode_body(std::string_view body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) malformed("message body is not valid JSON");
  return message_from_json(j);
}

std::string encode_message(const Message& message) {
  const std::string body = encode_body(message);
  if (body.size() > kMaxMessageBytes) malformed("message exceeds maximum size");
  const auto n = static_cast<std::uint32_t>(body.size());
  std::string out;
  out.reserve(4 + body.size());
  out.push_back(static_cast<char>((n >> 24) & 0xff));
  out.push_back(static_cast<char>((n >> 16) & 0xff));
  out.push_back(static_cast<char>((n >> 8) & 0xff));
  out.push_back(static_cast<char>(n & 0xff));
  out += body;
  return out;
}

Message decode_message(std::string_view bytes) {
  if (bytes.size() < 4) malformed("message shorter than its length prefix");
  const std::uint32_t n = read_length(bytes);
  if (n > kMaxMessageBytes) malformed("declared message length exceeds maximum size");
  if (bytes.size() - 4 != n) malformed("length prefix does not match message size");
  return decode_body(bytes.substr(4));
}

std::string encode_frame(const TelemetryFrame& frame) { return encode_message(frame); }

TelemetryFrame decode_frame(std::string_view bytes) {
  Message m = decode_message(bytes);
  if (auto* f = std::get_if<TelemetryFrame>(&m)) return std::move(*f);
  malformed("message is not a frame");
}

std::string encode_command(const WireCommand& command) { return encode_message(command); }

WireCommand decode_command(std::string_view bytes) {
  Message m = decode_message(bytes);
  if (auto* c = std::get_if<WireCommand>(&m)) return *c;
  malformed("message is not a command");
}

void MessageReader::feed(std::string_view bytes) { buffer_.append(bytes); }

std::optional<std::string> MessageReader::next_body() {
  if (buffer_.size() < 4) return std::nullopt;
  const std::uint32_t n = read_length(buffer_);
  if (n > kMaxMessageBytes) malformed("declared message length exceeds maximum size");
  if (buffer_.size() < 4 + static_cast<std::size_t>(n)) return std::nullopt;
  std::string body = buffer_.substr(4, n);
  buffer_.erase(0, 4 + static_cast<std::size_t>(n));
  return body;
}

}  // namespace aerotwin
