/**
 * @file protocol.hpp
 * @brief Telemetry/command wire protocol.
 *
 * Every message is a 4-byte big-endian body length followed by a UTF-8 JSON
 * object with at least "type" and "protocol_version". Object keys are emitted
 * in sorted order, so a given message always encodes to the same bytes.
 * Unknown keys are ignored when decoding. See docs/protocol.md.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "aerotwin/actuation.hpp"
#include "aerotwin/kinematics.hpp"
#include "aerotwin/operator.hpp"

namespace aerotwin {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kMaxMessageBytes = 1u << 20;

struct DroneSummary {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  friend bool operator==(const DroneSummary&, const DroneSummary&) = default;
};

enum class EventKind { Contact, Grasp, Release, Drop, Haptic };

std::string_view to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view name);
EventKind to_event_kind(ContactKind kind);

/// Contact-state event or haptic intensity update. `value` is the bar force
/// for contact events and the vibration intensity for haptic ones.
struct FrameEvent {
  double t = 0.0;
  EventKind kind = EventKind::Contact;
  double value = 0.0;

  friend bool operator==(const FrameEvent&, const FrameEvent&) = default;
};

struct HapticEvent {
  double timestamp = 0.0;
  double intensity = 0.0;
};

struct TelemetryFrame {
  std::uint64_t seq = 0;
  double t = 0.0;
  DroneSummary drone;
  JointAngles joints;
  double grip = 0.0;
  PlanarPose grip_pose;
  JointTorques torques;
  BarForces forces;
  std::vector<FrameEvent> events;

  friend bool operator==(const TelemetryFrame&, const TelemetryFrame&) = default;
};

/// Emitted in place of frames a slow consumer missed.
struct GapMarker {
  std::uint64_t first_seq = 0;
  std::uint64_t dropped = 0;

  friend bool operator==(const GapMarker&, const GapMarker&) = default;
};

enum class WireMode { Teleop, Jog, Hold };

std::string_view to_string(WireMode mode);

/// Operator input as sent by a control client. Teleop carries joint angles,
/// jog carries a Cartesian step; fields of the other mode stay zero.
struct WireCommand {
  double t = 0.0;
  WireMode mode = WireMode::Teleop;
  JointAngles joints;
  CartesianStep step;
  double grip = 0.0;

  friend bool operator==(const WireCommand&, const WireCommand&) = default;
};

enum class SessionRole { Control, Observer };

std::string_view to_string(SessionRole role);

struct Hello {
  SessionRole role = SessionRole::Observer;
  std::string client;

  friend bool operator==(const Hello&, const Hello&) = default;
};

/// Handshake reply: the geometry and limits a client needs to draw the arm.
struct Welcome {
  SessionRole role = SessionRole::Observer;
  double rate = 100.0;
  LinkGeometry geometry;
  JointLimits limits;
  double jog_step = 0.02;

  friend bool operator==(const Welcome&, const Welcome&) = default;
};

struct Reject {
  std::string reason;

  friend bool operator==(const Reject&, const Reject&) = default;
};

using Message = std::variant<TelemetryFrame, GapMarker, WireCommand, Hello, Welcome, Reject>;

nlohmann::json frame_to_json(const TelemetryFrame& frame);
TelemetryFrame frame_from_json(const nlohmann::json& body);

nlohmann::json message_to_json(const Message& message);
Message message_from_json(const nlohmann::json& body);

/// JSON body without the length prefix (websocket text payload).
std::string encode_body(const Message& message);
Message decode_body(std::string_view body);

/// Length-prefixed wire bytes.
std::string encode_message(const Message& message);
/// Decodes exactly one length-prefixed message. Throws Error(MalformedMessage).
Message decode_message(std::string_view bytes);

std::string encode_frame(const TelemetryFrame& frame);
TelemetryFrame decode_frame(std::string_view bytes);
std::string encode_command(const WireCommand& command);
WireCommand decode_command(std::string_view bytes);

/// Incremental splitter for a byte stream of length-prefixed messages.
class MessageReader {
 public:
  void feed(std::string_view bytes);
  /// Next complete message body, if buffered. Throws on oversized lengths.
  std::optional<std::string> next_body();
  std::size_t buffered() const { return buffer_.size(); }

 private:
  std::string buffer_;
};

}  // namespace aerotwin
