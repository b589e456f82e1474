#pragma once

#include <array>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aerotwin/kinematics.hpp"

namespace aerotwin {

/// Human shoulder/elbow angles, already resolved from the tracker poses.
struct TrackerSample {
  double shoulder_angle = 0.0;
  double elbow_angle = 0.0;
  double timestamp = 0.0;
};

struct GloveSample {
  std::array<double, 5> flex{};  ///< finger flexion, 0 straight .. 1 fully bent
  double wrist_pitch = 0.0;      ///< from the glove IMU
  double wrist_roll = 0.0;
  double timestamp = 0.0;
};

enum class GripMapping { Mean, Max, IndexFinger };

std::string_view to_string(GripMapping mapping);
GripMapping grip_mapping_from_string(std::string_view name);

enum class CommandMode { Teleop, Jog, Script };

std::string_view to_string(CommandMode mode);

enum class ScriptAction { None, Grasp, Drop };

std::string_view to_string(ScriptAction action);
ScriptAction script_action_from_string(std::string_view name);

struct CartesianStep {
  double dx = 0.0;
  double dz = 0.0;

  friend bool operator==(const CartesianStep&, const CartesianStep&) = default;
};

/// Keep the servos where they are (targets := current positions).
struct HoldPayload {
  friend bool operator==(const HoldPayload&, const HoldPayload&) = default;
};

struct TeleopPayload {
  JointAngles joint_targets;
  friend bool operator==(const TeleopPayload&, const TeleopPayload&) = default;
};

/// A jog step together with the IK resolution of the stepped pose.
struct JogPayload {
  CartesianStep step;
  JointAngles joint_targets;
  friend bool operator==(const JogPayload&, const JogPayload&) = default;
};

struct ScriptPayload {
  JointAngles joint_targets;
  ScriptAction action = ScriptAction::None;
  std::size_t waypoint = 0;  ///< 1-based waypoint number
  bool transition = false;   ///< first command issued for this waypoint
  bool end_of_script = false;
  friend bool operator==(const ScriptPayload&, const ScriptPayload&) = default;
};

using CommandPayload = std::variant<HoldPayload, TeleopPayload, JogPayload, ScriptPayload>;

struct OperatorCommand {
  CommandMode mode = CommandMode::Teleop;
  double timestamp = 0.0;
  double grip_fraction = 0.0;  ///< ignored by hold commands
  CommandPayload payload = HoldPayload{};

  bool is_hold() const { return std::holds_alternative<HoldPayload>(payload); }
  /// Joint targets carried by the payload; empty for holds.
  std::optional<JointAngles> joint_targets() const;

  friend bool operator==(const OperatorCommand&, const OperatorCommand&) = default;
};

struct OperatorSettings {
  double stale_window = 0.2;   ///< s
  double align_window = 0.05;  ///< s, max skew between tracker and glove samples
  double max_jog_step = 0.05;  ///< m
  double jog_step = 0.02;      ///< m, default arrow-key increment
  GripMapping grip_mapping = GripMapping::Mean;
  double default_phi = 0.0;

  void validate() const;

  friend bool operator==(const OperatorSettings&, const OperatorSettings&) = default;
};

double map_grip(const GloveSample& glove, GripMapping mapping);

/**
 * Maps tracker and glove samples to a teleop command, clamped to the joint
 * limits. Samples older than the stale window at `now`, or more than the
 * alignment window apart, produce a hold command.
 */
OperatorCommand teleop_map(const TrackerSample& tracker, const GloveSample& glove,
                           const JointLimits& limits, const OperatorSettings& settings,
                           double now);

struct JogOutcome {
  bool accepted = false;
  IkStatus reason = IkStatus::Ok;  ///< why a rejected step failed
  OperatorCommand command;         ///< re-emits the current joints when rejected
};

/// Steps the current grip pose by (dx, dz) with phi unchanged and resolves it
/// through IK. Steps longer than max_jog_step per axis are rejected as
/// unreachable. A zero step re-emits the current joints unchanged.
JogOutcome jog_step(const JointAngles& current, const CartesianStep& step,
                    const LinkGeometry& geom, const JointLimits& limits,
                    const OperatorSettings& settings, double grip_fraction, double timestamp);

struct ScriptWaypoint {
  PlanarPose target;
  double dwell = 0.0;
  ScriptAction action = ScriptAction::None;

  friend bool operator==(const ScriptWaypoint&, const ScriptWaypoint&) = default;
};

/// Throws Error(Validation) naming the 1-based index of the first bad waypoint.
void validate_script(const std::vector<ScriptWaypoint>& script, const LinkGeometry& geom,
                     const JointLimits& limits);

/**
 * Emits one command per tick: a transition command when a waypoint starts
 * (carrying its action), round(dwell * rate) repeats while it is held, and a
 * final end-of-script marker. Grasp sets the grip fraction to 1 and drop to 0
 * from that waypoint on.
 */
class ScriptPlayer {
 public:
  ScriptPlayer(std::vector<ScriptWaypoint> script, const LinkGeometry& geom,
               const JointLimits& limits, double rate, double initial_grip = 0.0,
               double initial_wrist_roll = 0.0);

  /// Next command, or nothing once the end marker has been emitted.
  std::optional<OperatorCommand> next();

  bool finished() const { return finished_; }
  std::size_t ticks_emitted() const { return tick_; }
  /// Total number of commands the player will emit, end marker included.
  std::size_t total_ticks() const;

 private:
  std::vector<ScriptWaypoint> script_;
  std::vector<JointAngles> resolved_;
  double rate_;
  double grip_;
  std::size_t index_ = 0;
  std::size_t holds_left_ = 0;
  bool in_waypoint_ = false;
  bool finished_ = false;
  std::size_t tick_ = 0;
};

/**
 * Last-writer-wins mailbox with capacity one. Producers overwrite, the
 * consumer takes the latest value (if any) once per tick.
 */
template <typename T>
class Mailbox {
 public:
  void post(T value) {
    std::lock_guard lock(mutex_);
    slot_ = std::move(value);
  }

  std::optional<T> take() {
    std::lock_guard lock(mutex_);
    std::optional<T> out = std::move(slot_);
    slot_.reset();
    return out;
  }

  std::optional<T> peek() const {
    std::lock_guard lock(mutex_);
    return slot_;
  }

 private:
  mutable std::mutex mutex_;
  std::optional<T> slot_;
};

}  // namespace aerotwin
