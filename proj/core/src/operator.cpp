#include "aerotwin/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aerotwin/error.hpp"

namespace aerotwin {

std::string_view to_string(GripMapping mapping) {
  switch (mapping) {
    case GripMapping::Mean: return "mean";
    case GripMapping::Max: return "max";
    case GripMapping::IndexFinger: return "index";
  }
  return "mean";
}

GripMapping grip_mapping_from_string(std::string_view name) {
  if (name == "mean") return GripMapping::Mean;
  if (name == "max") return GripMapping::Max;
  if (name == "index") return GripMapping::IndexFinger;
  throw Error(ErrorCode::InvalidConfig,
              "unknown grip mapping '" + std::string(name) + "' (expected mean|max|index)");
}

std::string_view to_string(CommandMode mode) {
  switch (mode) {
    case CommandMode::Teleop: return "teleop";
    case CommandMode::Jog: return "jog";
    case CommandMode::Script: return "script";
  }
  return "teleop";
}

std::string_view to_string(ScriptAction action) {
  switch (action) {
    case ScriptAction::None: return "none";
    case ScriptAction::Grasp: return "grasp";
    case ScriptAction::Drop: return "drop";
  }
  return "none";
}

ScriptAction script_action_from_string(std::string_view name) {
  if (name == "none") return ScriptAction::None;
  if (name == "grasp") return ScriptAction::Grasp;
  if (name == "drop") return ScriptAction::Drop;
  throw Error(ErrorCode::Validation,
              "unknown action '" + std::string(name) + "' (expected none|grasp|drop)");
}

std::optional<JointAngles> OperatorCommand::joint_targets() const {
  return std::visit(
      [](const auto& p) -> std::optional<JointAngles> {
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, HoldPayload>) {
          return std::nullopt;
        } else {
          return p.joint_targets;
        }
      },
      payload);
}

void OperatorSettings::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw Error(ErrorCode::InvalidConfig, msg);
  };
  require(std::isfinite(stale_window) && stale_window > 0.0, "operator: stale_window must be > 0");
  require(std::isfinite(align_window) && align_window >= 0.0,
          "operator: align_window must be >= 0");
  require(std::isfinite(max_jog_step) && max_jog_step > 0.0, "operator: max_jog_step must be > 0");
  require(std::isfinite(jog_step) && jog_step > 0.0 && jog_step <= max_jog_step,
          "operator: jog_step must lie in (0, max_jog_step]");
  require(std::isfinite(default_phi), "operator: default_phi must be finite");
}

double map_grip(const GloveSample& glove, GripMapping mapping) {
  std::array<double, 5> flex{};
  std::transform(glove.flex.begin(), glove.flex.end(), flex.begin(),
                 [](double f) { return std::isfinite(f) ? std::clamp(f, 0.0, 1.0) : 0.0; });
  switch (mapping) {
    case GripMapping::Mean:
      return std::accumulate(flex.begin(), flex.end(), 0.0) / static_cast<double>(flex.size());
    case GripMapping::Max: return *std::max_element(flex.begin(), flex.end());
    case GripMapping::IndexFinger: return flex[1];
  }
  return 0.0;
}

OperatorCommand teleop_map(const TrackerSample& tracker, const GloveSample& glove,
                           const JointLimits& limits, const OperatorSettings& settings,
                           double now) {
  OperatorCommand cmd;
  cmd.mode = CommandMode::Teleop;
  cmd.timestamp = now;

  const bool finite = std::isfinite(tracker.shoulder_angle) &&
                      std::isfinite(tracker.elbow_angle) && std::isfinite(glove.wrist_pitch) &&
                      std::isfinite(glove.wrist_roll);
  const double oldest = std::min(tracker.timestamp, glove.timestamp);
  const bool stale = now - oldest > settings.stale_window;
  const bool misaligned = std::abs(tracker.timestamp - glove.timestamp) > settings.align_window;
  if (!finite || stale || misaligned) {
    cmd.payload = HoldPayload{};
    return cmd;
  }

  const JointAngles raw{tracker.shoulder_angle, tracker.elbow_angle, glove.wrist_pitch,
                        glove.wrist_roll};
  cmd.payload = TeleopPayload{limits.clamp(raw)};
  cmd.grip_fraction = map_grip(glove, settings.grip_mapping);
  return cmd;
}

JogOutcome jog_step(const JointAngles& current, const CartesianStep& step,
                    const LinkGeometry& geom, const JointLimits& limits,
                    const OperatorSettings& settings, double grip_fraction, double timestamp) {
  JogOutcome out;
  out.command.mode = CommandMode::Jog;
  out.command.timestamp = timestamp;
  out.command.grip_fraction = grip_fraction;

  auto reject = [&](IkStatus reason) {
    out.accepted = false;
    out.reason = reason;
    out.command.payload = JogPayload{step, current};
    return out;
  };

  if (!std::isfinite(step.dx) || !std::isfinite(step.dz) ||
      std::abs(step.dx) > settings.max_jog_step || std::abs(step.dz) > settings.max_jog_step) {
    return reject(IkStatus::Unreachable);
  }
  if (step.dx == 0.0 && step.dz == 0.0) {
    out.accepted = true;
    out.command.payload = JogPayload{step, current};
    return out;
  }

  const PlanarPose pose = fk_grip(geom, {}, current);
  const PlanarPose target{pose.x + step.dx, pose.z + step.dz, pose.phi};
  IkResult ik = ik_solve(geom, target, limits);
  if (!ik.ok()) return reject(ik.status);
  ik.angles.wrist_roll = current.wrist_roll;
  out.accepted = true;
  out.command.payload = JogPayload{step, ik.angles};
  return out;
}

void validate_script(const std::vector<ScriptWaypoint>& script, const LinkGeometry& geom,
                     const JointLimits& limits) {
  if (script.empty()) throw Error(ErrorCode::Validation, "script has no waypoints");
  for (std::size_t i = 0; i < script.size(); ++i) {
    const ScriptWaypoint& wp = script[i];
    const std::string where = "waypoint " + std::to_string(i + 1);
    if (!std::isfinite(wp.dwell) || wp.dwell < 0.0) {
      throw Error(ErrorCode::Validation, where + ": dwell must be >= 0");
    }
    const IkResult ik = ik_solve(geom, wp.target, limits);
    if (!ik.ok()) {
      throw Error(ErrorCode::Validation,
                  where + ": target (" + std::to_string(wp.target.x) + ", " +
                      std::to_string(wp.target.z) + ", " + std::to_string(wp.target.phi) +
                      ") is " + std::string(to_string(ik.status)));
    }
  }
}

ScriptPlayer::ScriptPlayer(std::vector<ScriptWaypoint> script, const LinkGeometry& geom,
                           const JointLimits& limits, double rate, double initial_grip,
                           double initial_wrist_roll)
    : script_(std::move(script)), rate_(rate), grip_(initial_grip) {
  if (!(rate > 0.0)) throw Error(ErrorCode::Validation, "script rate must be > 0");
  validate_script(script_, geom, limits);
  resolved_.reserve(script_.size());
  for (const ScriptWaypoint& wp : script_) {
    JointAngles q = ik_solve(geom, wp.target, limits).angles;
    q.wrist_roll = limits.wrist_roll.clamp(initial_wrist_roll);
    resolved_.push_back(q);
  }
}

std::size_t ScriptPlayer::total_ticks() const {
  std::size_t total = 1;
  for (const ScriptWaypoint& wp : script_) {
    total += 1 + static_cast<std::size_t>(std::llround(wp.dwell * rate_));
  }
  return total;
}

std::optional<OperatorCommand> ScriptPlayer::next() {
  if (finished_) return std::nullopt;

  OperatorCommand cmd;
  cmd.mode = CommandMode::Script;
  cmd.timestamp = static_cast<double>(tick_) / rate_;
  ++tick_;

  if (in_waypoint_ && holds_left_ > 0) {
    --holds_left_;
    cmd.grip_fraction = grip_;
    cmd.payload = ScriptPayload{resolved_[index_], ScriptAction::None, index_ + 1, false, false};
    if (holds_left_ == 0) {
      in_waypoint_ = false;
      ++index_;
    }
    return cmd;
  }

  if (index_ >= script_.size()) {
    finished_ = true;
    cmd.grip_fraction = grip_;
    cmd.payload = ScriptPayload{resolved_.back(), ScriptAction::None, script_.size(), false, true};
    return cmd;
  }

  const ScriptWaypoint& wp = script_[index_];
  if (wp.action == ScriptAction::Grasp) grip_ = 1.0;
  if (wp.action == ScriptAction::Drop) grip_ = 0.0;
  cmd.grip_fraction = grip_;
  cmd.payload = ScriptPayload{resolved_[index_], wp.action, index_ + 1, true, false};
  holds_left_ = static_cast<std::size_t>(std::llround(wp.dwell * rate_));
  if (holds_left_ > 0) {
    in_waypoint_ = true;
  } else {
    ++index_;
  }
  return cmd;
}

}  // namespace aerotwin
