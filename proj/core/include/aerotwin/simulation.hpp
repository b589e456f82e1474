#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>

#include "aerotwin/actuation.hpp"
#include "aerotwin/config.hpp"
#include "aerotwin/drone_dynamics.hpp"
#include "aerotwin/operator.hpp"
#include "aerotwin/protocol.hpp"

namespace aerotwin {

/**
 * The digital twin: servos, gripper and contact sensing, the held object and
 * the airframe, advanced one fixed tick at a time.
 *
 * Per tick: apply the commands in order, step the servos, evaluate the
 * gripper forces and contact events, recompute the static torques, derive the
 * arm disturbance and step the drone. The returned frame is stamped with the
 * simulation clock (tick / rate). No wall-clock input is used anywhere, so a
 * command stream replayed against the same config reproduces every frame.
 */
class Simulation {
 public:
  explicit Simulation(Config config);
  Simulation(Config config, Scene scene);

  TelemetryFrame step(std::span<const OperatorCommand> commands = {});

  std::uint64_t tick() const { return tick_; }
  double time() const { return static_cast<double>(tick_) / config_.telemetry.rate; }
  double dt() const { return config_.telemetry.dt(); }

  const Config& config() const { return config_; }
  const Scene& scene() const { return scene_; }
  const ServoBank& servos() const { return servos_; }
  const DroneState& drone() const { return drone_; }
  const ContactDetector& detector() const { return detector_; }
  const ArmDisturbance& disturbance() const { return disturbance_; }

  JointAngles joint_targets() const { return servos_.targets(); }
  double grip_target() const { return servos_.grip.target; }
  PlanarPose grip_pose() const;
  /// Grip pose the current joint targets will reach.
  PlanarPose target_pose() const;

  /// World-frame object position (x, z), if the scene has an object.
  std::optional<Point2> object_position() const;
  bool object_free() const { return object_state_ == ObjectState::Resting; }

 private:
  enum class ObjectState { Resting, Held, Fallen };

  void apply(const OperatorCommand& command);
  Point2 grip_world() const;

  Config config_;
  Scene scene_;
  MassModel masses_;
  DroneModel drone_model_;
  ServoBank servos_;
  ContactDetector detector_;
  DroneState drone_;
  ArmDisturbance disturbance_;
  std::mt19937_64 rng_;
  Point2 object_world_{};
  ObjectState object_state_ = ObjectState::Resting;
  double last_haptic_ = 0.0;
  std::uint64_t tick_ = 0;
};

}  // namespace aerotwin
