#include "aerotwin/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace aerotwin {

namespace {

// haptic updates are only published when the intensity moves at least this much
constexpr double kHapticResolution = 0.01;

}  // namespace

Simulation::Simulation(Config config) : Simulation(config, config.scene) {}

Simulation::Simulation(Config config, Scene scene)
    : config_(std::move(config)),
      scene_(std::move(scene)),
      drone_model_(config_.controller, config_.coupling),
      detector_(config_.contact.threshold, config_.contact.grasp_fraction_min),
      rng_(config_.seed) {
  config_.scene = scene_;
  config_.validate();

  masses_ = config_.masses;
  if (scene_.object) masses_.payload_mass = scene_.object->mass;

  JointAngles q = ik_solve_or_throw(config_.geometry, scene_.initial_pose, config_.limits);
  servos_ = ServoBank::at_rest(q, scene_.initial_grip, config_.servos.max_rate,
                               config_.servos.grip_rate);

  drone_.position = config_.hover.position;
  drone_.yaw = config_.hover.yaw;

  if (scene_.object) {
    object_world_ = {config_.hover.position[0] + scene_.object->x,
                     config_.hover.position[2] + scene_.object->z};
  }
  disturbance_ = ArmDisturbance::trimmed(static_torques(config_.geometry, masses_, q, false),
                                         masses_, false);
}

PlanarPose Simulation::grip_pose() const { return fk_grip(config_.geometry, {}, servos_.positions()); }

PlanarPose Simulation::target_pose() const {
  return fk_grip(config_.geometry, {}, servos_.targets());
}

std::optional<Point2> Simulation::object_position() const {
  if (!scene_.object) return std::nullopt;
  return object_world_;
}

Point2 Simulation::grip_world() const {
  const PlanarPose pose = grip_pose();
  return {drone_.position[0] + pose.x, drone_.position[2] + pose.z};
}

void Simulation::apply(const OperatorCommand& command) {
  if (command.is_hold()) {
    const JointAngles here = servos_.positions();
    servos_.theta.target = here.theta;
    servos_.beta.target = here.beta;
    servos_.alpha.target = here.alpha;
    servos_.wrist_roll.target = here.wrist_roll;
    servos_.grip.target = servos_.grip.position;
    return;
  }
  const JointAngles targets = config_.limits.clamp(*command.joint_targets());
  servos_.theta.target = targets.theta;
  servos_.beta.target = targets.beta;
  servos_.alpha.target = targets.alpha;
  servos_.wrist_roll.target = targets.wrist_roll;
  servos_.grip.target = std::clamp(command.grip_fraction, 0.0, 1.0);
}

TelemetryFrame Simulation::step(std::span<const OperatorCommand> commands) {
  for (const OperatorCommand& command : commands) apply(command);

  const double dt = config_.telemetry.dt();
  step_servos(servos_, servos_.targets(), servos_.grip.target, dt);
  ++tick_;
  const double now = time();

  const JointAngles q = servos_.positions();
  const PlanarPose pose = fk_grip(config_.geometry, {}, q);

  // Gripper and object.
  GripperState gripper{servos_.grip.position, {}};
  bool within_jaws = false;
  if (scene_.object && object_state_ != ObjectState::Fallen) {
    const Point2 grip = grip_world();
    if (object_state_ == ObjectState::Held) {
      within_jaws = true;
    } else {
      within_jaws = std::hypot(grip.x - object_world_.x, grip.z - object_world_.z) <=
                    config_.contact.capture_radius;
    }
    if (within_jaws) {
      gripper.forces =
          grip_force_model(gripper.fraction, scene_.object->size, config_.contact.stiffness);
      if (config_.contact.force_noise > 0.0 && gripper.forces.max() > 0.0) {
        std::normal_distribution<double> noise(0.0, config_.contact.force_noise);
        gripper.forces.left = std::clamp(gripper.forces.left + noise(rng_), 0.0, 1.0);
        gripper.forces.right = std::clamp(gripper.forces.right + noise(rng_), 0.0, 1.0);
      }
    }
  }

  TelemetryFrame frame;
  for (const ContactEvent& e : detector_.update(now, gripper, within_jaws)) {
    frame.events.push_back({e.timestamp, to_event_kind(e.kind), e.force});
  }
  const bool attached = detector_.grasped();
  if (scene_.object) {
    if (attached) {
      object_state_ = ObjectState::Held;
      object_world_ = grip_world();
    } else if (object_state_ == ObjectState::Held) {
      object_state_ = ObjectState::Fallen;
      object_world_.z = config_.hover.position[2] + scene_.floor_z;
    }
  }

  const double intensity =
      detector_.phase() == ContactDetector::Phase::Idle ? 0.0 : gripper.forces.max();
  const bool switched = (intensity > 0.0) != (last_haptic_ > 0.0);
  if (switched || std::abs(intensity - last_haptic_) >= kHapticResolution) {
    frame.events.push_back({now, EventKind::Haptic, intensity});
    last_haptic_ = intensity;
  }

  // Airframe.
  const JointTorques torques = static_torques(config_.geometry, masses_, q, attached);
  disturbance_ = arm_disturbance({attached, pose.x}, torques, masses_, disturbance_,
                                 config_.coupling, dt);
  AttitudeSetpoint setpoint = config_.hover;
  drone_ = drone_model_.step(drone_, setpoint, disturbance_, dt);

  frame.seq = tick_;
  frame.t = now;
  frame.drone = {drone_.position[0], drone_.position[1], drone_.position[2],
                 drone_.roll,        drone_.pitch,       drone_.yaw};
  frame.joints = q;
  frame.grip = servos_.grip.position;
  frame.grip_pose = pose;
  frame.torques = torques;
  frame.forces = gripper.forces;
  return frame;
}

}  // namespace aerotwin
