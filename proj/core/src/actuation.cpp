#include "aerotwin/actuation.hpp"

#include <algorithm>
#include <cmath>

#include "aerotwin/error.hpp"

namespace aerotwin {

void ServoState::step(double dt) {
  const double max_delta = max_rate * dt;
  const double error = target - position;
  if (std::abs(error) <= max_delta) {
    position = target;
  } else {
    position += error > 0.0 ? max_delta : -max_delta;
  }
}

ServoBank ServoBank::at_rest(const JointAngles& q, double grip_fraction, double joint_rate,
                             double grip_rate) {
  return {{q.theta, q.theta, joint_rate},
          {q.beta, q.beta, joint_rate},
          {q.alpha, q.alpha, joint_rate},
          {q.wrist_roll, q.wrist_roll, joint_rate},
          {grip_fraction, grip_fraction, grip_rate}};
}

JointAngles ServoBank::positions() const {
  return {theta.position, beta.position, alpha.position, wrist_roll.position};
}

JointAngles ServoBank::targets() const {
  return {theta.target, beta.target, alpha.target, wrist_roll.target};
}

void step_servos(ServoBank& bank, const JointAngles& targets, double grip_target, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::Validation, "step_servos: dt must be > 0");
  bank.theta.target = targets.theta;
  bank.beta.target = targets.beta;
  bank.alpha.target = targets.alpha;
  bank.wrist_roll.target = targets.wrist_roll;
  bank.grip.target = std::clamp(grip_target, 0.0, 1.0);
  for (ServoState* servo : {&bank.theta, &bank.beta, &bank.alpha, &bank.wrist_roll, &bank.grip}) {
    servo->step(dt);
  }
}

BarForces grip_force_model(double fraction, double object_size, double stiffness) {
  const double contact_at = 1.0 - object_size;
  if (fraction <= contact_at) return {};
  const double force = std::clamp(stiffness * (fraction - contact_at), 0.0, 1.0);
  return {force, force};
}

std::string_view to_string(ContactKind kind) {
  switch (kind) {
    case ContactKind::Contact: return "contact";
    case ContactKind::Grasp: return "grasp";
    case ContactKind::Release: return "release";
    case ContactKind::Drop: return "drop";
  }
  return "unknown";
}

ContactDetector::ContactDetector(double threshold, double grasp_fraction_min)
    : threshold_(threshold), grasp_fraction_min_(grasp_fraction_min) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "contact threshold must lie in (0, 1)");
  }
}

std::vector<ContactEvent> ContactDetector::update(double timestamp, const GripperState& gripper,
                                                  bool object_within_jaws) {
  std::vector<ContactEvent> events;
  const double peak = gripper.forces.max();
  const bool any_above = peak > threshold_;
  const bool both_above = gripper.forces.min() > threshold_;

  switch (phase_) {
    case Phase::Idle:
      if (!any_above) break;
      events.push_back({timestamp, ContactKind::Contact, peak});
      phase_ = Phase::Touching;
      [[fallthrough]];
    case Phase::Touching:
      if (both_above && gripper.fraction > grasp_fraction_min_) {
        events.push_back({timestamp, ContactKind::Grasp, peak});
        phase_ = Phase::Grasped;
      } else if (!any_above) {
        phase_ = Phase::Idle;
      }
      break;
    case Phase::Grasped:
      if (!object_within_jaws) {
        events.push_back({timestamp, ContactKind::Drop, peak});
        phase_ = Phase::Idle;
      } else if (!any_above) {
        events.push_back({timestamp, ContactKind::Release, peak});
        phase_ = Phase::Idle;
      }
      break;
  }
  return events;
}

}  // namespace aerotwin
