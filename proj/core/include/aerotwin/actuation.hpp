#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "aerotwin/kinematics.hpp"

namespace aerotwin {

/// Rate-limited position tracker standing in for one servo.
struct ServoState {
  double position = 0.0;
  double target = 0.0;
  double max_rate = 3.0;  ///< units per second

  /// Moves toward target by at most max_rate * dt; lands exactly on target
  /// when it is within one step.
  void step(double dt);

  friend bool operator==(const ServoState&, const ServoState&) = default;
};

/// The four arm joints plus the gripper closure servo.
struct ServoBank {
  ServoState theta;
  ServoState beta;
  ServoState alpha;
  ServoState wrist_roll;
  ServoState grip;  ///< closure fraction, 0 open .. 1 closed

  static ServoBank at_rest(const JointAngles& q, double grip_fraction, double joint_rate,
                           double grip_rate);

  JointAngles positions() const;
  JointAngles targets() const;

  friend bool operator==(const ServoBank&, const ServoBank&) = default;
};

/// Sets new targets and advances every servo by dt. Requires dt > 0.
void step_servos(ServoBank& bank, const JointAngles& targets, double grip_target, double dt);

struct BarForces {
  double left = 0.0;
  double right = 0.0;

  double max() const { return left > right ? left : right; }
  double min() const { return left < right ? left : right; }

  friend bool operator==(const BarForces&, const BarForces&) = default;
};

struct GripperState {
  double fraction = 0.0;
  BarForces forces;
};

/// Linear jaw model: no force until the jaws meet an object of normalized
/// size object_size, then stiffness * penetration, equal on both bars.
BarForces grip_force_model(double fraction, double object_size, double stiffness);

enum class ContactKind { Contact, Grasp, Release, Drop };

std::string_view to_string(ContactKind kind);

struct ContactEvent {
  double timestamp = 0.0;
  ContactKind kind = ContactKind::Contact;
  double force = 0.0;

  friend bool operator==(const ContactEvent&, const ContactEvent&) = default;
};

/**
 * Force-sensor event detector for a single object.
 *
 * Emits contact when either bar force rises above the threshold, grasp once
 * both bars are above it with the jaws closed past grasp_fraction_min,
 * release when the forces fall back below the threshold after a grasp, and
 * drop if the object leaves the jaws while grasped. Per object the emitted
 * sequence always matches (contact (grasp (release|drop))?)*.
 */
class ContactDetector {
 public:
  enum class Phase { Idle, Touching, Grasped };

  ContactDetector(double threshold = 0.05, double grasp_fraction_min = 0.3);

  std::vector<ContactEvent> update(double timestamp, const GripperState& gripper,
                                   bool object_within_jaws);

  Phase phase() const { return phase_; }
  bool grasped() const { return phase_ == Phase::Grasped; }
  double threshold() const { return threshold_; }

 private:
  double threshold_;
  double grasp_fraction_min_;
  Phase phase_ = Phase::Idle;
};

}  // namespace aerotwin
