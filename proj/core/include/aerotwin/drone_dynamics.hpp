/**
 * @file drone_dynamics.hpp
 * @brief Hover model of the quadrotor carrying the arm.
 *
 * Each attitude axis is a linear second-order plant under PD stabilization
 * toward level hover:
 *
 *   angle'' = -2 zeta w angle' - w^2 (angle - bias) + excitation
 *
 * The pitch bias is com_gain times the untrimmed arm moment (kg*m). Roll is
 * excited by the rate of change of the joint torques. Attaching or detaching
 * the payload kicks the pitch rate. Position follows the setpoint with a
 * first-order lag plus a small drift along the tilt direction.
 *
 * Integration is semi-implicit Euler (rate first, then angle) on
 * `substeps` equal sub-intervals of each step.
 */
#pragma once

#include <array>

#include "aerotwin/kinematics.hpp"

namespace aerotwin {

using Vec3 = std::array<double, 3>;

struct DroneState {
  Vec3 position{0.0, 0.0, 0.0};
  Vec3 velocity{0.0, 0.0, 0.0};
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
  Vec3 angular_rate{0.0, 0.0, 0.0};  ///< roll, pitch, yaw rates

  friend bool operator==(const DroneState&, const DroneState&) = default;
};

struct AttitudeSetpoint {
  Vec3 position{0.0, 0.0, 1.5};
  double yaw = 0.0;

  friend bool operator==(const AttitudeSetpoint&, const AttitudeSetpoint&) = default;
};

struct CouplingParams {
  double com_gain = 1.0;            ///< rad of pitch bias per kg*m of untrimmed arm moment
  double torque_gain = 0.25;        ///< rad/s^2 of roll excitation per N*m/s of torque rate
  double payload_step_gain = 2.0;   ///< rad/s of pitch-rate kick per kg*m of payload moment step
  double trim_time_constant = 0.8;  ///< s, flight-controller trim adaptation to static moments
  double tilt_drift_gain = 0.02;    ///< s, horizontal drift per unit of g*sin(tilt)

  void validate() const;

  friend bool operator==(const CouplingParams&, const CouplingParams&) = default;
};

struct ControllerGains {
  double natural_frequency = 3.0;       ///< rad/s
  double damping_ratio = 0.6;
  double position_time_constant = 0.8;  ///< s
  int substeps = 10;

  void validate() const;

  friend bool operator==(const ControllerGains&, const ControllerGains&) = default;
};

/// What the arm is doing to the airframe at one tick, plus the tracker state
/// carried between ticks.
struct ArmDisturbance {
  double moment = 0.0;               ///< kg*m, sum of mass * horizontal lever about the shoulder
  double trim = 0.0;                 ///< kg*m of moment already absorbed by the trim
  double pitch_moment_excess = 0.0;  ///< moment - trim
  double roll_torque_rate = 0.0;     ///< N*m/s, summed over the three joints
  double payload_moment_step = 0.0;  ///< kg*m, signed payload moment added this tick
  bool payload_attached = false;
  JointTorques torques{};
  bool initialized = false;

  /// Starting state for an airframe already trimmed for the given load.
  static ArmDisturbance trimmed(const JointTorques& torques, const MassModel& masses,
                                bool payload_attached);

  friend bool operator==(const ArmDisturbance&, const ArmDisturbance&) = default;
};

/// Load carried by the arm at one tick.
struct ArmLoad {
  bool payload_attached = false;
  double payload_lever = 0.0;  ///< m, horizontal distance of the payload from the shoulder
};

/**
 * Derives this tick's disturbance from the static torques and the previous
 * disturbance. Expected to be called at a fixed dt.
 */
ArmDisturbance arm_disturbance(const ArmLoad& load, const JointTorques& torques,
                               const MassModel& masses, const ArmDisturbance& prev,
                               const CouplingParams& coupling, double dt);

class DroneModel {
 public:
  DroneModel() = default;
  DroneModel(ControllerGains gains, CouplingParams coupling);

  /// Advances the airframe by dt (0 < dt <= 0.02 s). Throws Error(Diverged)
  /// if roll or pitch reach pi/2.
  DroneState step(const DroneState& state, const AttitudeSetpoint& setpoint,
                  const ArmDisturbance& disturbance, double dt) const;

  const ControllerGains& gains() const { return gains_; }
  const CouplingParams& coupling() const { return coupling_; }

 private:
  ControllerGains gains_{};
  CouplingParams coupling_{};
};

inline DroneState step_drone(const DroneModel& model, const DroneState& state,
                             const AttitudeSetpoint& setpoint,
                             const ArmDisturbance& disturbance, double dt) {
  return model.step(state, setpoint, disturbance, dt);
}

/// Quadratic attitude energy w^2 angle^2 + rate^2 summed over roll and pitch.
double attitude_energy(const DroneState& state, const ControllerGains& gains);

}  // namespace aerotwin
