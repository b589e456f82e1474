#include "aerotwin/drone_dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "aerotwin/error.hpp"

namespace aerotwin {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorCode::InvalidConfig, message);
}

}  // namespace

void CouplingParams::validate() const {
  for (double v : {com_gain, torque_gain, payload_step_gain, trim_time_constant, tilt_drift_gain}) {
    require(std::isfinite(v) && v >= 0.0, "coupling: gains must be finite and nonnegative");
  }
  require(trim_time_constant > 0.0, "coupling: trim_time_constant must be > 0");
}

void ControllerGains::validate() const {
  require(std::isfinite(natural_frequency) && natural_frequency > 0.0,
          "controller: natural_frequency must be > 0");
  require(std::isfinite(damping_ratio) && damping_ratio > 0.0,
          "controller: damping_ratio must be > 0");
  require(std::isfinite(position_time_constant) && position_time_constant > 0.0,
          "controller: position_time_constant must be > 0");
  require(substeps >= 1 && substeps <= 1000, "controller: substeps must be in [1, 1000]");
}

ArmDisturbance ArmDisturbance::trimmed(const JointTorques& torques, const MassModel& masses,
                                       bool payload_attached) {
  ArmDisturbance d;
  d.moment = torques.t1 / masses.gravity;
  d.trim = d.moment;
  d.payload_attached = payload_attached;
  d.torques = torques;
  d.initialized = true;
  return d;
}

ArmDisturbance arm_disturbance(const ArmLoad& load, const JointTorques& torques,
                               const MassModel& masses, const ArmDisturbance& prev,
                               const CouplingParams& coupling, double dt) {
  const ArmDisturbance base =
      prev.initialized ? prev : ArmDisturbance{.payload_attached = load.payload_attached,
                                               .torques = torques,
                                               .initialized = true};
  ArmDisturbance d;
  d.initialized = true;
  d.torques = torques;
  d.payload_attached = load.payload_attached;
  // The shoulder torque is the full gravity moment of everything the arm holds.
  d.moment = torques.t1 / masses.gravity;
  d.trim = base.trim + (dt / coupling.trim_time_constant) * (d.moment - base.trim);
  d.pitch_moment_excess = d.moment - d.trim;

  const double sum = torques.t1 + torques.t2 + torques.t3;
  const double prev_sum = base.torques.t1 + base.torques.t2 + base.torques.t3;
  d.roll_torque_rate = (sum - prev_sum) / dt;

  if (load.payload_attached != base.payload_attached) {
    const double step = masses.payload_mass * load.payload_lever;
    d.payload_moment_step = load.payload_attached ? step : -step;
  }
  return d;
}

DroneModel::DroneModel(ControllerGains gains, CouplingParams coupling)
    : gains_(gains), coupling_(coupling) {
  gains_.validate();
  coupling_.validate();
}

DroneState DroneModel::step(const DroneState& state, const AttitudeSetpoint& setpoint,
                            const ArmDisturbance& disturbance, double dt) const {
  if (!(dt > 0.0 && dt <= 0.02)) {
    throw Error(ErrorCode::Validation, "step_drone: dt must lie in (0, 0.02] s");
  }
  const double w = gains_.natural_frequency;
  const double w2 = w * w;
  const double damping = 2.0 * gains_.damping_ratio * w;
  const double h = dt / gains_.substeps;

  const double pitch_bias = coupling_.com_gain * disturbance.pitch_moment_excess;
  const double roll_excitation = coupling_.torque_gain * disturbance.roll_torque_rate;

  DroneState s = state;
  s.angular_rate[1] += coupling_.payload_step_gain * disturbance.payload_moment_step;

  for (int i = 0; i < gains_.substeps; ++i) {
    s.angular_rate[0] += h * (-damping * s.angular_rate[0] - w2 * s.roll + roll_excitation);
    s.angular_rate[1] += h * (-damping * s.angular_rate[1] - w2 * (s.pitch - pitch_bias));
    s.angular_rate[2] += h * (-damping * s.angular_rate[2] -
                              w2 * normalize_angle(s.yaw - setpoint.yaw));
    s.roll += h * s.angular_rate[0];
    s.pitch += h * s.angular_rate[1];
    s.yaw = normalize_angle(s.yaw + h * s.angular_rate[2]);

    const double g = 9.81;
    const Vec3 drift{coupling_.tilt_drift_gain * g * std::sin(s.pitch),
                     -coupling_.tilt_drift_gain * g * std::sin(s.roll), 0.0};
    for (std::size_t k = 0; k < 3; ++k) {
      s.velocity[k] = (setpoint.position[k] - s.position[k]) / gains_.position_time_constant +
                      drift[k];
      s.position[k] += h * s.velocity[k];
    }
  }

  constexpr double kCrash = std::numbers::pi / 2.0;
  if (!(std::abs(s.roll) < kCrash && std::abs(s.pitch) < kCrash)) {
    throw Error(ErrorCode::Diverged, "drone attitude exceeded 90 degrees");
  }
  return s;
}

double attitude_energy(const DroneState& state, const ControllerGains& gains) {
  const double w2 = gains.natural_frequency * gains.natural_frequency;
  return w2 * (state.roll * state.roll + state.pitch * state.pitch) +
         state.angular_rate[0] * state.angular_rate[0] +
         state.angular_rate[1] * state.angular_rate[1];
}

}  // namespace aerotwin
