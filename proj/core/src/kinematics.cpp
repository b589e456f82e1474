#include "aerotwin/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "aerotwin/error.hpp"

namespace aerotwin {

namespace {

constexpr double kPi = std::numbers::pi;

// acos argument overshoot accepted as rounding at the workspace boundary
constexpr double kReachTolerance = 1e-12;

void require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorCode::InvalidConfig, message);
}

bool snap_into(const JointRange& range, double& value) {
  if (!range.contains(value, kLimitTolerance)) return false;
  value = range.clamp(value);
  return true;
}

}  // namespace

void LinkGeometry::validate() const {
  for (double v : {l1, l2, l3, l_dis}) {
    require(std::isfinite(v), "geometry: lengths must be finite");
  }
  require(l1 > 0.0 && l2 > 0.0 && l3 > 0.0 && l_dis > 0.0,
          "geometry: l1, l2, l3 and l_dis must be strictly positive");
}

void LinkGeometry::validate(double configured_total_length) const {
  validate();
  require(std::abs(total_length() - configured_total_length) <= 1e-9,
          "geometry: l1 + l2 + l3 = " + std::to_string(total_length()) +
              " does not match total_length " +
              std::to_string(configured_total_length));
}

void MassModel::validate(const LinkGeometry& geom) const {
  for (double v : {arm_mass, arm_com_lever, payload_mass, gravity}) {
    require(std::isfinite(v), "masses: values must be finite");
  }
  require(arm_mass >= 0.0, "masses: arm_mass must be >= 0");
  require(payload_mass >= 0.0, "masses: payload_mass must be >= 0");
  require(gravity > 0.0, "masses: gravity must be > 0");
  require(arm_com_lever >= 0.0 && arm_com_lever <= geom.total_length(),
          "masses: arm_com_lever must lie within [0, l1 + l2 + l3]");
}

double JointRange::clamp(double value) const { return std::clamp(value, min, max); }

void JointLimits::validate() const {
  const std::pair<const char*, const JointRange*> ranges[] = {
      {"theta", &theta}, {"beta", &beta}, {"alpha", &alpha}, {"wrist_roll", &wrist_roll}};
  for (const auto& [name, range] : ranges) {
    require(std::isfinite(range->min) && std::isfinite(range->max),
            std::string("joint_limits.") + name + ": bounds must be finite");
    require(range->min < range->max,
            std::string("joint_limits.") + name + ": min must be < max");
  }
}

bool JointLimits::contains(const JointAngles& q, double tolerance) const {
  return theta.contains(q.theta, tolerance) && beta.contains(q.beta, tolerance) &&
         alpha.contains(q.alpha, tolerance) &&
         wrist_roll.contains(q.wrist_roll, tolerance);
}

JointAngles JointLimits::clamp(const JointAngles& q) const {
  return {theta.clamp(q.theta), beta.clamp(q.beta), alpha.clamp(q.alpha),
          wrist_roll.clamp(q.wrist_roll)};
}

double normalize_angle(double angle) {
  if (angle > -kPi && angle <= kPi) return angle;
  double wrapped = std::remainder(angle, 2.0 * kPi);
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

Point2 fk_elbow(const LinkGeometry& geom, Point2 base, const JointAngles& q) {
  const double c = std::cos(q.theta);
  const double s = std::sin(q.theta);
  return {base.x + geom.l1 * c - geom.l_dis * s, base.z + geom.l1 * s + geom.l_dis * c};
}

Point2 fk_wrist(const LinkGeometry& geom, Point2 base, const JointAngles& q) {
  const Point2 elbow = fk_elbow(geom, base, q);
  const double rel = q.beta - q.theta;
  return {elbow.x + geom.l2 * std::cos(rel), elbow.z - geom.l2 * std::sin(rel)};
}

PlanarPose fk_grip(const LinkGeometry& geom, Point2 base, const JointAngles& q) {
  const Point2 wrist = fk_wrist(geom, base, q);
  const double phi = q.alpha - q.beta + q.theta;
  return {wrist.x + geom.l3 * std::cos(phi), wrist.z + geom.l3 * std::sin(phi), phi};
}

Point2 wrist_closed_form(const LinkGeometry& geom, const JointAngles& q) {
  const double ct = std::cos(q.theta);
  const double st = std::sin(q.theta);
  const double rel = q.beta - q.theta;
  return {geom.l1 * ct + geom.l2 * std::cos(rel) - geom.l_dis * st,
          geom.l1 * st - geom.l2 * std::sin(rel) + geom.l_dis * ct};
}

std::string_view to_string(IkStatus status) {
  switch (status) {
    case IkStatus::Ok: return "ok";
    case IkStatus::Unreachable: return "unreachable";
    case IkStatus::LimitViolation: return "limit_violation";
  }
  return "unknown";
}

IkResult ik_solve(const LinkGeometry& geom, const PlanarPose& target,
                  const JointLimits& limits) {
  if (!std::isfinite(target.x) || !std::isfinite(target.z) || !std::isfinite(target.phi)) {
    return {IkStatus::Unreachable, {}};
  }

  // The grip orientation is imposed, so the wrist position follows directly.
  const double wx = target.x - geom.l3 * std::cos(target.phi);
  const double wz = target.z - geom.l3 * std::sin(target.phi);

  // Shoulder-to-wrist vector is R(theta) * [k1, k2] with
  //   k1 = l1 + l2 cos(beta),  k2 = l_dis - l2 sin(beta),
  // so |w|^2 = L^2 + l2^2 + 2 l2 L cos(beta + delta), L = |(l1, l_dis)|.
  const double link1_sq = geom.l1 * geom.l1 + geom.l_dis * geom.l_dis;
  const double link1 = std::sqrt(link1_sq);
  const double delta = std::atan2(geom.l_dis, geom.l1);
  double c = (wx * wx + wz * wz - link1_sq - geom.l2 * geom.l2) / (2.0 * geom.l2 * link1);
  if (c > 1.0 + kReachTolerance || c < -1.0 - kReachTolerance) {
    return {IkStatus::Unreachable, {}};
  }
  c = std::clamp(c, -1.0, 1.0);
  const double spread = std::acos(c);

  const double wrist_bearing = std::atan2(wz, wx);
  for (double beta : {spread - delta, -spread - delta}) {
    if (!snap_into(limits.beta, beta)) continue;
    const double k1 = geom.l1 + geom.l2 * std::cos(beta);
    const double k2 = geom.l_dis - geom.l2 * std::sin(beta);
    double theta = normalize_angle(wrist_bearing - std::atan2(k2, k1));
    if (!snap_into(limits.theta, theta)) continue;
    double alpha = target.phi + beta - theta;
    if (!snap_into(limits.alpha, alpha)) continue;
    return {IkStatus::Ok, {theta, beta, alpha, 0.0}};
  }
  return {IkStatus::LimitViolation, {}};
}

JointAngles ik_solve_or_throw(const LinkGeometry& geom, const PlanarPose& target,
                              const JointLimits& limits) {
  const IkResult result = ik_solve(geom, target, limits);
  switch (result.status) {
    case IkStatus::Ok: return result.angles;
    case IkStatus::Unreachable:
      throw Error(ErrorCode::Unreachable, "target outside the arm workspace");
    case IkStatus::LimitViolation:
      throw Error(ErrorCode::LimitViolation, "every IK branch violates joint limits");
  }
  throw Error(ErrorCode::Unreachable, "unknown IK status");
}

bool workspace_contains(const LinkGeometry& geom, const JointLimits& limits,
                        const PlanarPose& target) noexcept {
  return ik_solve(geom, target, limits).ok();
}

Point2 point_along_chain(const LinkGeometry& geom, const JointAngles& q, double s) {
  const Point2 shoulder{};
  const Point2 elbow = fk_elbow(geom, shoulder, q);
  const Point2 wrist = fk_wrist(geom, shoulder, q);
  const PlanarPose grip = fk_grip(geom, shoulder, q);
  auto lerp = [](Point2 a, Point2 b, double f) {
    return Point2{a.x + f * (b.x - a.x), a.z + f * (b.z - a.z)};
  };
  if (s <= geom.l1) return lerp(shoulder, elbow, s / geom.l1);
  if (s <= geom.l1 + geom.l2) return lerp(elbow, wrist, (s - geom.l1) / geom.l2);
  const double f = std::min(1.0, (s - geom.l1 - geom.l2) / geom.l3);
  return lerp(wrist, {grip.x, grip.z}, f);
}

JointTorques static_torques(const LinkGeometry& geom, const MassModel& masses,
                            const JointAngles& q, bool payload_attached) {
  const Point2 shoulder{};
  const Point2 elbow = fk_elbow(geom, shoulder, q);
  const Point2 wrist = fk_wrist(geom, shoulder, q);
  const PlanarPose grip = fk_grip(geom, shoulder, q);
  const Point2 com = point_along_chain(geom, q, masses.arm_com_lever);

  const double arm_weight = masses.arm_mass * masses.gravity;
  const double payload_weight = payload_attached ? masses.payload_mass * masses.gravity : 0.0;

  // The lumped arm weight only loads the joints proximal to it.
  const bool com_past_elbow = masses.arm_com_lever > geom.l1;
  const bool com_past_wrist = masses.arm_com_lever > geom.l1 + geom.l2;

  JointTorques t;
  t.t1 = arm_weight * (com.x - shoulder.x) + payload_weight * (grip.x - shoulder.x);
  t.t2 = (com_past_elbow ? arm_weight * (com.x - elbow.x) : 0.0) +
         payload_weight * (grip.x - elbow.x);
  t.t3 = (com_past_wrist ? arm_weight * (com.x - wrist.x) : 0.0) +
         payload_weight * (grip.x - wrist.x);
  return t;
}

}  // namespace aerotwin
