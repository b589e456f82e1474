/**
 * @file kinematics.hpp
 * @brief Planar forward/inverse kinematics and static joint torques of the
 *        drone-mounted arm.
 *
 * Frame convention: x points forward from the shoulder, z points up, both in
 * the drone body frame. Link 1 carries a perpendicular offset l_dis between
 * the shoulder axis and the elbow axis. The grip rotation joint (wrist_roll)
 * does not affect the planar chain and is passed through unchanged.
 *
 *   elbow = shoulder + R(theta) * [l1, l_dis]
 *   wrist = elbow + l2 * [cos(beta - theta), -sin(beta - theta)]
 *   grip  = wrist + l3 * [cos(phi), sin(phi)],   phi = alpha - beta + theta
 */
#pragma once

#include <array>
#include <string_view>

namespace aerotwin {

struct Point2 {
  double x = 0.0;
  double z = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Arm segment lengths in meters.
struct LinkGeometry {
  double l1 = 0.30;     ///< shoulder to elbow along link 1
  double l2 = 0.25;     ///< elbow to wrist
  double l3 = 0.19;     ///< wrist to grip end
  double l_dis = 0.05;  ///< perpendicular shoulder/elbow offset of link 1

  double total_length() const { return l1 + l2 + l3; }

  /// Throws Error(InvalidConfig) on non-positive or non-finite lengths.
  void validate() const;
  /// Additionally checks l1 + l2 + l3 against a configured total within 1e-9 m.
  void validate(double configured_total_length) const;

  friend bool operator==(const LinkGeometry&, const LinkGeometry&) = default;
};

/// Lumped mass model used for gravity torques.
///
/// The arm weight is concentrated at arm_com_lever meters along the chain from
/// the shoulder (measured the same way as the extended-pose x extent), the
/// payload at the grip end. The default lever is calibrated so that the
/// horizontally extended arm holding 0.4 kg needs 5.3 N*m at the shoulder.
struct MassModel {
  double arm_mass = 0.918;
  double arm_com_lever = 0.266;
  double payload_mass = 0.4;
  double gravity = 9.81;

  void validate(const LinkGeometry& geom) const;

  friend bool operator==(const MassModel&, const MassModel&) = default;
};

struct JointAngles {
  double theta = 0.0;       ///< shoulder
  double beta = 0.0;        ///< elbow
  double alpha = 0.0;       ///< wrist pitch
  double wrist_roll = 0.0;  ///< grip rotation, kinematic pass-through

  friend bool operator==(const JointAngles&, const JointAngles&) = default;
};

struct JointRange {
  double min = 0.0;
  double max = 0.0;

  bool contains(double value, double tolerance = 0.0) const {
    return value >= min - tolerance && value <= max + tolerance;
  }
  double clamp(double value) const;

  friend bool operator==(const JointRange&, const JointRange&) = default;
};

struct JointLimits {
  JointRange theta{-2.0943951023931953, 2.0943951023931953};   // +-120 deg
  JointRange beta{0.0, 2.6179938779914944};                    // 0..150 deg
  JointRange alpha{-1.7453292519943295, 1.7453292519943295};   // +-100 deg
  JointRange wrist_roll{-2.6179938779914944, 2.6179938779914944};  // +-150 deg

  void validate() const;
  bool contains(const JointAngles& q, double tolerance = 0.0) const;
  JointAngles clamp(const JointAngles& q) const;

  friend bool operator==(const JointLimits&, const JointLimits&) = default;
};

/// Grip end position and orientation in the drone frame. phi is the
/// unwrapped joint sum alpha - beta + theta, so it is not confined to (-pi, pi].
struct PlanarPose {
  double x = 0.0;
  double z = 0.0;
  double phi = 0.0;

  friend bool operator==(const PlanarPose&, const PlanarPose&) = default;
};

/// Gravity torques in N*m. Positive when the supported weight lies on the
/// +x side of the joint.
struct JointTorques {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;

  friend bool operator==(const JointTorques&, const JointTorques&) = default;
};

/// Wraps an angle to (-pi, pi].
double normalize_angle(double angle);

Point2 fk_elbow(const LinkGeometry& geom, Point2 base, const JointAngles& q);
Point2 fk_wrist(const LinkGeometry& geom, Point2 base, const JointAngles& q);
PlanarPose fk_grip(const LinkGeometry& geom, Point2 base, const JointAngles& q);

/// Wrist position from the single closed-form expression of the
/// shoulder-to-wrist transform (shoulder at the origin).
Point2 wrist_closed_form(const LinkGeometry& geom, const JointAngles& q);

enum class IkStatus { Ok, Unreachable, LimitViolation };

std::string_view to_string(IkStatus status);

struct IkResult {
  IkStatus status = IkStatus::Unreachable;
  JointAngles angles{};

  bool ok() const { return status == IkStatus::Ok; }
};

/// Angles within this distance outside a joint range are snapped onto it.
inline constexpr double kLimitTolerance = 1e-9;

/**
 * Solves for the joint angles that put the grip end at target with the
 * orientation target.phi imposed (0 keeps the grip parallel to the ground).
 *
 * alpha is set to beta - theta + target.phi exactly and is never wrapped; a
 * branch whose alpha falls outside its range is rejected instead.
 *
 * The elbow-down branch (larger beta) is tried first; the other branch is only
 * used when joint limits reject the first. The returned wrist_roll is 0.
 */
IkResult ik_solve(const LinkGeometry& geom, const PlanarPose& target,
                  const JointLimits& limits);

/// Same as ik_solve but throws Error(Unreachable|LimitViolation).
JointAngles ik_solve_or_throw(const LinkGeometry& geom, const PlanarPose& target,
                              const JointLimits& limits);

bool workspace_contains(const LinkGeometry& geom, const JointLimits& limits,
                        const PlanarPose& target) noexcept;

/// Point at arc length s along the shoulder-elbow-wrist-grip chain, with the
/// first segment parameterized by l1 (so s equals the horizontal distance
/// from the shoulder in the zero pose).
Point2 point_along_chain(const LinkGeometry& geom, const JointAngles& q, double s);

JointTorques static_torques(const LinkGeometry& geom, const MassModel& masses,
                            const JointAngles& q, bool payload_attached);

}  // namespace aerotwin
