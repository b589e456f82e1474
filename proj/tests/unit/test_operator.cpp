#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "aerotwin/error.hpp"
#include "aerotwin/operator.hpp"

using namespace aerotwin;

namespace {

GloveSample glove(double flex, double t, double pitch = 0.0) {
  GloveSample g;
  g.flex.fill(flex);
  g.wrist_pitch = pitch;
  g.timestamp = t;
  return g;
}

const OperatorSettings kSettings;
const JointLimits kLimits;
const LinkGeometry kGeom;

}  // namespace

TEST(Teleop, ZeroInputZeroTargets) {
  const OperatorCommand c = teleop_map({0.0, 0.0, 1.0}, glove(0.0, 1.0), kLimits, kSettings, 1.0);
  ASSERT_FALSE(c.is_hold());
  EXPECT_EQ(*c.joint_targets(), (JointAngles{0.0, 0.0, 0.0, 0.0}));
  EXPECT_EQ(c.grip_fraction, 0.0);
  EXPECT_EQ(c.mode, CommandMode::Teleop);
}

TEST(Teleop, FullFlexClosesTheGrip) {
  const OperatorCommand c = teleop_map({0.0, 0.0, 0.0}, glove(1.0, 0.0), kLimits, kSettings, 0.0);
  EXPECT_EQ(c.grip_fraction, 1.0);
}

TEST(Teleop, ShoulderPastLimitIsClamped) {
  const OperatorCommand c = teleop_map({3.0, 0.2, 0.0}, glove(0.0, 0.0), kLimits, kSettings, 0.0);
  EXPECT_EQ(c.joint_targets()->theta, kLimits.theta.max);
  EXPECT_EQ(c.joint_targets()->beta, 0.2);
}

TEST(Teleop, StaleMisalignedOrBrokenInputHolds) {
  EXPECT_TRUE(teleop_map({0.1, 0.1, 0.0}, glove(0.5, 0.0), kLimits, kSettings, 0.25).is_hold());
  EXPECT_TRUE(teleop_map({0.1, 0.1, 0.0}, glove(0.5, 0.06), kLimits, kSettings, 0.06).is_hold());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_TRUE(teleop_map({nan, 0.1, 0.0}, glove(0.5, 0.0), kLimits, kSettings, 0.0).is_hold());
  EXPECT_FALSE(teleop_map({0.1, 0.1, 0.0}, glove(0.5, 0.0), kLimits, kSettings, 0.2).is_hold());
}

TEST(Teleop, TargetsAlwaysInsideLimits) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> wild(-6.0, 6.0);
  for (int i = 0; i < 1000; ++i) {
    GloveSample g = glove(0.3, 0.0, wild(rng));
    g.wrist_roll = wild(rng);
    const OperatorCommand c = teleop_map({wild(rng), wild(rng), 0.0}, g, kLimits, kSettings, 0.0);
    ASSERT_TRUE(c.joint_targets());
    EXPECT_TRUE(kLimits.contains(*c.joint_targets()));
  }
}

TEST(GripMapping, Reductions) {
  GloveSample g;
  g.flex = {0.0, 0.5, 1.0, 0.25, 0.25};
  EXPECT_DOUBLE_EQ(map_grip(g, GripMapping::Mean), 0.4);
  EXPECT_DOUBLE_EQ(map_grip(g, GripMapping::Max), 1.0);
  EXPECT_DOUBLE_EQ(map_grip(g, GripMapping::IndexFinger), 0.5);
  g.flex = {2.0, 2.0, 2.0, 2.0, 2.0};
  EXPECT_EQ(map_grip(g, GripMapping::Mean), 1.0);
  EXPECT_EQ(grip_mapping_from_string("index"), GripMapping::IndexFinger);
  EXPECT_THROW(grip_mapping_from_string("thumb"), Error);
}

TEST(Jog, StepResolvesThroughInverseKinematics) {
  const JointAngles current = ik_solve(kGeom, {0.5, 0.0, 0.0}, kLimits).angles;
  const JogOutcome out = jog_step(current, {0.02, 0.0}, kGeom, kLimits, kSettings, 0.4, 1.0);
  ASSERT_TRUE(out.accepted);
  const IkResult oracle = ik_solve(kGeom, {0.52, 0.0, 0.0}, kLimits);
  ASSERT_TRUE(oracle.ok());
  const JointAngles got = *out.command.joint_targets();
  EXPECT_NEAR(got.theta, oracle.angles.theta, 1e-12);
  EXPECT_NEAR(got.beta, oracle.angles.beta, 1e-12);
  EXPECT_NEAR(got.alpha, oracle.angles.alpha, 1e-12);
  EXPECT_EQ(out.command.grip_fraction, 0.4);
  EXPECT_EQ(out.command.mode, CommandMode::Jog);
}

TEST(Jog, PastReachIsRejectedAndPoseHeld) {
  const JointAngles current = ik_solve(kGeom, {0.73, 0.05, 0.0}, kLimits).angles;
  const JogOutcome out = jog_step(current, {0.05, 0.0}, kGeom, kLimits, kSettings, 0.0, 0.0);
  EXPECT_FALSE(out.accepted);
  EXPECT_EQ(*out.command.joint_targets(), current);
}

TEST(Jog, ZeroStepReemitsCurrent) {
  const JointAngles current{0.3, 0.4, 0.1, -0.2};
  const JogOutcome out = jog_step(current, {0.0, 0.0}, kGeom, kLimits, kSettings, 0.0, 0.0);
  EXPECT_TRUE(out.accepted);
  EXPECT_EQ(*out.command.joint_targets(), current);
}

TEST(Jog, OversizedStepRejected) {
  const JointAngles current = ik_solve(kGeom, {0.5, 0.0, 0.0}, kLimits).angles;
  EXPECT_FALSE(jog_step(current, {0.06, 0.0}, kGeom, kLimits, kSettings, 0.0, 0.0).accepted);
  EXPECT_FALSE(jog_step(current, {0.0, -0.051}, kGeom, kLimits, kSettings, 0.0, 0.0).accepted);
}

TEST(Jog, RandomWalkNeverLeavesTheWorkspace) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> step(-0.05, 0.05);
  JointAngles q = ik_solve(kGeom, {0.5, -0.1, 0.0}, kLimits).angles;
  int accepted = 0;
  for (int i = 0; i < 2000; ++i) {
    const PlanarPose before = fk_grip(kGeom, {}, q);
    const CartesianStep s{step(rng), step(rng)};
    const JogOutcome out = jog_step(q, s, kGeom, kLimits, kSettings, 0.0, 0.0);
    const JointAngles next = *out.command.joint_targets();
    EXPECT_TRUE(kLimits.contains(next));
    if (out.accepted) {
      ++accepted;
      const PlanarPose after = fk_grip(kGeom, {}, next);
      EXPECT_NEAR(after.x, before.x + s.dx, 1e-9);
      EXPECT_NEAR(after.z, before.z + s.dz, 1e-9);
      EXPECT_NEAR(std::remainder(after.phi - before.phi, 2 * M_PI), 0.0, 1e-9);
    } else {
      EXPECT_EQ(next, q);
    }
    q = next;
  }
  EXPECT_GT(accepted, 100);
}

TEST(Script, SingleWaypointAtCurrentPoseIsOneHoldThenEnd) {
  const PlanarPose here{0.5, -0.1, 0.0};
  const JointAngles q = ik_solve(kGeom, here, kLimits).angles;
  ScriptPlayer player({{here, 0.0, ScriptAction::None}}, kGeom, kLimits, 100.0);
  const auto first = player.next();
  const auto second = player.next();
  ASSERT_TRUE(first && second);
  EXPECT_EQ(*first->joint_targets(), q);
  const auto& end = std::get<ScriptPayload>(second->payload);
  EXPECT_TRUE(end.end_of_script);
  EXPECT_FALSE(player.next());
  EXPECT_TRUE(player.finished());
}

TEST(Script, OneSecondDwellIsAHundredHolds) {
  ScriptPlayer player({{{0.5, -0.1, 0.0}, 1.0, ScriptAction::None},
                       {{0.6, -0.1, 0.0}, 1.0, ScriptAction::None}},
                      kGeom, kLimits, 100.0);
  std::vector<std::size_t> transitions;
  std::size_t index = 0;
  while (auto c = player.next()) {
    const auto& p = std::get<ScriptPayload>(c->payload);
    if (p.transition) transitions.push_back(index);
    ++index;
  }
  ASSERT_EQ(transitions.size(), 2u);
  const std::size_t holds = transitions[1] - transitions[0] - 1;
  EXPECT_GE(holds, 99u);
  EXPECT_LE(holds, 101u);
  EXPECT_EQ(index, player.total_ticks());
  EXPECT_EQ(player.ticks_emitted(), index);
}

TEST(Script, ActionsDriveTheGrip) {
  ScriptPlayer player({{{0.5, -0.1, 0.0}, 0.05, ScriptAction::Grasp},
                       {{0.55, -0.1, 0.0}, 0.05, ScriptAction::None},
                       {{0.6, -0.1, 0.0}, 0.05, ScriptAction::Drop}},
                      kGeom, kLimits, 100.0, 0.0);
  std::vector<std::pair<std::size_t, double>> grip_at;
  while (auto c = player.next()) {
    const auto& p = std::get<ScriptPayload>(c->payload);
    if (p.transition) grip_at.emplace_back(p.waypoint, c->grip_fraction);
  }
  ASSERT_EQ(grip_at.size(), 3u);
  EXPECT_EQ(grip_at[0], std::make_pair(std::size_t{1}, 1.0));
  EXPECT_EQ(grip_at[1], std::make_pair(std::size_t{2}, 1.0));
  EXPECT_EQ(grip_at[2], std::make_pair(std::size_t{3}, 0.0));
}

TEST(Script, DeterministicStream) {
  const std::vector<ScriptWaypoint> script{{{0.5, -0.1, 0.0}, 0.3, ScriptAction::Grasp},
                                           {{0.6, 0.0, 0.0}, 0.2, ScriptAction::Drop}};
  ScriptPlayer a(script, kGeom, kLimits, 100.0);
  ScriptPlayer b(script, kGeom, kLimits, 100.0);
  for (;;) {
    const auto x = a.next();
    const auto y = b.next();
    ASSERT_EQ(x, y);
    if (!x) break;
  }
}

TEST(Script, ValidationNamesTheWaypoint) {
  EXPECT_THROW(validate_script({}, kGeom, kLimits), Error);
  try {
    validate_script({{{0.5, -0.1, 0.0}, 1.0, ScriptAction::None},
                     {{1.5, 0.0, 0.0}, 1.0, ScriptAction::None}},
                    kGeom, kLimits);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Validation);
    EXPECT_NE(std::string(e.what()).find("waypoint 2"), std::string::npos) << e.what();
  }
  try {
    validate_script({{{0.5, -0.1, 0.0}, -1.0, ScriptAction::None}}, kGeom, kLimits);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("waypoint 1"), std::string::npos);
  }
}

TEST(Script, TargetsInsideLimits) {
  ScriptPlayer player({{{0.3, 0.1, 0.0}, 0.1, ScriptAction::None},
                       {{0.7, -0.2, 0.0}, 0.1, ScriptAction::None}},
                      kGeom, kLimits, 100.0, 0.0, 9.0);
  while (auto c = player.next()) EXPECT_TRUE(kLimits.contains(*c->joint_targets()));
}

TEST(Mailbox, LastWriterWins) {
  Mailbox<int> box;
  EXPECT_FALSE(box.take());
  box.post(1);
  box.post(2);
  EXPECT_EQ(box.peek(), 2);
  EXPECT_EQ(box.take(), 2);
  EXPECT_FALSE(box.take());
}

TEST(OperatorSettings, Validation) {
  OperatorSettings s;
  EXPECT_NO_THROW(s.validate());
  s.jog_step = 0.1;
  EXPECT_THROW(s.validate(), Error);
  s = OperatorSettings{};
  s.stale_window = 0.0;
  EXPECT_THROW(s.validate(), Error);
}
