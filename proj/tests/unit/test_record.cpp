#include <gtest/gtest.h>

#include <fstream>

#include "aerotwin/error.hpp"
#include "aerotwin/record.hpp"
#include "script_run.hpp"
#include "test_support.hpp"

using namespace aerotwin;
using aerotwin::test::play_script;
using aerotwin::test::scratch_dir;

namespace {

std::vector<ScriptWaypoint> pick_and_drop() {
  return {{{0.55, -0.30, 0.0}, 1.0, ScriptAction::None},
          {{0.55, -0.30, 0.0}, 1.0, ScriptAction::Grasp},
          {{0.50, -0.10, 0.0}, 1.0, ScriptAction::None},
          {{0.50, -0.10, 0.0}, 2.0, ScriptAction::Drop}};
}

ErrorCode load_code(const std::filesystem::path& path) {
  try {
    load_record(path);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "record loaded";
  return ErrorCode::Io;
}

}  // namespace

TEST(SessionRecord, SaveLoadRoundTrip) {
  const SessionRecord record = play_script(Config{}, pick_and_drop());
  ASSERT_FALSE(record.events.empty());
  const auto path = scratch_dir() / "run.json";
  save_record(record, path);
  const SessionRecord back = load_record(path);
  EXPECT_EQ(back, record);
  EXPECT_EQ(serialize_record(back), serialize_record(record));
}

TEST(SessionRecord, EventIndexPointsAtItsFrames) {
  const SessionRecord record = play_script(Config{}, pick_and_drop());
  for (const IndexedEvent& ie : record.events) {
    ASSERT_LT(ie.frame, record.frames.size());
    const auto& events = record.frames[ie.frame].events;
    EXPECT_NE(std::find(events.begin(), events.end(), ie.event), events.end());
    EXPECT_NE(ie.event.kind, EventKind::Haptic);
  }
}

TEST(SessionRecord, ReplayReproducesFramesBitwise) {
  Config config;
  config.contact.force_noise = 0.02;  // the seeded noise must replay too
  config.seed = 1234;
  const SessionRecord record = play_script(config, pick_and_drop());
  const auto frames = replay_commands(record.config, record.commands, record.frames.size());
  EXPECT_EQ(frames, record.frames);

  const auto path = scratch_dir() / "noisy.json";
  save_record(record, path);
  const SessionRecord loaded = load_record(path);
  EXPECT_EQ(replay_commands(loaded.config, loaded.commands, loaded.frames.size()), record.frames);
}

TEST(SessionRecord, SeedChangesNoisyRun) {
  Config a;
  a.contact.force_noise = 0.02;
  Config b = a;
  b.seed = a.seed + 1;
  EXPECT_NE(play_script(a, pick_and_drop()).frames, play_script(b, pick_and_drop()).frames);
}

TEST(SessionRecord, CorruptFilesRejected) {
  const auto dir = scratch_dir();
  std::ofstream(dir / "garbage.json") << "this is not json";
  EXPECT_EQ(load_code(dir / "garbage.json"), ErrorCode::CorruptRecord);

  std::ofstream(dir / "other.json") << R"({"format":"something-else","version":1})";
  EXPECT_EQ(load_code(dir / "other.json"), ErrorCode::CorruptRecord);

  const SessionRecord record = play_script(Config{}, pick_and_drop());
  nlohmann::json j = record_to_json(record);
  j["frames"][5]["t"] = j["frames"][4]["t"];
  std::ofstream(dir / "time.json") << j.dump();
  EXPECT_EQ(load_code(dir / "time.json"), ErrorCode::CorruptRecord);

  j = record_to_json(record);
  j["config"]["servos"]["bogus"] = 1;
  std::ofstream(dir / "config.json") << j.dump();
  EXPECT_EQ(load_code(dir / "config.json"), ErrorCode::CorruptRecord);

  j = record_to_json(record);
  j["frames"].erase(j["frames"].size() - 1);
  j["events"].push_back({{"frame", 1000000}, {"t", 1.0}, {"kind", "contact"}, {"value", 0.1}});
  std::ofstream(dir / "index.json") << j.dump();
  EXPECT_EQ(load_code(dir / "index.json"), ErrorCode::CorruptRecord);

  // unreadable counts as corrupt for the analyze path
  EXPECT_EQ(load_code(dir / "missing.json"), ErrorCode::CorruptRecord);
}

TEST(SessionRecord, CommandJsonRoundTripsEveryPayload) {
  const JointAngles q{0.1, 0.2, 0.3, 0.4};
  const std::vector<OperatorCommand> commands{
      {CommandMode::Teleop, 0.5, 0.0, HoldPayload{}},
      {CommandMode::Teleop, 0.5, 0.25, TeleopPayload{q}},
      {CommandMode::Jog, 1.0, 1.0, JogPayload{{0.02, -0.01}, q}},
      {CommandMode::Script, 2.0, 1.0, ScriptPayload{q, ScriptAction::Drop, 9, true, false}},
      {CommandMode::Script, 3.0, 0.0, ScriptPayload{q, ScriptAction::None, 9, false, true}}};
  for (const OperatorCommand& c : commands) EXPECT_EQ(command_from_json(command_to_json(c)), c);
}
