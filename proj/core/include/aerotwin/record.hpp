#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "aerotwin/config.hpp"
#include "aerotwin/operator.hpp"
#include "aerotwin/protocol.hpp"

namespace aerotwin {

/// Commands applied before the simulation advanced from `tick` to `tick + 1`.
struct TickCommands {
  std::uint64_t tick = 0;
  std::vector<OperatorCommand> commands;

  friend bool operator==(const TickCommands&, const TickCommands&) = default;
};

struct IndexedEvent {
  std::size_t frame = 0;  ///< index into SessionRecord::frames
  FrameEvent event;

  friend bool operator==(const IndexedEvent&, const IndexedEvent&) = default;
};

/**
 * Replayable capture of a session: the config (scene included), every
 * applied command with its tick, every frame, and an index of the contact
 * events. Running `commands` against `config` reproduces `frames` exactly.
 */
struct SessionRecord {
  Config config;
  std::vector<TickCommands> commands;
  std::vector<TelemetryFrame> frames;
  std::vector<IndexedEvent> events;

  double duration() const { return frames.empty() ? 0.0 : frames.back().t; }

  friend bool operator==(const SessionRecord&, const SessionRecord&) = default;
};

/// Accumulates a SessionRecord tick by tick.
class SessionRecorder {
 public:
  explicit SessionRecorder(Config config);

  void record(std::uint64_t tick, std::span<const OperatorCommand> commands,
              const TelemetryFrame& frame);

  const SessionRecord& record() const { return record_; }
  SessionRecord take() { return std::move(record_); }

 private:
  SessionRecord record_;
};

nlohmann::json command_to_json(const OperatorCommand& command);
OperatorCommand command_from_json(const nlohmann::json& j);

nlohmann::json record_to_json(const SessionRecord& record);
SessionRecord record_from_json(const nlohmann::json& j);

/// Serialized record text; identical records serialize to identical bytes.
std::string serialize_record(const SessionRecord& record);
void save_record(const SessionRecord& record, const std::filesystem::path& path);
/// Throws Error(CorruptRecord) for unreadable or inconsistent files.
SessionRecord load_record(const std::filesystem::path& path);

/// Re-runs a recorded command stream for `ticks` ticks.
std::vector<TelemetryFrame> replay_commands(const Config& config,
                                            std::span<const TickCommands> commands,
                                            std::uint64_t ticks);

}  // namespace aerotwin
