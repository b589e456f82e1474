#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <variant>
#include <vector>

#include "aerotwin/config.hpp"
#include "aerotwin/operator.hpp"
#include "aerotwin/protocol.hpp"
#include "aerotwin/record.hpp"
#include "aerotwin/simulation.hpp"

namespace aerotwin {

using StreamItem = std::variant<TelemetryFrame, GapMarker>;

/// Destination of one outbound frame stream. `deliver` may block (a slow
/// consumer); throwing Error(SinkClosed) ends the stream cleanly.
class FrameSink {
 public:
  virtual ~FrameSink() = default;
  virtual void deliver(const StreamItem& item) = 0;
};

class CallbackSink : public FrameSink {
 public:
  explicit CallbackSink(std::function<void(const StreamItem&)> fn) : fn_(std::move(fn)) {}
  void deliver(const StreamItem& item) override { fn_(item); }

 private:
  std::function<void(const StreamItem&)> fn_;
};

/**
 * Bounded frame queue that never blocks the producer. When full, the oldest
 * frame is dropped and a single gap marker covering the dropped run is handed
 * out before the next surviving frame.
 */
class FrameBuffer {
 public:
  explicit FrameBuffer(std::size_t capacity = 32);

  void push(TelemetryFrame frame);
  /// Blocks until an item is available or the buffer is closed and empty.
  std::optional<StreamItem> pop();
  void close();

  std::size_t capacity() const { return capacity_; }
  std::uint64_t dropped() const;

 private:
  mutable std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<TelemetryFrame> frames_;
  std::optional<GapMarker> pending_gap_;
  std::size_t capacity_;
  std::uint64_t dropped_ = 0;
  bool closed_ = false;
};

struct StreamStats {
  std::uint64_t published = 0;
  std::uint64_t delivered_frames = 0;
  std::uint64_t gap_markers = 0;
  std::uint64_t dropped = 0;
};

/// One consumer's stream: a FrameBuffer drained into a sink by its own thread.
class StreamSession {
 public:
  StreamSession(FrameSink& sink, std::size_t capacity);
  ~StreamSession();

  StreamSession(const StreamSession&) = delete;
  StreamSession& operator=(const StreamSession&) = delete;

  void publish(const TelemetryFrame& frame);
  /// Delivers whatever is still buffered, then stops. Safe to call from
  /// several threads.
  void close();
  bool sink_closed() const { return sink_closed_; }
  StreamStats stats() const;

 private:
  void pump();

  FrameSink& sink_;
  FrameBuffer buffer_;
  std::atomic<bool> sink_closed_{false};
  std::atomic<std::uint64_t> published_{0};
  std::atomic<std::uint64_t> delivered_{0};
  std::atomic<std::uint64_t> gaps_{0};
  std::mutex close_mutex_;
  std::thread thread_;
};

/// Lossless command ingress with backpressure: producers block while full.
class CommandQueue {
 public:
  explicit CommandQueue(std::size_t capacity = 1024) : capacity_(capacity) {}

  void push(WireCommand command);
  std::vector<WireCommand> drain();
  void close();

 private:
  std::mutex mutex_;
  std::condition_variable space_;
  std::deque<WireCommand> queue_;
  std::size_t capacity_;
  bool closed_ = false;
};

/**
 * Turns wire commands into operator commands on the simulation thread.
 *
 * Teleop input is treated as tracker + glove samples stamped with the
 * simulation time of arrival; a fresh sample yields a teleop command, and
 * once the latest sample is older than the stale window a single hold is
 * issued. Jog steps resolve against the current joint targets. Commands
 * are delayed by the configured artificial latency.
 */
class ControlResolver {
 public:
  explicit ControlResolver(const Config& config);

  void receive(const WireCommand& command, double now);
  std::vector<OperatorCommand> resolve(const Simulation& sim, double now);

  std::uint64_t rejected_jogs() const { return rejected_jogs_; }

 private:
  struct Pending {
    WireCommand command;
    double apply_at;
  };

  const Config& config_;
  std::deque<Pending> pending_;
  std::optional<TrackerSample> tracker_;
  std::optional<GloveSample> glove_;
  bool teleop_active_ = false;
  std::uint64_t rejected_jogs_ = 0;
};

struct LoopOptions {
  bool paced = true;  ///< sleep to hold the tick rate in wall-clock time
  std::optional<std::uint64_t> max_ticks;
  bool record = false;
};

/**
 * Owns the simulation and ticks it at the configured rate, fanning each frame
 * out to every subscribed stream and applying queued commands. Either drive
 * it synchronously with run_ticks() or on its own thread with start().
 */
class SimulationLoop {
 public:
  SimulationLoop(Config config, LoopOptions options);
  ~SimulationLoop();

  SimulationLoop(const SimulationLoop&) = delete;
  SimulationLoop& operator=(const SimulationLoop&) = delete;

  /// The sink must outlive the returned session.
  std::shared_ptr<StreamSession> subscribe(FrameSink& sink);
  void unsubscribe(const std::shared_ptr<StreamSession>& session);

  void submit(WireCommand command);

  std::uint64_t run_ticks(std::uint64_t ticks);
  void start();
  /// Stops ticking and drains every subscriber.
  void stop();
  /// Blocks until the loop thread exits (max_ticks reached or stop()).
  void wait();
  bool finished() const { return finished_; }

  std::uint64_t tick() const;
  const Config& config() const { return config_; }
  /// Copy of the session record so far (empty unless options.record).
  SessionRecord record() const;

 private:
  void tick_once();
  void thread_main();
  void close_sessions();

  Config config_;
  LoopOptions options_;
  Simulation sim_;
  ControlResolver resolver_;
  CommandQueue commands_;
  std::optional<SessionRecorder> recorder_;

  mutable std::mutex mutex_;  // guards sessions_, recorder_, sim_ reads
  std::vector<std::shared_ptr<StreamSession>> sessions_;
  std::atomic<bool> stop_requested_{false};
  std::atomic<bool> finished_{false};
  std::thread thread_;
};

/// Runs a fresh simulation for `duration` seconds of wall-clock time at `rate`
/// Hz and streams every frame to the sink through a buffer of `capacity` frames.
/// A sink that falls more than `capacity` frames behind sees a gap marker.
StreamStats stream_session(const Config& config, FrameSink& sink, double rate, double duration,
                           std::size_t capacity = 32);

}  // namespace aerotwin
