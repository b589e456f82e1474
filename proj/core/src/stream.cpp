#include "aerotwin/stream.hpp"

#include <chrono>
#include <cmath>

#include "aerotwin/error.hpp"

namespace aerotwin {

FrameBuffer::FrameBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw Error(ErrorCode::InvalidConfig, "frame buffer capacity must be > 0");
}

void FrameBuffer::push(TelemetryFrame frame) {
  {
    std::lock_guard lock(mutex_);
    if (closed_) return;
    if (frames_.size() == capacity_) {
      if (!pending_gap_) pending_gap_ = GapMarker{frames_.front().seq, 0};
      ++pending_gap_->dropped;
      ++dropped_;
      frames_.pop_front();
    }
    frames_.push_back(std::move(frame));
  }
  ready_.notify_one();
}

std::optional<StreamItem> FrameBuffer::pop() {
  std::unique_lock lock(mutex_);
  ready_.wait(lock, [&] { return closed_ || pending_gap_ || !frames_.empty(); });
  if (pending_gap_) {
    GapMarker gap = *pending_gap_;
    pending_gap_.reset();
    return gap;
  }
  if (frames_.empty()) return std::nullopt;
  TelemetryFrame frame = std::move(frames_.front());
  frames_.pop_front();
  return frame;
}

void FrameBuffer::close() {
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
  }
  ready_.notify_all();
}

std::uint64_t FrameBuffer::dropped() const {
  std::lock_guard lock(mutex_);
  return dropped_;
}

StreamSession::StreamSession(FrameSink& sink, std::size_t capacity)
    : sink_(sink), buffer_(capacity), thread_([this] { pump(); }) {}

StreamSession::~StreamSession() { close(); }

void StreamSession::publish(const TelemetryFrame& frame) {
  if (sink_closed_) return;
  ++published_;
  buffer_.push(frame);
}

void StreamSession::close() {
  buffer_.close();
  // the loop and the connection may both close a session; only one may join
  std::lock_guard lock(close_mutex_);
  if (thread_.joinable()) thread_.join();
}

StreamStats StreamSession::stats() const {
  return {published_.load(), delivered_.load(), gaps_.load(), buffer_.dropped()};
}

void StreamSession::pump() {
  while (auto item = buffer_.pop()) {
    try {
      sink_.deliver(*item);
    } catch (const std::exception&) {
      // SinkClosed, or a transport failure that amounts to the same thing
      sink_closed_ = true;
      buffer_.close();
      // drain without delivering so pop() returns nullopt promptly
      while (buffer_.pop()) {
      }
      return;
    }
    if (std::holds_alternative<GapMarker>(*item)) {
      ++gaps_;
    } else {
      ++delivered_;
    }
  }
}

void CommandQueue::push(WireCommand command) {
  std::unique_lock lock(mutex_);
  space_.wait(lock, [&] { return closed_ || queue_.size() < capacity_; });
  if (closed_) return;
  queue_.push_back(command);
}

std::vector<WireCommand> CommandQueue::drain() {
  std::vector<WireCommand> out;
  {
    std::lock_guard lock(mutex_);
    out.assign(queue_.begin(), queue_.end());
    queue_.clear();
  }
  space_.notify_all();
  return out;
}

void CommandQueue::close() {
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
  }
  space_.notify_all();
}

ControlResolver::ControlResolver(const Config& config) : config_(config) {}

void ControlResolver::receive(const WireCommand& command, double now) {
  pending_.push_back({command, now + config_.telemetry.command_latency});
}

std::vector<OperatorCommand> ControlResolver::resolve(const Simulation& sim, double now) {
  std::vector<OperatorCommand> out;
  JointAngles targets = sim.joint_targets();
  const OperatorSettings& settings = config_.operator_settings;

  // Small tolerance so a latency of k ticks is not lost to rounding.
  const double due = now + 1e-9;
  while (!pending_.empty() && pending_.front().apply_at <= due) {
    const WireCommand cmd = pending_.front().command;
    const double stamp = pending_.front().apply_at;
    pending_.pop_front();
    switch (cmd.mode) {
      case WireMode::Teleop: {
        tracker_ = TrackerSample{cmd.joints.theta, cmd.joints.beta, stamp};
        GloveSample glove;
        glove.flex.fill(cmd.grip);
        glove.wrist_pitch = cmd.joints.alpha;
        glove.wrist_roll = cmd.joints.wrist_roll;
        glove.timestamp = stamp;
        glove_ = glove;
        teleop_active_ = true;
        OperatorCommand op = teleop_map(*tracker_, *glove_, config_.limits, settings, now);
        if (auto q = op.joint_targets()) targets = *q;
        out.push_back(std::move(op));
        break;
      }
      case WireMode::Jog: {
        teleop_active_ = false;
        JogOutcome jog = jog_step(targets, cmd.step, config_.geometry, config_.limits, settings,
                                  std::clamp(cmd.grip, 0.0, 1.0), now);
        if (!jog.accepted) {
          ++rejected_jogs_;
          break;
        }
        targets = *jog.command.joint_targets();
        out.push_back(std::move(jog.command));
        break;
      }
      case WireMode::Hold: {
        teleop_active_ = false;
        OperatorCommand hold;
        hold.mode = CommandMode::Teleop;
        hold.timestamp = now;
        hold.payload = HoldPayload{};
        out.push_back(hold);
        break;
      }
    }
  }

  if (teleop_active_ && tracker_ && glove_ && now - tracker_->timestamp > settings.stale_window) {
    OperatorCommand hold = teleop_map(*tracker_, *glove_, config_.limits, settings, now);
    out.push_back(std::move(hold));
    teleop_active_ = false;
  }
  return out;
}

SimulationLoop::SimulationLoop(Config config, LoopOptions options)
    : config_(std::move(config)), options_(options), sim_(config_), resolver_(config_) {
  if (options_.record) recorder_.emplace(config_);
}

SimulationLoop::~SimulationLoop() {
  stop();
}

std::shared_ptr<StreamSession> SimulationLoop::subscribe(FrameSink& sink) {
  auto session = std::make_shared<StreamSession>(
      sink, static_cast<std::size_t>(config_.telemetry.buffer_capacity));
  std::lock_guard lock(mutex_);
  sessions_.push_back(session);
  return session;
}

void SimulationLoop::unsubscribe(const std::shared_ptr<StreamSession>& session) {
  {
    std::lock_guard lock(mutex_);
    std::erase(sessions_, session);
  }
  if (session) session->close();
}

void SimulationLoop::submit(WireCommand command) { commands_.push(command); }

void SimulationLoop::tick_once() {
  const double now = sim_.time();
  for (const WireCommand& c : commands_.drain()) resolver_.receive(c, now);
  const std::uint64_t tick = sim_.tick();
  const std::vector<OperatorCommand> applied = resolver_.resolve(sim_, now);

  std::vector<std::shared_ptr<StreamSession>> sessions;
  TelemetryFrame frame;
  {
    std::lock_guard lock(mutex_);
    frame = sim_.step(applied);
    if (recorder_) recorder_->record(tick, applied, frame);
    sessions = sessions_;
  }
  for (const auto& s : sessions) s->publish(frame);
}

std::uint64_t SimulationLoop::run_ticks(std::uint64_t ticks) {
  for (std::uint64_t i = 0; i < ticks; ++i) tick_once();
  return ticks;
}

void SimulationLoop::start() {
  if (thread_.joinable()) return;
  thread_ = std::thread([this] { thread_main(); });
}

void SimulationLoop::thread_main() {
  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<clock::duration>(
      std::chrono::duration<double>(config_.telemetry.dt()));
  auto next = clock::now();
  std::uint64_t done = 0;
  while (!stop_requested_) {
    if (options_.max_ticks && done >= *options_.max_ticks) break;
    if (options_.paced) {
      next += period;
      std::this_thread::sleep_until(next);
    }
    tick_once();
    ++done;
  }
  finished_ = true;
}

void SimulationLoop::close_sessions() {
  std::vector<std::shared_ptr<StreamSession>> sessions;
  {
    std::lock_guard lock(mutex_);
    sessions.swap(sessions_);
  }
  for (const auto& s : sessions) s->close();
}

void SimulationLoop::wait() {
  if (thread_.joinable()) thread_.join();
}

void SimulationLoop::stop() {
  stop_requested_ = true;
  commands_.close();
  wait();
  close_sessions();
}

std::uint64_t SimulationLoop::tick() const {
  std::lock_guard lock(mutex_);
  return sim_.tick();
}

SessionRecord SimulationLoop::record() const {
  std::lock_guard lock(mutex_);
  if (!recorder_) return {};
  return recorder_->record();
}

StreamStats stream_session(const Config& config, FrameSink& sink, double rate, double duration,
                           std::size_t capacity) {
  if (!(rate > 0.0)) throw Error(ErrorCode::Validation, "stream rate must be > 0");
  Config c = config;
  c.telemetry.rate = rate;
  c.telemetry.buffer_capacity = static_cast<int>(capacity);
  SimulationLoop loop(c, {.paced = true,
                          .max_ticks = static_cast<std::uint64_t>(std::llround(duration * rate)),
                          .record = false});
  auto session = loop.subscribe(sink);
  loop.start();
  loop.wait();
  session->close();
  loop.unsubscribe(session);
  return session->stats();
}

}  // namespace aerotwin
