/**
 * @file server.hpp
 * @brief Telemetry server: one simulation loop, one control session and any
 *        number of observers on a single port.
 *
 * A connection speaks either the raw length-prefixed protocol or, if its
 * first bytes are an HTTP GET, the same JSON bodies as WebSocket text
 * messages. The first client message must be a hello naming the role; the
 * server answers with welcome (or reject) and then streams frames.
 */
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "aerotwin/config.hpp"
#include "aerotwin/record.hpp"
#include "aerotwin/stream.hpp"

namespace aerotwin {

struct ServerOptions {
  int port = 7450;  ///< 0 picks an ephemeral port
  std::string bind_address = "0.0.0.0";
  bool autostart = true;  ///< start ticking immediately instead of on start_simulation()
  bool paced = true;
  std::optional<std::uint64_t> max_ticks;
  bool record = false;
};

class TelemetryServer {
 public:
  /// Binds the listening socket; throws Error(PortInUse) if that fails.
  TelemetryServer(Config config, ServerOptions options);
  ~TelemetryServer();

  TelemetryServer(const TelemetryServer&) = delete;
  TelemetryServer& operator=(const TelemetryServer&) = delete;

  unsigned short port() const;

  void start_simulation();
  /// Blocks until the loop has run max_ticks (returns immediately if unbounded).
  void wait_for_simulation();
  /// Stops accepting, drains every stream and closes all connections.
  void stop();

  bool control_active() const;
  std::size_t connection_count() const;
  SessionRecord record() const;
  SimulationLoop& loop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace aerotwin
