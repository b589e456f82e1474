#include "aerotwin/server.hpp"

#include <atomic>
#include <condition_variable>
#include <list>
#include <mutex>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "aerotwin/error.hpp"

namespace aerotwin {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

/// Message-level transport over either raw TCP or WebSocket.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(const Message& message) = 0;
  /// Next message, or nothing on orderly close. Throws on protocol errors.
  virtual std::optional<Message> receive() = 0;
  virtual void shutdown() = 0;
};

class TcpTransport : public Transport {
 public:
  TcpTransport(tcp::socket socket, std::string prefix)
      : socket_(std::move(socket)) {
    reader_.feed(prefix);
  }

  void send(const Message& message) override {
    const std::string bytes = encode_message(message);
    std::lock_guard lock(write_mutex_);
    asio::write(socket_, asio::buffer(bytes));
  }

  std::optional<Message> receive() override {
    for (;;) {
      if (auto body = reader_.next_body()) return decode_body(*body);
      char chunk[4096];
      boost::system::error_code ec;
      const std::size_t n = socket_.read_some(asio::buffer(chunk), ec);
      if (ec) return std::nullopt;
      reader_.feed({chunk, n});
    }
  }

  void shutdown() override {
    boost::system::error_code ec;
    socket_.shutdown(tcp::socket::shutdown_both, ec);
  }

 private:
  tcp::socket socket_;
  MessageReader reader_;
  std::mutex write_mutex_;
};

class WebSocketTransport : public Transport {
 public:
  WebSocketTransport(tcp::socket socket, const std::string& request) : ws_(std::move(socket)) {
    ws_.text(true);
    ws_.accept(asio::buffer(request));
  }

  void send(const Message& message) override {
    const std::string body = encode_body(message);
    std::lock_guard lock(write_mutex_);
    ws_.write(asio::buffer(body));
  }

  std::optional<Message> receive() override {
    beast::flat_buffer buffer;
    boost::system::error_code ec;
    ws_.read(buffer, ec);
    if (ec) return std::nullopt;
    return decode_body(beast::buffers_to_string(buffer.data()));
  }

  void shutdown() override {
    boost::system::error_code ec;
    beast::get_lowest_layer(ws_).shutdown(tcp::socket::shutdown_both, ec);
  }

 private:
  websocket::stream<tcp::socket> ws_;
  std::mutex write_mutex_;
};

/// Reads the first bytes of a connection and picks the transport.
std::unique_ptr<Transport> negotiate(tcp::socket& socket) {
  std::string prefix(4, '\0');
  asio::read(socket, asio::buffer(prefix));
  if (prefix != "GET ") return std::make_unique<TcpTransport>(std::move(socket), prefix);
  std::string request = prefix;
  asio::read_until(socket, asio::dynamic_buffer(request), "\r\n\r\n");
  return std::make_unique<WebSocketTransport>(std::move(socket), request);
}

/// Holds frames back until open(), so a client that has seen its welcome
/// gets every frame from the subscription on and never a frame before it.
class TransportSink : public FrameSink {
 public:
  explicit TransportSink(Transport& transport) : transport_(transport) {}

  void open() {
    {
      std::lock_guard lock(mutex_);
      open_ = true;
    }
    cv_.notify_all();
  }

  void deliver(const StreamItem& item) override {
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [&] { return open_; });
    }
    try {
      std::visit([&](const auto& v) { transport_.send(Message{v}); }, item);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::SinkClosed, e.what());
    }
  }

 private:
  Transport& transport_;
  std::mutex mutex_;
  std::condition_variable cv_;
  bool open_ = false;
};

}  // namespace

struct TelemetryServer::Impl {
  struct Connection {
    std::thread thread;
    std::atomic<bool> done{false};
    std::mutex mutex;
    Transport* transport = nullptr;  // valid while the thread runs
    tcp::socket* raw = nullptr;      // valid until negotiation finishes
  };

  Impl(Config cfg, ServerOptions opts)
      : config(std::move(cfg)),
        options(opts),
        loop(config, {.paced = opts.paced, .max_ticks = opts.max_ticks, .record = opts.record}),
        acceptor(io) {
    try {
      const tcp::endpoint endpoint(asio::ip::make_address(options.bind_address),
                                   static_cast<unsigned short>(options.port));
      acceptor.open(endpoint.protocol());
      acceptor.set_option(asio::socket_base::reuse_address(true));
      acceptor.bind(endpoint);
      acceptor.listen();
      bound_port = acceptor.local_endpoint().port();
    } catch (const boost::system::system_error& e) {
      throw Error(ErrorCode::PortInUse,
                  "cannot listen on port " + std::to_string(options.port) + ": " + e.what());
    }
    accept_thread = std::thread([this] { accept_loop(); });
  }

  void accept_loop() {
    while (!stopping) {
      tcp::socket socket(io);
      boost::system::error_code ec;
      acceptor.accept(socket, ec);
      if (stopping) return;
      if (ec) continue;
      std::lock_guard lock(connections_mutex);
      reap();
      auto& conn = connections.emplace_back();
      conn.thread = std::thread(
          [this, &conn, s = std::move(socket)]() mutable { serve(conn, std::move(s)); });
    }
  }

  void reap() {
    for (auto it = connections.begin(); it != connections.end();) {
      if (it->done) {
        if (it->thread.joinable()) it->thread.join();
        it = connections.erase(it);
      } else {
        ++it;
      }
    }
  }

  void serve(Connection& conn, tcp::socket socket) {
    {
      std::lock_guard lock(conn.mutex);
      conn.raw = &socket;
    }
    std::unique_ptr<Transport> transport;
    try {
      transport = negotiate(socket);
    } catch (const std::exception&) {
      finish(conn);
      return;
    }
    {
      std::lock_guard lock(conn.mutex);
      conn.raw = nullptr;
      conn.transport = transport.get();
    }
    if (stopping) transport->shutdown();

    bool is_control = false;
    std::shared_ptr<StreamSession> session;
    TransportSink sink(*transport);
    try {
      const std::optional<Message> first = transport->receive();
      const Hello* hello = first ? std::get_if<Hello>(&*first) : nullptr;
      if (!hello) {
        transport->send(Reject{"expected hello as the first message"});
      } else if (hello->role == SessionRole::Control && control_taken.exchange(true)) {
        transport->send(Reject{"a control session is already active"});
      } else {
        is_control = hello->role == SessionRole::Control;
        session = loop.subscribe(sink);
        transport->send(Welcome{hello->role, config.telemetry.rate, config.geometry,
                                config.limits, config.operator_settings.jog_step});
        sink.open();
        while (auto message = transport->receive()) {
          if (auto* command = std::get_if<WireCommand>(&*message)) {
            if (is_control) {
              loop.submit(*command);
            } else {
              transport->send(Reject{"observers cannot send commands"});
            }
          }
        }
      }
    } catch (const std::exception&) {
      // malformed input or a dead socket both end the connection
    }
    sink.open();  // a blocked delivery must fail on the closed socket, not wait forever
    if (session) loop.unsubscribe(session);
    if (is_control) control_taken = false;
    transport->shutdown();
    {
      std::lock_guard lock(conn.mutex);
      conn.transport = nullptr;
    }
    finish(conn);
  }

  void finish(Connection& conn) {
    std::lock_guard lock(conn.mutex);
    conn.raw = nullptr;
    conn.done = true;
  }

  void stop() {
    if (stopping.exchange(true)) return;
    boost::system::error_code ec;
    // close() does not wake a blocking accept() on Linux, so connect once
    {
      asio::ip::address target = acceptor.local_endpoint(ec).address();
      if (ec || target.is_unspecified()) target = asio::ip::make_address("127.0.0.1");
      tcp::socket poke(io);
      poke.connect({target, bound_port}, ec);
    }
    if (accept_thread.joinable()) accept_thread.join();
    acceptor.close(ec);
    loop.stop();
    std::lock_guard lock(connections_mutex);
    for (auto& conn : connections) {
      std::lock_guard conn_lock(conn.mutex);
      if (conn.transport) conn.transport->shutdown();
      if (conn.raw) conn.raw->shutdown(tcp::socket::shutdown_both, ec);
    }
    for (auto& conn : connections) {
      if (conn.thread.joinable()) conn.thread.join();
    }
    connections.clear();
  }

  std::size_t active_connections() {
    std::lock_guard lock(connections_mutex);
    std::size_t n = 0;
    for (const auto& conn : connections) n += conn.done ? 0 : 1;
    return n;
  }

  Config config;
  ServerOptions options;
  SimulationLoop loop;
  asio::io_context io;
  tcp::acceptor acceptor;
  unsigned short bound_port = 0;
  std::atomic<bool> stopping{false};
  std::atomic<bool> control_taken{false};
  std::thread accept_thread;
  std::mutex connections_mutex;
  std::list<Connection> connections;
};

TelemetryServer::TelemetryServer(Config config, ServerOptions options) {
  impl_ = std::make_unique<Impl>(std::move(config), options);
  if (options.autostart) impl_->loop.start();
}

TelemetryServer::~TelemetryServer() { stop(); }

unsigned short TelemetryServer::port() const { return impl_->bound_port; }

void TelemetryServer::start_simulation() { impl_->loop.start(); }

void TelemetryServer::wait_for_simulation() {
  if (impl_->options.max_ticks) impl_->loop.wait();
}

void TelemetryServer::stop() { impl_->stop(); }

bool TelemetryServer::control_active() const { return impl_->control_taken; }

std::size_t TelemetryServer::connection_count() const { return impl_->active_connections(); }

SessionRecord TelemetryServer::record() const { return impl_->loop.record(); }

SimulationLoop& TelemetryServer::loop() { return impl_->loop; }

}  // namespace aerotwin
