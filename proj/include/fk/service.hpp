#pragma once

#include <atomic>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fk/kernel.hpp"
#include "fk/pde.hpp"
#include "fk/protocol.hpp"

namespace fk {

struct ServiceOptions {
    std::optional<PdeSpec> pde;  // used when a request carries no "pde" descriptor
    PropagatorConfig defaults;
    std::size_t max_payload_bytes = 64u << 20;
};

/// Request handler. Ops:
///   PING       echoes header and payload
///   PROPAGATE  header {pde?, t, dt, drift?, interpolation?, epsilon?}; payload u
///   DRIFT      header {pde?}; payload state; reply holds dim component slabs
/// Failures come back as ERROR frames {code, message}.
class Service {
public:
    explicit Service(ServiceOptions options) : options_(std::move(options)) {}

    Frame handle(const Frame& request) const;
    /// Processes frames in order until the peer closes the channel.
    void serve(Transport& transport) const;

    const ServiceOptions& options() const { return options_; }

private:
    ServiceOptions options_;
};

/// Single TCP listener with one thread per connection.
class TcpServer {
public:
    /// port 0 picks an ephemeral port (see port()). Binds 127.0.0.1 unless
    /// `any_interface` is set.
    TcpServer(const Service& service, int port, bool any_interface = false);
    ~TcpServer();
    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    int port() const { return port_; }
    /// Accept loop; returns after stop().
    void run();
    void stop();

private:
    const Service& service_;
    int listen_fd_ = -1;
    int port_ = 0;
    std::atomic<bool> stopping_{false};
    std::mutex mu_;
    std::vector<int> client_fds_;
    std::vector<std::thread> workers_;
};

/// Client side of one TCP connection.
class TcpClient {
public:
    TcpClient(const std::string& host, int port);
    ~TcpClient();
    TcpClient(const TcpClient&) = delete;
    TcpClient& operator=(const TcpClient&) = delete;

    Frame call(const Frame& request);
    void send_raw(const std::string& bytes);
    ReadResult receive();

private:
    int fd_ = -1;
};

}  // namespace fk
