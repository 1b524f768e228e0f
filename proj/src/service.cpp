#include "fk/service.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "fk/error.hpp"
#include "fk/propagator.hpp"

namespace fk {

namespace {

PdeSpec request_pde(const nlohmann::json& h, const ServiceOptions& opt) {
    if (h.contains("pde")) return pde_from_json(h["pde"]);
    if (opt.pde) return *opt.pde;
    throw FormatError("request has no pde descriptor and none is registered");
}

PropagatorConfig request_config(const nlohmann::json& h, const ServiceOptions& opt) {
    PropagatorConfig c = opt.defaults;
    try {
        if (h.contains("dt")) c.dt = h["dt"].get<double>();
        if (h.contains("epsilon")) c.epsilon = h["epsilon"].get<double>();
        if (h.contains("drift")) {
            const auto d = h["drift"].get<std::string>();
            if (d != "heun" && d != "euler") throw FormatError("drift must be heun or euler");
            c.drift = d == "heun" ? DriftScheme::Heun : DriftScheme::Euler;
        }
        if (h.contains("interpolation")) {
            const auto i = h["interpolation"].get<std::string>();
            if (i != "auto" && i != "off") throw FormatError("interpolation must be auto or off");
            c.interpolation = i == "auto" ? Interpolation::Auto : Interpolation::Off;
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad propagation settings: ") + e.what());
    }
    return c;
}

Field payload_field(const Frame& req, const Grid& grid) {
    if (req.payload.size() != grid.size())
        throw FormatError("payload holds " + std::to_string(req.payload.size()) +
                          " values but the grid has " + std::to_string(grid.size()) + " points");
    return Field(grid, req.payload);
}

}  // namespace

Frame Service::handle(const Frame& req) const {
    const auto& h = req.header;
    const std::string op = h.contains("op") && h["op"].is_string() ? h["op"].get<std::string>() : "";
    try {
        if (op == "PING") {
            Frame r = req;
            return r;
        }
        if (op == "PROPAGATE") {
            const PdeSpec pde = request_pde(h, options_);
            const PropagatorConfig cfg = request_config(h, options_);
            const double t = h.value("t", 0.0);
            PropagationDiagnostics diag;
            const Field out = propagate(payload_field(req, pde.grid), pde, t, cfg, &diag);
            Frame r;
            r.header = {{"op", "PROPAGATE"},
                        {"t", t + cfg.dt},
                        {"factor", diag.factor},
                        {"max_defect", diag.max_defect},
                        {"cfl_advisory", diag.cfl_advisory}};
            r.payload.assign(out.values().begin(), out.values().end());
            return r;
        }
        if (op == "DRIFT") {
            const PdeSpec pde = request_pde(h, options_);
            const Field d = drift(pde, payload_field(req, pde.grid));
            Frame r;
            r.header = {{"op", "DRIFT"}, {"components", d.components()}};
            r.payload.assign(d.values().begin(), d.values().end());
            return r;
        }
        return error_frame(error_code::unknown_op, "unknown op '" + op + "'");
    } catch (const FormatError& e) {
        return error_frame(error_code::bad_request, e.what());
    } catch (const InvalidArgument& e) {
        return error_frame(error_code::bad_request, e.what());
    } catch (const std::exception& e) {
        return error_frame(error_code::internal, e.what());
    }
}

void Service::serve(Transport& transport) const {
    for (;;) {
        ReadResult r = read_frame(transport, options_.max_payload_bytes);
        if (r.status == ReadResult::Status::Eof) return;
        if (r.status == ReadResult::Status::Error) {
            write_frame(transport, error_frame(r.code, r.message));
            // A short read means the peer is gone.
            if (r.code == error_code::bad_length && r.message.find("truncated") != std::string::npos)
                return;
            continue;
        }
        write_frame(transport, handle(r.frame));
    }
}

TcpServer::TcpServer(const Service& service, int port, bool any_interface) : service_(service) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw Error(std::string("socket: ") + std::strerror(errno));
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    addr.sin_addr.s_addr = htonl(any_interface ? INADDR_ANY : INADDR_LOOPBACK);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
        ::listen(listen_fd_, 16) < 0) {
        const std::string msg = std::strerror(errno);
        ::close(listen_fd_);
        throw Error("cannot listen on port " + std::to_string(port) + ": " + msg);
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
    stop();
    for (auto& w : workers_)
        if (w.joinable()) w.join();
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpServer::run() {
    while (!stopping_) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR) continue;
            break;
        }
        std::lock_guard lock(mu_);
        if (stopping_) {
            ::close(fd);
            break;
        }
        client_fds_.push_back(fd);
        workers_.emplace_back([this, fd] {
            FdTransport t(fd, fd);
            try {
                service_.serve(t);
            } catch (const std::exception&) {
                // Peer went away mid-write; nothing left to report to.
            }
            std::lock_guard inner(mu_);
            ::shutdown(fd, SHUT_RDWR);
        });
    }
}

void TcpServer::stop() {
    if (stopping_.exchange(true)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    std::lock_guard lock(mu_);
    for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
}

TcpClient::TcpClient(const std::string& host, int port) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res)
        throw Error("cannot resolve " + host);
    fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    const int rc = fd_ < 0 ? -1 : ::connect(fd_, res->ai_addr, res->ai_addrlen);
    ::freeaddrinfo(res);
    if (rc < 0) {
        if (fd_ >= 0) ::close(fd_);
        throw Error("cannot connect to " + host + ":" + std::to_string(port));
    }
}

TcpClient::~TcpClient() {
    if (fd_ >= 0) ::close(fd_);
}

void TcpClient::send_raw(const std::string& bytes) {
    FdTransport t(fd_, fd_);
    t.write(bytes.data(), bytes.size());
}

ReadResult TcpClient::receive() {
    FdTransport t(fd_, fd_);
    return read_frame(t, std::size_t{1} << 40);
}

Frame TcpClient::call(const Frame& request) {
    send_raw(encode_frame(request));
    ReadResult r = receive();
    if (r.status != ReadResult::Status::Ok) throw Error("no valid reply: " + r.message);
    return std::move(r.frame);
}

}  // namespace fk
