#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace fk {

// FKP1 frame: "FKP1", u32 little-endian header length, JSON header, payload
// of little-endian f64 values. The header always carries "payload_bytes"
// (framing) and "count" (number of f64 values).

struct Frame {
    nlohmann::json header = nlohmann::json::object();
    std::vector<double> payload;
};

namespace error_code {
inline constexpr const char* bad_magic = "BAD_MAGIC";
inline constexpr const char* bad_header = "BAD_HEADER";
inline constexpr const char* bad_length = "BAD_LENGTH";
inline constexpr const char* too_large = "TOO_LARGE";
inline constexpr const char* unknown_op = "UNKNOWN_OP";
inline constexpr const char* bad_request = "BAD_REQUEST";
inline constexpr const char* internal = "INTERNAL";
}  // namespace error_code

/// Byte channel the protocol runs over.
class Transport {
public:
    virtual ~Transport() = default;
    /// Reads exactly n bytes; returns the count actually read (short on EOF).
    virtual std::size_t read(void* buf, std::size_t n) = 0;
    virtual void write(const void* buf, std::size_t n) = 0;
};

/// POSIX file descriptors (stdin/stdout or a socket).
class FdTransport : public Transport {
public:
    FdTransport(int in_fd, int out_fd) : in_(in_fd), out_(out_fd) {}
    std::size_t read(void* buf, std::size_t n) override;
    void write(const void* buf, std::size_t n) override;

private:
    int in_;
    int out_;
};

/// iostreams, for in-process use and tests.
class StreamTransport : public Transport {
public:
    StreamTransport(std::istream& in, std::ostream& out) : in_(in), out_(out) {}
    std::size_t read(void* buf, std::size_t n) override;
    void write(const void* buf, std::size_t n) override;

private:
    std::istream& in_;
    std::ostream& out_;
};

std::string encode_frame(const Frame& frame);
void write_frame(Transport& t, const Frame& frame);

struct ReadResult {
    enum class Status { Ok, Eof, Error } status = Status::Eof;
    Frame frame;
    std::string code;  // set when status == Error
    std::string message;
};

/// Reads one frame. Malformed frames come back as Status::Error with the
/// stream positioned after the offending frame whenever its extent is known;
/// oversized payloads are skipped without being buffered.
ReadResult read_frame(Transport& t, std::size_t max_payload_bytes,
                      std::size_t max_header_bytes = 1 << 20);

Frame error_frame(const std::string& code, const std::string& message);

}  // namespace fk
