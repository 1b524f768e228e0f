#include "fk/protocol.hpp"

#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>

#include "fk/error.hpp"

namespace fk {

namespace {
constexpr char magic[4] = {'F', 'K', 'P', '1'};
}

std::size_t FdTransport::read(void* buf, std::size_t n) {
    auto* p = static_cast<char*>(buf);
    std::size_t got = 0;
    while (got < n) {
        const ssize_t r = ::read(in_, p + got, n - got);
        if (r == 0) break;
        if (r < 0) {
            if (errno == EINTR) continue;
            break;
        }
        got += static_cast<std::size_t>(r);
    }
    return got;
}

void FdTransport::write(const void* buf, std::size_t n) {
    const auto* p = static_cast<const char*>(buf);
    std::size_t put = 0;
    while (put < n) {
        const ssize_t w = ::write(out_, p + put, n - put);
        if (w < 0) {
            if (errno == EINTR) continue;
            throw Error(std::string("transport write failed: ") + std::strerror(errno));
        }
        put += static_cast<std::size_t>(w);
    }
}

std::size_t StreamTransport::read(void* buf, std::size_t n) {
    in_.read(static_cast<char*>(buf), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in_.gcount());
}

void StreamTransport::write(const void* buf, std::size_t n) {
    out_.write(static_cast<const char*>(buf), static_cast<std::streamsize>(n));
    out_.flush();
    if (!out_) throw Error("transport write failed");
}

std::string encode_frame(const Frame& frame) {
    nlohmann::json h = frame.header;
    h["count"] = frame.payload.size();
    h["payload_bytes"] = frame.payload.size() * sizeof(double);
    const std::string text = h.dump();
    const auto len = static_cast<std::uint32_t>(text.size());
    std::string out;
    out.reserve(8 + text.size() + frame.payload.size() * sizeof(double));
    out.append(magic, 4);
    out.append(reinterpret_cast<const char*>(&len), 4);
    out.append(text);
    out.append(reinterpret_cast<const char*>(frame.payload.data()),
               frame.payload.size() * sizeof(double));
    return out;
}

void write_frame(Transport& t, const Frame& frame) {
    const std::string bytes = encode_frame(frame);
    t.write(bytes.data(), bytes.size());
}

Frame error_frame(const std::string& code, const std::string& message) {
    Frame f;
    f.header = {{"op", "ERROR"}, {"code", code}, {"message", message}};
    return f;
}

namespace {

bool skip(Transport& t, std::uint64_t n) {
    char buf[8192];
    while (n > 0) {
        const std::size_t chunk = n < sizeof buf ? static_cast<std::size_t>(n) : sizeof buf;
        if (t.read(buf, chunk) != chunk) return false;
        n -= chunk;
    }
    return true;
}

ReadResult fail(const char* code, std::string message) {
    ReadResult r;
    r.status = ReadResult::Status::Error;
    r.code = code;
    r.message = std::move(message);
    return r;
}

}  // namespace

ReadResult read_frame(Transport& t, std::size_t max_payload_bytes, std::size_t max_header_bytes) {
    char head[8];
    const std::size_t got = t.read(head, 8);
    if (got == 0) return {};
    if (got < 8) return fail(error_code::bad_length, "truncated frame prefix");
    if (std::memcmp(head, magic, 4) != 0) return fail(error_code::bad_magic, "frame does not start with FKP1");
    std::uint32_t hlen = 0;
    std::memcpy(&hlen, head + 4, 4);
    if (hlen > max_header_bytes) {
        skip(t, hlen);
        return fail(error_code::too_large, "header exceeds " + std::to_string(max_header_bytes) + " bytes");
    }
    std::string text(hlen, '\0');
    if (t.read(text.data(), hlen) != hlen) return fail(error_code::bad_length, "truncated header");

    nlohmann::json h;
    try {
        h = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        return fail(error_code::bad_header, std::string("header is not JSON: ") + e.what());
    }
    if (!h.is_object() || !h.contains("payload_bytes") || !h["payload_bytes"].is_number_unsigned())
        return fail(error_code::bad_header, "header needs an unsigned payload_bytes field");
    const auto bytes = h["payload_bytes"].get<std::uint64_t>();
    if (bytes > max_payload_bytes) {
        skip(t, bytes);
        return fail(error_code::too_large,
                    "payload of " + std::to_string(bytes) + " bytes exceeds the cap of " +
                        std::to_string(max_payload_bytes));
    }
    std::vector<char> raw(static_cast<std::size_t>(bytes));
    if (t.read(raw.data(), raw.size()) != raw.size())
        return fail(error_code::bad_length, "truncated payload: shorter than payload_bytes");
    if (bytes % sizeof(double) != 0)
        return fail(error_code::bad_length, "payload is not a whole number of f64 values");
    const std::uint64_t n = bytes / sizeof(double);
    if (!h.contains("count") || !h["count"].is_number_unsigned() || h["count"].get<std::uint64_t>() != n)
        return fail(error_code::bad_length, "header count does not match the payload length");

    ReadResult r;
    r.status = ReadResult::Status::Ok;
    r.frame.header = std::move(h);
    r.frame.payload.resize(static_cast<std::size_t>(n));
    std::memcpy(r.frame.payload.data(), raw.data(), raw.size());
    return r;
}

}  // namespace fk
