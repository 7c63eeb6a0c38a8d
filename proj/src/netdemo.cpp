#include "idcode/netdemo.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace idcode::netdemo {

namespace {

using Clock = std::chrono::steady_clock;

[[noreturn]] void throw_errno(const std::string& what) {
    throw std::runtime_error(what + ": " + std::strerror(errno));
}

sockaddr_in make_addr(const std::string& host, std::uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        throw std::invalid_argument("not an IPv4 address: " + host);
    return addr;
}

int tcp_connect(const std::string& host, std::uint16_t port) {
    const sockaddr_in addr = make_addr(host, port);
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw_errno("socket");
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
        const int saved = errno;
        ::close(fd);
        errno = saved;
        throw_errno("connect");
    }
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return fd;
}

int tcp_listen(const std::string& host, std::uint16_t port, std::uint16_t& bound_port) {
    const sockaddr_in addr = make_addr(host, port);
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw_errno("socket");
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0 ||
        ::listen(fd, 16) != 0) {
        const int saved = errno;
        ::close(fd);
        errno = saved;
        throw_errno("bind/listen");
    }
    sockaddr_in actual{};
    socklen_t len = sizeof(actual);
    if (::getsockname(fd, reinterpret_cast<sockaddr*>(&actual), &len) != 0) {
        const int saved = errno;
        ::close(fd);
        errno = saved;
        throw_errno("getsockname");
    }
    bound_port = ntohs(actual.sin_port);
    return fd;
}

void write_all(int fd, std::span<const std::uint8_t> data) {
    std::size_t off = 0;
    while (off < data.size()) {
        const ssize_t n = ::write(fd, data.data() + off, data.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno("write");
        }
        off += static_cast<std::size_t>(n);
    }
}

void merge_deframer_stats(SessionStats& stats, const frame::DeframerStats& d) {
    stats.crc_failures += d.crc_failures;
    stats.pilot_mismatches += d.pilot_mismatches;
    stats.length_rejects += d.length_rejects;
}

}  // namespace

std::vector<std::uint8_t> pdu_encode(const PduMessage& pdu) {
    if (pdu.seq > 0xFFFFFFu) throw std::invalid_argument("sequence number exceeds 24 bits");
    if (pdu.body.size() > kMaxChunkBytes) throw std::length_error("pdu body exceeds frame capacity");
    std::vector<std::uint8_t> out;
    out.reserve(kPduHeaderBytes + pdu.body.size());
    out.push_back(static_cast<std::uint8_t>(pdu.type));
    out.push_back(static_cast<std::uint8_t>(pdu.seq >> 16));
    out.push_back(static_cast<std::uint8_t>(pdu.seq >> 8));
    out.push_back(static_cast<std::uint8_t>(pdu.seq));
    out.insert(out.end(), pdu.body.begin(), pdu.body.end());
    return out;
}

PduMessage pdu_parse(std::span<const std::uint8_t> payload) {
    if (payload.size() < kPduHeaderBytes) throw std::invalid_argument("pdu shorter than its header");
    const std::uint8_t type = payload[0];
    if (type < 1 || type > 3) throw std::invalid_argument("unknown pdu type");
    PduMessage pdu;
    pdu.type = static_cast<MsgType>(type);
    pdu.seq = (std::uint32_t{payload[1]} << 16) | (std::uint32_t{payload[2]} << 8) | payload[3];
    pdu.body.assign(payload.begin() + kPduHeaderBytes, payload.end());
    return pdu;
}

std::string emit_stats_csv(const SessionStats& stats) {
    std::ostringstream out;
    out << "seq,outcome,latency_ns\n";
    for (const ChallengeRecord& r : stats.records) {
        const char* name = r.outcome == Outcome::accept   ? "accept"
                           : r.outcome == Outcome::reject ? "reject"
                                                          : "timeout";
        out << r.seq << ',' << name << ',' << r.latency_ns << '\n';
    }
    return std::move(out).str();
}

std::vector<std::vector<std::uint8_t>> sender_frame_sequence(const SenderConfig& cfg) {
    code::CodeContext ctx(cfg.params);
    std::vector<std::vector<std::uint8_t>> frames;
    PduMessage pdu;
    if (cfg.mode == SenderMode::identify) {
        if (cfg.count > 0xFFFFFFu) throw std::invalid_argument("count exceeds 24-bit sequence space");
        Rng rng(cfg.seed);
        frames.reserve(cfg.count);
        pdu.type = MsgType::challenge;
        for (std::uint64_t i = 0; i < cfg.count; ++i) {
            pdu.seq = static_cast<std::uint32_t>(i);
            pdu.body = ctx.serialize_challenge(ctx.generate_challenge(cfg.identity, rng));
            frames.push_back(frame::frame_encode(pdu_encode(pdu)));
        }
    } else {
        const std::vector<std::uint8_t> bytes = ctx.serialize_identity(cfg.identity);
        pdu.type = MsgType::identity_xfer;
        std::size_t off = 0;
        std::uint32_t seq = 0;
        while (off < bytes.size()) {
            const std::size_t chunk = std::min(kMaxChunkBytes, bytes.size() - off);
            pdu.seq = seq++;
            pdu.body.assign(bytes.begin() + static_cast<std::ptrdiff_t>(off),
                            bytes.begin() + static_cast<std::ptrdiff_t>(off + chunk));
            frames.push_back(frame::frame_encode(pdu_encode(pdu)));
            off += chunk;
        }
    }
    return frames;
}

SessionStats run_sender(const SenderConfig& cfg) {
    const std::vector<std::vector<std::uint8_t>> frames = sender_frame_sequence(cfg);
    SessionStats stats;
    const int fd = tcp_connect(cfg.host, cfg.port);
    frame::Deframer deframer;  // verdict frames arrive uncorrupted

    try {
        std::array<std::uint8_t, 4096> buf;
        for (std::uint32_t seq = 0; seq < frames.size(); ++seq) {
            const Clock::time_point t0 = Clock::now();
            write_all(fd, frames[seq]);
            ++stats.frames_sent;
            if (cfg.mode != SenderMode::identify) continue;

            ChallengeRecord rec;
            rec.seq = seq;
            rec.outcome = Outcome::timeout;
            const Clock::time_point deadline = t0 + std::chrono::milliseconds(cfg.timeout_ms);
            bool verdict_seen = false;
            while (!verdict_seen) {
                const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
                if (left.count() <= 0) break;
                pollfd pfd{fd, POLLIN, 0};
                const int pr = ::poll(&pfd, 1, static_cast<int>(left.count()));
                if (pr < 0) {
                    if (errno == EINTR) continue;
                    throw_errno("poll");
                }
                if (pr == 0) break;  // timed out
                const ssize_t n = ::read(fd, buf.data(), buf.size());
                if (n <= 0) throw std::runtime_error("connection closed by verifier");
                for (std::vector<std::uint8_t>& payload : deframer.push({buf.data(), static_cast<std::size_t>(n)})) {
                    PduMessage pdu;
                    try {
                        pdu = pdu_parse(payload);
                    } catch (const std::invalid_argument&) {
                        ++stats.malformed;
                        continue;
                    }
                    ++stats.frames_received;
                    if (pdu.type != MsgType::verdict || pdu.body.size() != 1) {
                        ++stats.malformed;
                        continue;
                    }
                    if (pdu.seq != seq) continue;  // stale verdict from a timed-out challenge
                    rec.latency_ns = static_cast<std::uint64_t>(
                        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count());
                    rec.outcome = pdu.body[0] ? Outcome::accept : Outcome::reject;
                    verdict_seen = true;
                    break;
                }
            }
            switch (rec.outcome) {
                case Outcome::accept:
                    ++stats.accepts;
                    stats.latency_ns.push_back(rec.latency_ns);
                    break;
                case Outcome::reject:
                    ++stats.rejects;
                    ++stats.false_rejects;
                    stats.latency_ns.push_back(rec.latency_ns);
                    break;
                case Outcome::timeout:
                    ++stats.timeouts;
                    break;
            }
            stats.records.push_back(rec);
        }
    } catch (...) {
        ::close(fd);
        throw;
    }
    merge_deframer_stats(stats, deframer.stats());
    ::close(fd);
    return stats;
}

Verifier::Verifier(VerifierConfig cfg) : cfg_(std::move(cfg)), ctx_(cfg_.params) {
    if (!ctx_.valid_identity(cfg_.identity))
        throw std::invalid_argument("verifier identity does not match code parameters");
}

Verifier::~Verifier() { stop(); }

void Verifier::start() {
    listen_fd_ = tcp_listen(cfg_.host, cfg_.port, port_);
    accept_thread_ = std::thread([this] { accept_loop(); });
}

std::uint16_t Verifier::port() const { return port_; }

void Verifier::accept_loop() {
    std::uint64_t conn_index = 0;
    for (;;) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR) continue;
            return;  // listener shut down
        }
        const int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        std::lock_guard lock(mu_);
        if (stopping_) {
            ::close(fd);
            return;
        }
        conn_fds_.push_back(fd);
        workers_.emplace_back([this, fd, conn_index] { serve_connection(fd, conn_index); });
        ++conn_index;
    }
}

void Verifier::serve_connection(int fd, std::uint64_t conn_index) {
    frame::Deframer deframer(cfg_.max_payload);
    frame::BitFlipChannel channel(cfg_.flip_prob, Rng::derive(cfg_.channel_seed, conn_index));
    std::array<std::uint8_t, 4096> buf;
    for (;;) {
        const ssize_t n = ::read(fd, buf.data(), buf.size());
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        std::span<std::uint8_t> chunk{buf.data(), static_cast<std::size_t>(n)};
        if (cfg_.flip_prob > 0.0) channel.apply(chunk);
        for (const std::vector<std::uint8_t>& payload : deframer.push(chunk)) handle_payload(fd, payload);
    }
    {
        std::lock_guard lock(mu_);
        merge_deframer_stats(stats_, deframer.stats());
        conn_fds_.erase(std::remove(conn_fds_.begin(), conn_fds_.end(), fd), conn_fds_.end());
        ++closed_connections_;
        cv_.notify_all();
    }
    ::close(fd);
}

void Verifier::handle_payload(int fd, std::span<const std::uint8_t> payload) {
    PduMessage pdu;
    try {
        pdu = pdu_parse(payload);
    } catch (const std::invalid_argument&) {
        std::lock_guard lock(mu_);
        ++stats_.malformed;
        return;
    }
    std::unique_lock lock(mu_);
    ++stats_.frames_received;
    switch (pdu.type) {
        case MsgType::challenge: {
            code::Challenge ch;
            try {
                ch = ctx_.parse_challenge(pdu.body);
            } catch (const std::invalid_argument&) {
                ++stats_.malformed;
                return;
            }
            const code::VerifyResult res = ctx_.verify_challenge(cfg_.identity, ch);
            res.accepted ? ++stats_.accepts : ++stats_.rejects;
            ++stats_.frames_sent;
            lock.unlock();
            PduMessage verdict;
            verdict.type = MsgType::verdict;
            verdict.seq = pdu.seq;
            verdict.body = {static_cast<std::uint8_t>(res.accepted ? 1 : 0)};
            try {
                write_all(fd, frame::frame_encode(pdu_encode(verdict)));
            } catch (const std::runtime_error&) {
                // sender went away mid-verdict; the read loop will see EOF
            }
            return;
        }
        case MsgType::identity_xfer:
            stats_.identity_bytes_received += pdu.body.size();
            return;
        case MsgType::verdict:
            ++stats_.malformed;  // verdicts are never expected inbound
            return;
    }
}

void Verifier::wait_connections(std::uint64_t n) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return closed_connections_ >= n; });
}

void Verifier::stop() {
    std::vector<std::thread> workers;
    {
        std::lock_guard lock(mu_);
        if (stopping_) return;
        stopping_ = true;
        for (int fd : conn_fds_) ::shutdown(fd, SHUT_RDWR);
        workers.swap(workers_);
    }
    if (listen_fd_ >= 0) {
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    for (std::thread& w : workers) w.join();
    std::lock_guard lock(mu_);
    for (int fd : conn_fds_) ::close(fd);
    conn_fds_.clear();
}

SessionStats Verifier::stats() const {
    std::lock_guard lock(mu_);
    return stats_;
}

SessionStats run_verifier(const VerifierConfig& cfg, std::uint64_t connections) {
    Verifier v(cfg);
    v.start();
    v.wait_connections(connections);
    SessionStats stats = v.stats();
    v.stop();
    return stats;
}

}  // namespace idcode::netdemo
