#pragma once

#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "idcode/code.hpp"
#include "idcode/frame.hpp"

namespace idcode::netdemo {

enum class MsgType : std::uint8_t { challenge = 1, identity_xfer = 2, verdict = 3 };

// Every frame payload starts with a 4-byte header: type(1) ‖ seq(3, big-endian),
// then the body — a serialized challenge, an identity chunk, or a single verdict
// byte. Code parameters are agreed out of band; the body length is checked
// against them wherever the body is interpreted.
struct PduMessage {
    MsgType type = MsgType::challenge;
    std::uint32_t seq = 0;  // 24-bit sequence number pairing challenges with verdicts
    std::vector<std::uint8_t> body;
};

inline constexpr std::size_t kPduHeaderBytes = 4;
inline constexpr std::size_t kMaxChunkBytes = frame::kMaxPayload - kPduHeaderBytes;

std::vector<std::uint8_t> pdu_encode(const PduMessage& pdu);
PduMessage pdu_parse(std::span<const std::uint8_t> payload);  // throws std::invalid_argument

enum class Outcome : std::uint8_t { accept, reject, timeout };

struct ChallengeRecord {
    std::uint32_t seq = 0;
    Outcome outcome = Outcome::timeout;
    std::uint64_t latency_ns = 0;  // zero when no verdict arrived
};

struct SessionStats {
    std::uint64_t frames_sent = 0;
    std::uint64_t frames_received = 0;  // CRC-valid frames
    std::uint64_t accepts = 0;
    std::uint64_t rejects = 0;
    std::uint64_t timeouts = 0;       // sender: challenges with no verdict in time
    std::uint64_t false_rejects = 0;  // sender: reject verdicts against its own identity
    std::uint64_t crc_failures = 0;
    std::uint64_t pilot_mismatches = 0;
    std::uint64_t length_rejects = 0;
    std::uint64_t malformed = 0;  // CRC-valid frames whose PDU could not be used
    std::uint64_t identity_bytes_received = 0;
    std::vector<std::uint64_t> latency_ns;  // send-initiation to verdict-receipt
    std::vector<ChallengeRecord> records;   // identify mode, one per challenge
};

// one row per challenge: seq,outcome,latency_ns
std::string emit_stats_csv(const SessionStats& stats);

enum class SenderMode { identify, transmit_identity };

struct SenderConfig {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
    code::CodeParams params;
    code::Identity identity;
    SenderMode mode = SenderMode::identify;
    std::uint64_t count = 1;  // challenges to send in identify mode
    std::uint64_t seed = 0;
    unsigned timeout_ms = 5000;  // per-verdict wait
};

// The exact frames run_sender will write, in order: the wire image is a pure
// function of (identity, seed, mode, count). In identify mode, one CHALLENGE
// frame per count; in transmit-identity mode, the serialized identity split
// into IDENTITY_XFER chunks of at most kMaxChunkBytes.
std::vector<std::vector<std::uint8_t>> sender_frame_sequence(const SenderConfig& cfg);

// Connects, plays the frame sequence stop-and-wait (identify mode awaits the
// matching VERDICT for each challenge, with stale verdicts discarded by
// sequence number), and records per-challenge latencies.
SessionStats run_sender(const SenderConfig& cfg);

struct VerifierConfig {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;  // 0 picks an ephemeral port, see Verifier::port()
    code::CodeParams params;
    code::Identity identity;
    double flip_prob = 0.0;  // bit-flip corruption of received frames, before decoding
    std::uint64_t channel_seed = 0;
    std::size_t max_payload = frame::kMaxPayload;  // deframer cap
};

// Accepts any number of concurrent sender connections; for each CRC-valid
// CHALLENGE frame it replies with a VERDICT frame carrying the recomputed
// acceptance. Frames that fail CRC (or pilot/sync) after channel corruption
// are counted and dropped without a verdict — the sender sees a timeout.
class Verifier {
public:
    explicit Verifier(VerifierConfig cfg);
    ~Verifier();

    Verifier(const Verifier&) = delete;
    Verifier& operator=(const Verifier&) = delete;

    void start();                // bind, listen, spawn the accept loop
    std::uint16_t port() const;  // actual bound port (after start)

    // block until `n` connections have been served to completion
    void wait_connections(std::uint64_t n);

    void stop();  // close the listener and all connections, join workers

    SessionStats stats() const;

private:
    void accept_loop();
    void serve_connection(int fd, std::uint64_t conn_index);
    void handle_payload(int fd, std::span<const std::uint8_t> payload);

    VerifierConfig cfg_;
    code::CodeContext ctx_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::thread accept_thread_;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::vector<std::thread> workers_;
    std::vector<int> conn_fds_;
    std::uint64_t closed_connections_ = 0;
    bool stopping_ = false;
    SessionStats stats_;
};

// Convenience wrapper: serve exactly `connections` sender sessions, then
// stop and return the collected stats.
SessionStats run_verifier(const VerifierConfig& cfg, std::uint64_t connections);

}  // namespace idcode::netdemo
