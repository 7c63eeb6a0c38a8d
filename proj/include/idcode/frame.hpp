#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "idcode/rng.hpp"

namespace idcode::frame {

// Barker-13 sync pattern, transmitted twice back to back
inline constexpr std::uint32_t kBarker13 = 0b1111100110101;
inline constexpr unsigned kSyncBits = 26;
inline constexpr std::uint32_t kSyncWord = (kBarker13 << 13) | kBarker13;

inline constexpr unsigned kPilotBits = 128;
inline constexpr std::size_t kMaxPayload = 65535;  // 16-bit length prefix

// 128-bit pilot packed MSB-first: the length-127 Gold sequence from the
// preferred pair x^7+x^3+1 / x^7+x^3+x^2+x+1 (all-ones seeds, zero relative
// shift) plus one trailing zero bit to fill the last byte.
std::span<const std::uint8_t, 16> gold_pilot();

// CRC-32, polynomial 0x04C11DB7 reflected, init and final XOR all-ones
std::uint32_t crc32(std::span<const std::uint8_t> data);

// sync(26) ‖ pilot(128) ‖ len(16, big-endian) ‖ payload ‖ CRC-32 over
// len+payload bytes, packed MSB-first and zero-padded to a byte boundary
std::vector<std::uint8_t> frame_encode(std::span<const std::uint8_t> payload);

struct DeframerStats {
    std::uint64_t frames_ok = 0;
    std::uint64_t pilot_mismatches = 0;
    std::uint64_t crc_failures = 0;
    std::uint64_t length_rejects = 0;  // length field above the configured cap
};

// Streaming bit-level decoder: scans for the sync word at every bit offset,
// validates pilot and CRC, and resynchronizes one bit past a failed match, so
// frames are recovered after arbitrary bit prefixes and corrupted neighbors.
// A frame whose length field passes the cap is awaited in full before the CRC
// decides; max_payload bounds how long a corrupted length can stall that wait.
class Deframer {
public:
    explicit Deframer(std::size_t max_payload = kMaxPayload);

    // feed bytes, returning the payloads of all frames completed by them
    std::vector<std::vector<std::uint8_t>> push(std::span<const std::uint8_t> data);

    // no more input: any partially received frame is discarded
    void finish();

    const DeframerStats& stats() const { return stats_; }

private:
    bool try_extract(std::vector<std::uint8_t>& payload_out);
    std::uint32_t peek_bits(std::size_t pos, unsigned nbits) const;
    std::size_t bits() const { return 8 * buf_.size(); }

    std::vector<std::uint8_t> buf_;
    std::size_t cursor_ = 0;  // bit index of the next scan position
    std::size_t max_payload_;
    DeframerStats stats_;
};

// Flips every bit independently with the given probability; deterministic
// for a fixed seed.
class BitFlipChannel {
public:
    BitFlipChannel(double flip_prob, std::uint64_t seed);

    void apply(std::span<std::uint8_t> bytes);

private:
    Rng rng_;
    std::uint64_t threshold_;  // flip when a 53-bit draw falls below this
};

}  // namespace idcode::frame
