#include "idcode/frame.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "idcode/bits.hpp"

namespace idcode::frame {

namespace {

std::array<std::uint8_t, 16> build_gold_pilot() {
    // Fibonacci LFSRs: state (s_t .. s_t+6) seeded all-ones, output s_t,
    // feedback s_t+7 = XOR of s_t+j over the tap exponents j of the
    // feedback polynomial x^7 + ... + x^j + ... + 1
    auto mseq = [](std::initializer_list<unsigned> taps) {
        std::array<std::uint8_t, 127> out{};
        std::array<std::uint8_t, 7> s;
        s.fill(1);
        for (std::uint8_t& bit : out) {
            bit = s[0];
            std::uint8_t fb = 0;
            for (unsigned j : taps) fb ^= s[j];
            for (unsigned i = 0; i + 1 < s.size(); ++i) s[i] = s[i + 1];
            s[6] = fb;
        }
        return out;
    };
    const auto m1 = mseq({0, 3});        // x^7 + x^3 + 1
    const auto m2 = mseq({0, 1, 2, 3});  // x^7 + x^3 + x^2 + x + 1
    BitWriter w;
    for (unsigned i = 0; i < 127; ++i) w.put_bit(m1[i] ^ m2[i]);
    w.put_bit(0);
    std::array<std::uint8_t, 16> pilot{};
    const auto& bytes = w.bytes();
    std::copy(bytes.begin(), bytes.end(), pilot.begin());
    return pilot;
}

std::array<std::uint32_t, 256> build_crc_table() {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int j = 0; j < 8; ++j) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        t[i] = c;
    }
    return t;
}

}  // namespace

std::span<const std::uint8_t, 16> gold_pilot() {
    static const std::array<std::uint8_t, 16> pilot = build_gold_pilot();
    return pilot;
}

std::uint32_t crc32(std::span<const std::uint8_t> data) {
    static const std::array<std::uint32_t, 256> table = build_crc_table();
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::uint8_t b : data) c = table[(c ^ b) & 0xFFu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

std::vector<std::uint8_t> frame_encode(std::span<const std::uint8_t> payload) {
    if (payload.size() > kMaxPayload) throw std::length_error("frame payload exceeds 16-bit length");
    std::vector<std::uint8_t> protected_bytes;
    protected_bytes.reserve(payload.size() + 2);
    protected_bytes.push_back(static_cast<std::uint8_t>(payload.size() >> 8));
    protected_bytes.push_back(static_cast<std::uint8_t>(payload.size() & 0xFF));
    protected_bytes.insert(protected_bytes.end(), payload.begin(), payload.end());

    BitWriter w;
    w.put(kSyncWord, kSyncBits);
    w.put_bytes(gold_pilot());
    w.put_bytes(protected_bytes);
    w.put(crc32(protected_bytes), 32);
    return w.take();
}

Deframer::Deframer(std::size_t max_payload) : max_payload_(max_payload) {
    if (max_payload > kMaxPayload) throw std::invalid_argument("max_payload exceeds 16-bit length");
}

std::uint32_t Deframer::peek_bits(std::size_t pos, unsigned nbits) const {
    std::uint32_t v = 0;
    for (unsigned i = 0; i < nbits; ++i, ++pos)
        v = (v << 1) | ((buf_[pos >> 3] >> (7 - (pos & 7))) & 1u);
    return v;
}

bool Deframer::try_extract(std::vector<std::uint8_t>& payload_out) {
    constexpr unsigned kHeaderBits = kSyncBits + kPilotBits + 16;
    for (;;) {
        // hunt for the sync word; positions that fail never match again
        while (cursor_ + kSyncBits <= bits() && peek_bits(cursor_, kSyncBits) != kSyncWord)
            ++cursor_;
        if (cursor_ + kHeaderBits > bits()) return false;  // need more data

        const std::size_t body = cursor_ + kSyncBits;
        bool pilot_ok = true;
        for (unsigned i = 0; i < 16 && pilot_ok; ++i)
            pilot_ok = peek_bits(body + 8 * i, 8) == gold_pilot()[i];
        if (!pilot_ok) {
            ++stats_.pilot_mismatches;
            ++cursor_;
            continue;
        }

        const std::uint32_t len = peek_bits(body + kPilotBits, 16);
        if (len > max_payload_) {
            ++stats_.length_rejects;
            ++cursor_;
            continue;
        }
        const std::size_t frame_end = cursor_ + kHeaderBits + 8 * std::size_t{len} + 32;
        if (frame_end > bits()) return false;  // wait for the rest of the frame

        std::vector<std::uint8_t> protected_bytes(len + 2);
        for (std::size_t i = 0; i < protected_bytes.size(); ++i)
            protected_bytes[i] = static_cast<std::uint8_t>(peek_bits(body + kPilotBits + 8 * i, 8));
        const std::uint32_t want = peek_bits(frame_end - 32, 32);
        if (crc32(protected_bytes) != want) {
            ++stats_.crc_failures;
            ++cursor_;
            continue;
        }

        ++stats_.frames_ok;
        payload_out.assign(protected_bytes.begin() + 2, protected_bytes.end());
        cursor_ = frame_end;
        return true;
    }
}

std::vector<std::vector<std::uint8_t>> Deframer::push(std::span<const std::uint8_t> data) {
    buf_.insert(buf_.end(), data.begin(), data.end());
    std::vector<std::vector<std::uint8_t>> out;
    std::vector<std::uint8_t> payload;
    while (try_extract(payload)) out.push_back(std::move(payload));
    // drop consumed whole bytes so the buffer stays bounded
    const std::size_t drop = cursor_ >> 3;
    if (drop) {
        buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(drop));
        cursor_ -= 8 * drop;
    }
    return out;
}

void Deframer::finish() {
    buf_.clear();
    cursor_ = 0;
}

BitFlipChannel::BitFlipChannel(double flip_prob, std::uint64_t seed) : rng_(seed) {
    if (flip_prob < 0.0 || flip_prob > 1.0) throw std::invalid_argument("flip probability outside [0, 1]");
    threshold_ = static_cast<std::uint64_t>(std::llround(flip_prob * 9007199254740992.0));  // p * 2^53
}

void BitFlipChannel::apply(std::span<std::uint8_t> bytes) {
    for (std::uint8_t& b : bytes) {
        for (unsigned bit = 0; bit < 8; ++bit) {
            if ((rng_.next_u64() >> 11) < threshold_) b ^= static_cast<std::uint8_t>(0x80u >> bit);
        }
    }
}

}  // namespace idcode::frame
