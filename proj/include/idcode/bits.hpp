#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace idcode {

// MSB-first bit packing. Symbols are written big-endian within the stream;
// the final byte is zero-padded on the right.
class BitWriter {
public:
    void put(std::uint32_t value, unsigned nbits) {
        for (unsigned i = nbits; i-- > 0;) {
            put_bit((value >> i) & 1u);
        }
    }

    void put_bit(unsigned bit) {
        if (fill_ == 0) {
            bytes_.push_back(0);
        }
        if (bit) {
            bytes_.back() |= static_cast<std::uint8_t>(1u << (7 - fill_));
        }
        fill_ = (fill_ + 1) & 7;
        ++nbits_;
    }

    void put_bytes(std::span<const std::uint8_t> data) {
        for (std::uint8_t b : data) {
            put(b, 8);
        }
    }

    std::size_t bit_count() const { return nbits_; }

    std::vector<std::uint8_t> take() {
        fill_ = 0;
        nbits_ = 0;
        return std::move(bytes_);
    }

    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
    unsigned fill_ = 0;
    std::size_t nbits_ = 0;
};

class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint32_t get(unsigned nbits) {
        std::uint32_t v = 0;
        for (unsigned i = 0; i < nbits; ++i) {
            v = (v << 1) | get_bit();
        }
        return v;
    }

    unsigned get_bit() {
        if (pos_ >= 8 * data_.size()) {
            throw std::out_of_range("bit stream exhausted");
        }
        unsigned bit = (data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1u;
        ++pos_;
        return bit;
    }

    std::size_t remaining() const { return 8 * data_.size() - pos_; }

    // true iff all bits from the cursor to the end of the stream are zero
    bool rest_is_zero() {
        while (pos_ < 8 * data_.size()) {
            if (get_bit()) {
                return false;
            }
        }
        return true;
    }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

}  // namespace idcode
