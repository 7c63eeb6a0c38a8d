#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace idcode {

// Seeded uniform source. mt19937_64 is fully specified by the standard, so
// identical seeds produce identical streams on every platform, which the
// wire-determinism guarantees rely on.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // n uniform bits, 0 <= n <= 32; one engine word per draw
    std::uint32_t bits(unsigned n) {
        if (n == 0) {
            return 0;
        }
        if (n > 32) {
            throw std::invalid_argument("Rng::bits: n > 32");
        }
        return static_cast<std::uint32_t>(engine_() & ((std::uint64_t{1} << n) - 1));
    }

    // uniform in [0, bound) via rejection sampling against the next power of
    // two, so non-power-of-two bounds carry no modulo bias
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) {
            throw std::invalid_argument("Rng::below: zero bound");
        }
        if ((bound & (bound - 1)) == 0) {
            return engine_() & (bound - 1);
        }
        std::uint64_t mask = bound - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
        for (;;) {
            std::uint64_t v = engine_() & mask;
            if (v < bound) {
                return v;
            }
        }
    }

    // independent child seed for worker `stream` (splitmix64 finalizer)
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace idcode
