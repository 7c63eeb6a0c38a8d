#include "idcode/gf2m.hpp"

#include <array>
#include <mutex>
#include <stdexcept>
#include <string>

namespace idcode::gf2m {

namespace {

// Smallest primitive polynomial of degree m by binary value, m = 1..16.
// Degree 1 uses x, i.e. plain mod-2 arithmetic.
constexpr std::array<std::uint32_t, 17> kCanonicalPoly = {
    0,        // unused
    0x2,      // x
    0x7,      // x^2+x+1
    0xb,      // x^3+x+1
    0x13,     // x^4+x+1
    0x25,     // x^5+x^2+1
    0x43,     // x^6+x+1
    0x83,     // x^7+x+1
    0x11d,    // x^8+x^4+x^3+x^2+1
    0x211,    // x^9+x^4+1
    0x409,    // x^10+x^3+1
    0x805,    // x^11+x^2+1
    0x1053,   // x^12+x^6+x^4+x+1
    0x201b,   // x^13+x^4+x^3+x+1
    0x402b,   // x^14+x^5+x^3+x+1
    0x8003,   // x^15+x+1
    0x1002d,  // x^16+x^5+x^3+x^2+1
};

unsigned degree(std::uint32_t p) {
    unsigned d = 0;
    while (p >> (d + 1)) {
        ++d;
    }
    return d;
}

std::uint32_t poly_mod(std::uint32_t a, std::uint32_t b) {
    unsigned db = degree(b);
    while (a != 0 && degree(a) >= db) {
        a ^= b << (degree(a) - db);
    }
    return a;
}

}  // namespace

bool is_irreducible(std::uint32_t poly, unsigned m) {
    if (m == 0 || degree(poly) != m) {
        return false;
    }
    for (unsigned d = 1; d <= m / 2; ++d) {
        for (std::uint32_t div = std::uint32_t{1} << d; div < (std::uint32_t{2} << d); ++div) {
            if (poly_mod(poly, div) == 0) {
                return false;
            }
        }
    }
    return true;
}

std::uint32_t canonical_reduction_poly(unsigned m) {
    if (m < 1 || m > 16) {
        throw std::invalid_argument("gf2m: unsupported m " + std::to_string(m) +
                                    " (supported range is 1..16)");
    }
    // one-time self-test of the embedded table
    static std::once_flag checked;
    std::call_once(checked, [] {
        for (unsigned d = 1; d <= 16; ++d) {
            if (!is_irreducible(kCanonicalPoly[d], d)) {
                throw std::logic_error("gf2m: canonical polynomial table is corrupt at degree " +
                                       std::to_string(d));
            }
        }
    });
    return kCanonicalPoly[m];
}

Field Field::make(unsigned m, Backend backend) {
    if (m < 1 || m > 16) {
        throw std::invalid_argument("gf2m: unsupported m " + std::to_string(m) +
                                    " (supported range is 1..16)");
    }
    return Field(m, canonical_reduction_poly(m), backend);
}

Field::Field(unsigned m, std::uint32_t reduction_poly, Backend backend)
    : m_(m), poly_(reduction_poly), backend_(backend) {
    if (m < 1 || m > 16) {
        throw std::invalid_argument("gf2m: unsupported m " + std::to_string(m));
    }
    if (!is_irreducible(poly_, m_)) {
        throw std::invalid_argument("gf2m: reduction polynomial is not irreducible of degree " +
                                    std::to_string(m));
    }
    if (backend_ == Backend::zech) {
        build_tables();
    }
}

Elem Field::mul_poly(Elem a, Elem b) const {
    std::uint32_t acc = 0;
    std::uint32_t aa = a;
    std::uint32_t bb = b;
    const std::uint32_t high = std::uint32_t{1} << m_;
    while (bb != 0) {
        if (bb & 1u) {
            acc ^= aa;
        }
        bb >>= 1;
        aa <<= 1;
        if (aa & high) {
            aa ^= poly_;
        }
    }
    return static_cast<Elem>(acc);
}

void Field::build_tables() {
    const std::uint32_t n = order();
    tables_.sentinel = n;
    tables_.exp.assign(n, 0);
    tables_.log.assign(size(), n);  // log of 0 stays at the sentinel
    // m = 1 has the trivial multiplicative group; x itself is the zero class
    // there, so the generator is 1
    const Elem g = (m_ == 1) ? Elem{1} : Elem{2};
    Elem cur = 1;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (tables_.log[cur] != n) {
            throw std::invalid_argument(
                "gf2m: zech backend requires a primitive generator; x has order " +
                std::to_string(i) + " < " + std::to_string(n));
        }
        tables_.exp[i] = cur;
        tables_.log[cur] = i;
        cur = mul_poly(cur, g);
    }
    if (cur != 1) {
        throw std::invalid_argument("gf2m: zech backend requires a primitive generator");
    }
    tables_.zech.assign(n, n);
    for (std::uint32_t i = 0; i < n; ++i) {
        Elem s = tables_.exp[i] ^ Elem{1};
        tables_.zech[i] = (s == 0) ? n : tables_.log[s];
    }
}

Elem Field::inv(Elem a) const {
    if (a == 0) {
        throw std::domain_error("gf2m: inverse of zero requested");
    }
    if (backend_ == Backend::zech) {
        std::uint32_t l = tables_.log[a];
        return tables_.exp[(order() - l) % order()];
    }
    return pow(a, order() - 1u);  // a^(2^m - 2)
}

Elem Field::pow(Elem a, std::uint64_t e) const {
    Elem result = 1;
    Elem base = a;
    while (e != 0) {
        if (e & 1u) {
            result = mul(result, base);
        }
        base = mul(base, base);
        e >>= 1;
    }
    return result;
}

const ZechTable& Field::zech_table() const {
    if (backend_ != Backend::zech) {
        throw std::logic_error("gf2m: zech tables not built for the polynomial backend");
    }
    return tables_;
}

std::uint32_t Field::zech_lookup(std::uint32_t n) const {
    const ZechTable& t = zech_table();
    if (n >= order()) {
        throw std::out_of_range("gf2m: zech exponent " + std::to_string(n) + " out of range");
    }
    return t.zech[n];
}

}  // namespace idcode::gf2m
