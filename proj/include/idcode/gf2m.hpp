#pragma once

#include <cstdint>
#include <vector>

namespace idcode::gf2m {

// Element of GF(2^m): an integer in [0, 2^m) read as a polynomial over
// GF(2) in the standard basis.
using Elem = std::uint16_t;

enum class Backend {
    zech,        // log/exp/Zech tables, built eagerly at construction
    polynomial,  // carryless multiply + reduction, no tables
};

// Discrete-log tables for a primitive generator g.
//   exp[n]  = g^n                     for n in [0, 2^m-1)
//   log[a]  = n with g^n = a          for nonzero a (index 0 unused)
//   zech[n] = Z(n) with g^Z(n) = 1 + g^n, or `sentinel` when 1 + g^n = 0
// In characteristic 2 the sentinel case is exactly n = 0.
struct ZechTable {
    std::vector<std::uint32_t> log;   // size 2^m, [0] = sentinel
    std::vector<Elem> exp;            // size 2^m - 1
    std::vector<std::uint32_t> zech;  // size 2^m - 1
    std::uint32_t sentinel = 0;       // = 2^m - 1
};

// Arithmetic in GF(2^m) for 1 <= m <= 16, modulo a fixed irreducible
// reduction polynomial. Immutable after construction; all operations are
// pure, so a Field may be shared freely across threads.
class Field {
public:
    // Field over the canonical reduction polynomial for m (the smallest
    // primitive polynomial of degree m by binary value; m = 1 uses x).
    static Field make(unsigned m, Backend backend);

    // Field over an explicit reduction polynomial. The polynomial is checked
    // for irreducibility of exact degree m; the zech backend additionally
    // requires the table generator to be primitive and throws otherwise.
    Field(unsigned m, std::uint32_t reduction_poly, Backend backend);

    unsigned m() const { return m_; }
    std::uint32_t reduction_poly() const { return poly_; }
    Backend backend() const { return backend_; }
    std::uint32_t size() const { return std::uint32_t{1} << m_; }
    std::uint32_t order() const { return size() - 1; }

    Elem add(Elem a, Elem b) const { return a ^ b; }

    Elem mul(Elem a, Elem b) const {
        if (backend_ == Backend::zech) {
            if (a == 0 || b == 0) {
                return 0;
            }
            std::uint32_t s = tables_.log[a] + tables_.log[b];
            if (s >= order()) {
                s -= order();
            }
            return tables_.exp[s];
        }
        return mul_poly(a, b);
    }

    // multiplicative inverse; throws std::domain_error for a = 0
    Elem inv(Elem a) const;

    Elem pow(Elem a, std::uint64_t e) const;

    // tables are only built for the zech backend; throws otherwise
    const ZechTable& zech_table() const;

    // Z(n) for 0 <= n < 2^m - 1; returns order() as the sentinel for
    // 1 + g^n = 0. Throws std::out_of_range outside the domain.
    std::uint32_t zech_lookup(std::uint32_t n) const;

private:
    Elem mul_poly(Elem a, Elem b) const;
    void build_tables();

    unsigned m_;
    std::uint32_t poly_;
    Backend backend_;
    ZechTable tables_;
};

// Canonical reduction polynomial for GF(2^m), 1 <= m <= 16. The table is
// self-tested (irreducibility and primitivity) the first time it is used.
std::uint32_t canonical_reduction_poly(unsigned m);

// true iff `poly` is irreducible of exact degree m over GF(2), decided by
// exhaustive divisor search (m <= 16 keeps this cheap)
bool is_irreducible(std::uint32_t poly, unsigned m);

}  // namespace idcode::gf2m
