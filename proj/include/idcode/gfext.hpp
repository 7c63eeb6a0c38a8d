#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "idcode/gf2m.hpp"

namespace idcode::gfext {

using gf2m::Elem;

// Element of GF(q^k): k coefficients over the base field, coeffs[j]
// multiplying x^j. The coefficient vector is what travels on the wire, so
// the representation IS the inner-code message of k base-field symbols.
struct ExtElem {
    std::vector<Elem> coeffs;

    bool operator==(const ExtElem&) const = default;
};

// GF(q^k) as polynomials of degree < k over GF(q) modulo a fixed monic
// irreducible ext_poly of degree k. Immutable after construction, safe to
// share across threads.
class ExtField {
public:
    // Selects ext_poly deterministically: the first monic irreducible of
    // degree k in a lexicographic scan with the constant term varying
    // fastest. For k = 1 this yields x, collapsing to base arithmetic.
    ExtField(gf2m::Field base, unsigned k);

    const gf2m::Field& base() const { return base_; }
    unsigned k() const { return k_; }
    unsigned bits() const { return base_.m() * k_; }  // log2 of the field size

    // k+1 coefficients, ascending powers, leading coefficient 1
    const std::vector<Elem>& ext_poly() const { return ext_poly_; }

    ExtElem zero() const { return ExtElem{std::vector<Elem>(k_, 0)}; }
    ExtElem one() const;

    ExtElem add(const ExtElem& a, const ExtElem& b) const;
    ExtElem mul(const ExtElem& a, const ExtElem& b) const;
    ExtElem pow(const ExtElem& a, std::uint64_t e) const;

    // acc <- acc * by + addend, all spans of length k; scratch needs
    // 2k-1 slots. Allocation-free core of the outer Horner pass.
    void fused_mul_add(std::span<Elem> acc, std::span<const Elem> by,
                       std::span<const Elem> addend, std::span<Elem> scratch) const;

    // Bijection between [0, q^k) and field elements: digit j of the base-q
    // expansion is coeffs[j]. Requires m*k <= 64; out-of-range indices throw.
    ExtElem from_index(std::uint64_t idx) const;
    std::uint64_t to_index(const ExtElem& a) const;

    bool valid(const ExtElem& a) const;

private:
    gf2m::Field base_;
    unsigned k_;
    std::vector<Elem> ext_poly_;
};

// true iff the monic polynomial `poly` (degree = poly.size()-1, ascending
// coefficients) is irreducible over the base field. Uses exhaustive divisor
// search for small instances and the x^(q^d) congruence test otherwise.
bool is_irreducible_over(const gf2m::Field& base, std::span<const Elem> poly);

}  // namespace idcode::gfext
