#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "idcode/gf2m.hpp"
#include "idcode/gfext.hpp"
#include "idcode/rng.hpp"

namespace idcode::code {

using gf2m::Elem;

// Parameters (m, k, delta) of the concatenated code [q, k, delta]_RS2 with
// q = 2^m: an outer [q^k, q^(k-delta)] Reed-Solomon code over GF(q^k) feeding
// an inner [q, k] Reed-Solomon code over GF(q). Requires q > k > delta >= 1.
struct CodeParams {
    unsigned m = 0;
    unsigned k = 0;
    unsigned delta = 0;

    CodeParams(unsigned m, unsigned k, unsigned delta);

    std::uint32_t q() const { return std::uint32_t{1} << m; }

    // number of outer-code message symbols = q^(k-delta); always fits: the
    // constructor rejects parameter sets whose identity size overflows 64 bits
    std::uint64_t outer_dim() const { return std::uint64_t{1} << outer_dim_log2(); }
    unsigned outer_dim_log2() const { return m * (k - delta); }

    // outer code length q^k; the log form is always available, the value only
    // when it fits in 64 bits
    unsigned outer_len_log2() const { return m * k; }
    std::uint64_t outer_len() const;

    // bits needed to define one identity: m*k * 2^(m*(k-delta))
    std::uint64_t identity_bits() const { return std::uint64_t{m} * k * outer_dim(); }
    std::uint64_t identity_bytes() const { return (identity_bits() + 7) / 8; }

    // there are 2^(identity_bits) identities: the log2 count equals the bit size
    std::uint64_t num_identities_log2() const { return identity_bits(); }

    unsigned challenge_bits() const { return m * (k + 2); }
    unsigned challenge_bytes() const { return (challenge_bits() + 7) / 8; }

    bool operator==(const CodeParams&) const = default;
};

// One identity: the outer message polynomial P_i of degree < q^(k-delta).
// `symbols` stores outer_dim coefficients back to back, each as k base-field
// symbols in ascending power order: coefficient j occupies
// symbols[j*k .. (j+1)*k). The label is local bookkeeping, never serialized.
struct Identity {
    std::vector<Elem> symbols;
    std::string label;
};

// What the encoder emits: randomness (r1, r2) plus the tag t_i(r1, r2).
struct Challenge {
    gfext::ExtElem r1;  // outer evaluation point in GF(q^k)
    Elem r2 = 0;        // inner evaluation point in GF(q)
    Elem tag = 0;
};

struct VerifyResult {
    bool accepted = false;
    Elem recomputed_tag = 0;
};

// Exact worst-case false-accept bound, a reduced fraction over 2^(m*k).
struct Rational128 {
    unsigned __int128 num = 0;
    unsigned __int128 den = 1;
    double value() const;
};

// (q^(k-delta) - 1)/q^k + (k-1)/q: distinct identities collide on at most
// q^(k-delta)-1 outer positions, and where outer symbols differ the inner
// codewords agree on at most k-1 of q positions. Throws std::overflow_error
// when m*k > 126 (the exact fraction is in lowest terms with denominator
// 2^(m*k), so it cannot be represented any smaller).
Rational128 epsilon2_bound(const CodeParams& params);

// Bundles the parameters with the base and extension fields they induce.
// Immutable after construction; all operations are const and thread-safe.
class CodeContext {
public:
    explicit CodeContext(CodeParams params, gf2m::Backend backend = gf2m::Backend::zech);

    const CodeParams& params() const { return params_; }
    const gf2m::Field& base() const { return ext_.base(); }
    const gfext::ExtField& ext() const { return ext_; }

    // t_i(r1, r2): Horner-evaluate P_i at r1 in GF(q^k), then evaluate the
    // resulting element's k coefficients as a polynomial over GF(q) at r2.
    Elem compute_tag(const Identity& id, const gfext::ExtElem& r1, Elem r2) const;

    // Streaming form: coeff(j) returns the k base symbols of the coefficient
    // of x^j and is called exactly once per j, descending from outer_dim-1
    // down to 0, so an identity larger than memory can be consumed in one
    // pass. The outer Horner loop performs outer_dim - 1 extension multiplies.
    template <class CoeffFn>
    Elem compute_tag_stream(CoeffFn&& coeff, const gfext::ExtElem& r1, Elem r2) const {
        const unsigned k = params_.k;
        const std::uint64_t dim = params_.outer_dim();
        std::vector<Elem> acc(k);
        std::vector<Elem> scratch(2 * static_cast<std::size_t>(k) - 1);
        {
            std::span<const Elem> top = coeff(dim - 1);
            std::copy(top.begin(), top.end(), acc.begin());
        }
        for (std::uint64_t j = dim - 1; j-- > 0;)
            ext_.fused_mul_add(acc, r1.coeffs, coeff(j), scratch);
        return inner_eval(acc, r2);
    }

    // Horner evaluation of k coefficients over GF(q) at r2 (k-1 multiplies)
    Elem inner_eval(std::span<const Elem> coeffs, Elem r2) const;

    // r1 and r2 drawn uniformly (k+1 m-bit draws: r1 coefficients in
    // ascending order, then r2), tag computed from the identity.
    // Deterministic given the rng seed.
    Challenge generate_challenge(const Identity& id, Rng& rng) const;

    VerifyResult verify_challenge(const Identity& id, const Challenge& ch) const;

    // Bit layouts (MSB-first packing, zero-padded to a byte boundary):
    //   identity:  outer coefficients in ascending power order, each as
    //              k m-bit symbols, coeffs[0] first
    //   challenge: r1 as k m-bit symbols, then r2 (m bits), then tag (m bits)
    std::vector<std::uint8_t> serialize_identity(const Identity& id) const;
    Identity parse_identity(std::span<const std::uint8_t> bytes) const;
    std::vector<std::uint8_t> serialize_challenge(const Challenge& ch) const;
    Challenge parse_challenge(std::span<const std::uint8_t> bytes) const;

    // uniform over all 2^(identity_bits) identities
    Identity random_identity(Rng& rng) const;

    // bijection [0, 2^identity_bits) -> identities: bit t*m..(t+1)*m of idx is
    // base symbol t (symbols ordered as in Identity). Only for identity
    // spaces that fit in 64 bits; used by exhaustive analyses.
    Identity identity_from_index(std::uint64_t idx) const;

    bool valid_identity(const Identity& id) const;
    bool valid_challenge(const Challenge& ch) const;

    std::span<const Elem> identity_coeff(const Identity& id, std::uint64_t j) const;

private:
    CodeParams params_;
    gfext::ExtField ext_;
};

}  // namespace idcode::code
