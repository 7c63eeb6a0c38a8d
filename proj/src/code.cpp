#include "idcode/code.hpp"

#include <cmath>

#include "idcode/bits.hpp"

namespace idcode::code {

CodeParams::CodeParams(unsigned m_, unsigned k_, unsigned delta_) : m(m_), k(k_), delta(delta_) {
    if (m < 1 || m > 16) throw std::invalid_argument("m must be in [1, 16]");
    if (delta < 1 || k <= delta) throw std::invalid_argument("parameters require k > delta >= 1");
    if (q() <= k) throw std::invalid_argument("parameters require q = 2^m > k");
    const unsigned dim_log2 = m * (k - delta);
    if (dim_log2 >= 64) throw std::overflow_error("identity size exceeds 64-bit arithmetic");
    const unsigned __int128 bits = static_cast<unsigned __int128>(m) * k << dim_log2;
    if (bits >> 64) throw std::overflow_error("identity size exceeds 64-bit arithmetic");
}

std::uint64_t CodeParams::outer_len() const {
    if (outer_len_log2() > 63) throw std::overflow_error("outer code length exceeds 64 bits");
    return std::uint64_t{1} << outer_len_log2();
}

namespace {

long double u128_to_ld(unsigned __int128 v) {
    return std::ldexp(static_cast<long double>(static_cast<std::uint64_t>(v >> 64)), 64) +
           static_cast<long double>(static_cast<std::uint64_t>(v));
}

}  // namespace

double Rational128::value() const { return static_cast<double>(u128_to_ld(num) / u128_to_ld(den)); }

Rational128 epsilon2_bound(const CodeParams& params) {
    const unsigned mk = params.m * params.k;
    if (mk > 126) throw std::overflow_error("epsilon2 denominator 2^(m*k) exceeds 128-bit arithmetic");
    // (q^(k-delta) - 1)/q^k + (k-1)/q over the common denominator q^k = 2^(m*k);
    // the numerator is odd, so the fraction is already in lowest terms
    Rational128 r;
    r.den = static_cast<unsigned __int128>(1) << mk;
    r.num = ((static_cast<unsigned __int128>(1) << params.outer_dim_log2()) - 1) +
            (static_cast<unsigned __int128>(params.k - 1) << (params.m * (params.k - 1)));
    return r;
}

CodeContext::CodeContext(CodeParams params, gf2m::Backend backend)
    : params_(params), ext_(gf2m::Field::make(params.m, backend), params.k) {}

bool CodeContext::valid_identity(const Identity& id) const {
    if (id.symbols.size() != params_.outer_dim() * params_.k) return false;
    for (Elem s : id.symbols)
        if (s >= params_.q()) return false;
    return true;
}

bool CodeContext::valid_challenge(const Challenge& ch) const {
    return ext_.valid(ch.r1) && ch.r2 < params_.q() && ch.tag < params_.q();
}

std::span<const Elem> CodeContext::identity_coeff(const Identity& id, std::uint64_t j) const {
    if (j >= params_.outer_dim()) throw std::out_of_range("coefficient index out of range");
    return {id.symbols.data() + j * params_.k, params_.k};
}

Elem CodeContext::inner_eval(std::span<const Elem> coeffs, Elem r2) const {
    const gf2m::Field& f = base();
    Elem t = coeffs[coeffs.size() - 1];
    for (std::size_t i = coeffs.size() - 1; i-- > 0;) t = f.add(f.mul(t, r2), coeffs[i]);
    return t;
}

Elem CodeContext::compute_tag(const Identity& id, const gfext::ExtElem& r1, Elem r2) const {
    if (!valid_identity(id)) throw std::invalid_argument("identity does not match code parameters");
    if (!ext_.valid(r1) || r2 >= params_.q()) throw std::invalid_argument("randomness outside the field");
    const Elem* s = id.symbols.data();
    const unsigned k = params_.k;
    return compute_tag_stream(
        [s, k](std::uint64_t j) { return std::span<const Elem>(s + j * k, k); }, r1, r2);
}

Challenge CodeContext::generate_challenge(const Identity& id, Rng& rng) const {
    if (!valid_identity(id)) throw std::invalid_argument("identity does not match code parameters");
    Challenge ch;
    ch.r1.coeffs.resize(params_.k);
    for (unsigned j = 0; j < params_.k; ++j)
        ch.r1.coeffs[j] = static_cast<Elem>(rng.bits(params_.m));
    ch.r2 = static_cast<Elem>(rng.bits(params_.m));
    ch.tag = compute_tag(id, ch.r1, ch.r2);
    return ch;
}

VerifyResult CodeContext::verify_challenge(const Identity& id, const Challenge& ch) const {
    if (!valid_challenge(ch)) throw std::invalid_argument("challenge does not match code parameters");
    VerifyResult res;
    res.recomputed_tag = compute_tag(id, ch.r1, ch.r2);
    res.accepted = res.recomputed_tag == ch.tag;
    return res;
}

std::vector<std::uint8_t> CodeContext::serialize_identity(const Identity& id) const {
    if (!valid_identity(id)) throw std::invalid_argument("identity does not match code parameters");
    BitWriter w;
    for (Elem s : id.symbols) w.put(s, params_.m);
    return w.take();
}

Identity CodeContext::parse_identity(std::span<const std::uint8_t> bytes) const {
    if (bytes.size() != params_.identity_bytes())
        throw std::invalid_argument("identity byte length does not match code parameters");
    BitReader r(bytes);
    Identity id;
    const std::uint64_t n = params_.outer_dim() * params_.k;
    id.symbols.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) id.symbols.push_back(static_cast<Elem>(r.get(params_.m)));
    if (!r.rest_is_zero()) throw std::invalid_argument("identity padding bits are not zero");
    return id;
}

std::vector<std::uint8_t> CodeContext::serialize_challenge(const Challenge& ch) const {
    if (!valid_challenge(ch)) throw std::invalid_argument("challenge does not match code parameters");
    BitWriter w;
    for (Elem s : ch.r1.coeffs) w.put(s, params_.m);
    w.put(ch.r2, params_.m);
    w.put(ch.tag, params_.m);
    return w.take();
}

Challenge CodeContext::parse_challenge(std::span<const std::uint8_t> bytes) const {
    if (bytes.size() != params_.challenge_bytes())
        throw std::invalid_argument("challenge byte length does not match code parameters");
    BitReader r(bytes);
    Challenge ch;
    ch.r1.coeffs.resize(params_.k);
    for (unsigned j = 0; j < params_.k; ++j) ch.r1.coeffs[j] = static_cast<Elem>(r.get(params_.m));
    ch.r2 = static_cast<Elem>(r.get(params_.m));
    ch.tag = static_cast<Elem>(r.get(params_.m));
    if (!r.rest_is_zero()) throw std::invalid_argument("challenge padding bits are not zero");
    return ch;
}

Identity CodeContext::random_identity(Rng& rng) const {
    Identity id;
    const std::uint64_t n = params_.outer_dim() * params_.k;
    id.symbols.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) id.symbols.push_back(static_cast<Elem>(rng.bits(params_.m)));
    return id;
}

Identity CodeContext::identity_from_index(std::uint64_t idx) const {
    const std::uint64_t nbits = params_.identity_bits();
    if (nbits > 64) throw std::out_of_range("identity space exceeds 64-bit indices");
    if (nbits < 64 && idx >= (std::uint64_t{1} << nbits)) throw std::out_of_range("identity index out of range");
    Identity id;
    const std::uint64_t n = params_.outer_dim() * params_.k;
    id.symbols.reserve(n);
    const std::uint64_t mask = params_.q() - 1;
    for (std::uint64_t i = 0; i < n; ++i) {
        id.symbols.push_back(static_cast<Elem>(idx & mask));
        idx >>= params_.m;
    }
    return id;
}

}  // namespace idcode::code
