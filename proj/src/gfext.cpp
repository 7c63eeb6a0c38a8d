#include "idcode/gfext.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace idcode::gfext {

namespace {

using Poly = std::vector<Elem>;

int poly_deg(const Poly& p) {
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
        if (p[i]) return i;
    return -1;
}

void poly_trim(Poly& p) { p.resize(static_cast<std::size_t>(poly_deg(p) + 1)); }

Poly poly_mul(const gf2m::Field& f, const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (!b[j]) continue;
            out[i + j] = f.add(out[i + j], f.mul(a[i], b[j]));
        }
    }
    return out;
}

// remainder of a modulo monic divisor d (deg >= 1); char 2, so subtract = add
Poly poly_mod(const gf2m::Field& f, Poly a, const Poly& d) {
    const int dd = poly_deg(d);
    for (int i = poly_deg(a); i >= dd; --i) {
        const Elem c = a[static_cast<std::size_t>(i)];
        if (!c) continue;
        a[static_cast<std::size_t>(i)] = 0;
        for (int j = 0; j < dd; ++j)
            a[static_cast<std::size_t>(i - dd + j)] =
                f.add(a[static_cast<std::size_t>(i - dd + j)], f.mul(c, d[static_cast<std::size_t>(j)]));
    }
    a.resize(static_cast<std::size_t>(dd));
    poly_trim(a);
    return a;
}

Poly poly_gcd(const gf2m::Field& f, Poly a, Poly b) {
    poly_trim(a);
    poly_trim(b);
    while (poly_deg(b) >= 0) {
        const Elem lead = b[static_cast<std::size_t>(poly_deg(b))];
        if (lead != 1) {
            const Elem li = f.inv(lead);
            for (auto& c : b) c = f.mul(c, li);
        }
        if (poly_deg(b) == 0) return b;  // a unit divides everything
        Poly r = poly_mod(f, std::move(a), b);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

// x^(q^e) mod f, computed as m*e repeated squarings of x (q = 2^m)
Poly frobenius_power(const gf2m::Field& f, const Poly& mod, unsigned e) {
    Poly h = {0, 1};  // x; deg(mod) >= 2 whenever this is called
    const unsigned squarings = f.m() * e;
    for (unsigned s = 0; s < squarings; ++s)
        h = poly_mod(f, poly_mul(f, h, h), mod);
    return h;
}

std::vector<unsigned> prime_factors(unsigned n) {
    std::vector<unsigned> out;
    for (unsigned p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        out.push_back(p);
        while (n % p == 0) n /= p;
    }
    if (n > 1) out.push_back(n);
    return out;
}

bool poly_is_x(const Poly& p) {
    if (poly_deg(p) != 1) return false;
    return p[0] == 0 && p[1] == 1;
}

}  // namespace

bool is_irreducible_over(const gf2m::Field& base, std::span<const Elem> poly) {
    Poly f(poly.begin(), poly.end());
    const int d = poly_deg(f);
    if (d <= 0) return false;
    if (f[static_cast<std::size_t>(d)] != 1)
        throw std::invalid_argument("irreducibility test expects a monic polynomial");
    if (d == 1) return true;
    if (f[0] == 0) return false;  // divisible by x

    // count the candidate divisors an exhaustive search would touch
    const std::uint64_t q = base.size();
    std::uint64_t candidates = 0;
    bool overflow = false;
    {
        std::uint64_t qe = 1;
        for (int e = 1; e <= d / 2; ++e) {
            if (qe > (std::uint64_t{1} << 40) / q) {
                overflow = true;
                break;
            }
            qe *= q;
            candidates += qe;
            if (candidates > (std::uint64_t{1} << 18)) break;
        }
    }

    if (!overflow && candidates <= (std::uint64_t{1} << 18)) {
        // trial division by every monic polynomial of degree 1..d/2
        for (int e = 1; e <= d / 2; ++e) {
            Poly div(static_cast<std::size_t>(e) + 1, 0);
            div[static_cast<std::size_t>(e)] = 1;
            std::uint64_t limit = 1;
            for (int i = 0; i < e; ++i) limit *= q;
            for (std::uint64_t idx = 0; idx < limit; ++idx) {
                std::uint64_t t = idx;
                for (int j = 0; j < e; ++j) {
                    div[static_cast<std::size_t>(j)] = static_cast<Elem>(t % q);
                    t /= q;
                }
                if (poly_deg(poly_mod(base, f, div)) < 0) return false;
            }
        }
        return true;
    }

    // Rabin: f of degree d is irreducible iff x^(q^d) == x (mod f) and
    // gcd(x^(q^(d/p)) - x, f) is a unit for every prime p dividing d.
    const unsigned ud = static_cast<unsigned>(d);
    for (unsigned p : prime_factors(ud)) {
        Poly h = frobenius_power(base, f, ud / p);
        if (h.size() < 2) h.resize(2, 0);
        h[1] = base.add(h[1], 1);  // h - x
        Poly g = poly_gcd(base, f, std::move(h));
        if (poly_deg(g) != 0) return false;
    }
    Poly h = frobenius_power(base, f, ud);
    return poly_is_x(h);
}

ExtField::ExtField(gf2m::Field base, unsigned k) : base_(std::move(base)), k_(k) {
    if (k_ < 1) throw std::invalid_argument("extension degree k must be at least 1");
    const std::uint64_t q = base_.size();
    std::vector<Elem> cand(k_ + 1, 0);
    cand[k_] = 1;
    for (std::uint64_t idx = 0;; ++idx) {
        std::uint64_t t = idx;
        for (unsigned j = 0; j < k_; ++j) {
            cand[j] = static_cast<Elem>(t % q);
            t /= q;
        }
        if (t != 0) throw std::logic_error("no irreducible polynomial of the requested degree");
        if (is_irreducible_over(base_, cand)) {
            ext_poly_ = cand;
            return;
        }
    }
}

ExtElem ExtField::one() const {
    ExtElem e{std::vector<Elem>(k_, 0)};
    e.coeffs[0] = 1;
    return e;
}

ExtElem ExtField::add(const ExtElem& a, const ExtElem& b) const {
    ExtElem out = a;
    for (unsigned j = 0; j < k_; ++j) out.coeffs[j] = base_.add(out.coeffs[j], b.coeffs[j]);
    return out;
}

ExtElem ExtField::mul(const ExtElem& a, const ExtElem& b) const {
    ExtElem out = a;
    std::vector<Elem> zero(k_, 0);
    std::vector<Elem> scratch(2 * static_cast<std::size_t>(k_) - 1);
    fused_mul_add(out.coeffs, b.coeffs, zero, scratch);
    return out;
}

ExtElem ExtField::pow(const ExtElem& a, std::uint64_t e) const {
    ExtElem result = one();
    ExtElem square = a;
    while (e) {
        if (e & 1) result = mul(result, square);
        e >>= 1;
        if (e) square = mul(square, square);
    }
    return result;
}

void ExtField::fused_mul_add(std::span<Elem> acc, std::span<const Elem> by,
                             std::span<const Elem> addend, std::span<Elem> scratch) const {
    const unsigned k = k_;
    std::fill_n(scratch.begin(), 2 * static_cast<std::size_t>(k) - 1, Elem{0});
    for (unsigned i = 0; i < k; ++i) {
        const Elem ai = acc[i];
        if (!ai) continue;
        for (unsigned j = 0; j < k; ++j) {
            if (!by[j]) continue;
            scratch[i + j] = base_.add(scratch[i + j], base_.mul(ai, by[j]));
        }
    }
    // eliminate degrees 2k-2 .. k against the monic ext_poly
    for (unsigned i = 2 * k - 2; i >= k; --i) {  // no-op when k == 1
        const Elem c = scratch[i];
        if (c) {
            scratch[i] = 0;
            for (unsigned j = 0; j < k; ++j)
                scratch[i - k + j] = base_.add(scratch[i - k + j], base_.mul(c, ext_poly_[j]));
        }
    }
    for (unsigned i = 0; i < k; ++i) acc[i] = base_.add(scratch[i], addend[i]);
}

ExtElem ExtField::from_index(std::uint64_t idx) const {
    if (bits() > 64) throw std::out_of_range("field exceeds 64-bit index space");
    if (bits() < 64 && idx >= (std::uint64_t{1} << bits())) throw std::out_of_range("element index out of range");
    ExtElem e = zero();
    const std::uint64_t mask = base_.size() - 1;
    for (unsigned j = 0; j < k_; ++j) {
        e.coeffs[j] = static_cast<Elem>(idx & mask);
        idx >>= base_.m();
    }
    return e;
}

std::uint64_t ExtField::to_index(const ExtElem& a) const {
    if (bits() > 64) throw std::out_of_range("field exceeds 64-bit index space");
    std::uint64_t idx = 0;
    for (unsigned j = k_; j-- > 0;) idx = (idx << base_.m()) | a.coeffs[j];
    return idx;
}

bool ExtField::valid(const ExtElem& a) const {
    if (a.coeffs.size() != k_) return false;
    for (Elem c : a.coeffs)
        if (c >= base_.size()) return false;
    return true;
}

}  // namespace idcode::gfext
