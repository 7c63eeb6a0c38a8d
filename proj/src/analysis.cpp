#include "idcode/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

namespace idcode::analysis {

namespace {

using code::Challenge;
using code::CodeContext;
using code::Identity;
using gf2m::Elem;

bool accepts_all(const CodeContext& ctx, const Identity& id, std::span<const Challenge> chs) {
    for (const Challenge& ch : chs) {
        if (ctx.compute_tag(id, ch.r1, ch.r2) != ch.tag) return false;
    }
    return true;
}

// evaluate the outer message polynomial only (no inner stage)
gfext::ExtElem outer_eval(const CodeContext& ctx, const Identity& id, const gfext::ExtElem& r1) {
    const unsigned k = ctx.params().k;
    const std::uint64_t dim = ctx.params().outer_dim();
    gfext::ExtElem acc{std::vector<Elem>(id.symbols.end() - k, id.symbols.end())};
    std::vector<Elem> scratch(2 * static_cast<std::size_t>(k) - 1);
    for (std::uint64_t j = dim - 1; j-- > 0;)
        ctx.ext().fused_mul_add(acc.coeffs, r1.coeffs, ctx.identity_coeff(id, j), scratch);
    return acc;
}

}  // namespace

CollisionResult run_collision_experiment(const CollisionExperiment& exp) {
    const code::CodeParams& p = exp.params;
    if (exp.n_challenges < 1) throw std::invalid_argument("n_challenges must be at least 1");
    if (exp.num_samples < 1) throw std::invalid_argument("num_samples must be at least 1");
    // there are only q^(k+1) randomness pairs, and only q^k distinct r1 values
    const unsigned pair_log2 = p.m * (p.k + 1);
    if (pair_log2 < 64 && exp.n_challenges > (std::uint64_t{1} << pair_log2))
        throw std::invalid_argument("n_challenges exceeds the q^(k+1) distinct randomness pairs");
    if (exp.mode == RandomnessMode::distinct_r1 && p.outer_len_log2() < 64 &&
        exp.n_challenges > (std::uint64_t{1} << p.outer_len_log2()))
        throw std::invalid_argument("n_challenges exceeds the q^k distinct outer positions");

    CodeContext ctx(p);
    Rng id_rng(Rng::derive(exp.seed, 0));
    const Identity reference = ctx.random_identity(id_rng);

    Rng ch_rng(Rng::derive(exp.seed, 1));
    std::vector<Challenge> challenges;
    std::set<std::vector<Elem>> seen_r1;
    while (challenges.size() < exp.n_challenges) {
        Challenge ch = ctx.generate_challenge(reference, ch_rng);
        if (exp.mode == RandomnessMode::distinct_r1 && !seen_r1.insert(ch.r1.coeffs).second)
            continue;
        challenges.push_back(std::move(ch));
    }

    Rng sample_rng(Rng::derive(exp.seed, 2));
    CollisionResult res;
    for (std::uint64_t i = 0; i < exp.num_samples; ++i) {
        Identity id = ctx.random_identity(sample_rng);
        if (accepts_all(ctx, id, challenges)) ++res.accept_count;
    }
    res.fraction = static_cast<double>(res.accept_count) / static_cast<double>(exp.num_samples);
    res.theory = std::ldexp(1.0, -static_cast<int>(p.m * exp.n_challenges));
    res.std_error = std::sqrt(res.theory * (1.0 - res.theory) / static_cast<double>(exp.num_samples));
    return res;
}

std::uint64_t exhaustive_accept_count(const code::CodeContext& ctx,
                                      std::span<const code::Challenge> challenges) {
    const std::uint64_t nbits = ctx.params().identity_bits();
    if (nbits > 24) throw std::invalid_argument("identity space too large to enumerate");
    std::uint64_t count = 0;
    const std::uint64_t total = std::uint64_t{1} << nbits;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        if (accepts_all(ctx, ctx.identity_from_index(idx), challenges)) ++count;
    }
    return count;
}

bool mds_equidistribution_check(const code::CodeContext& ctx,
                                std::span<const gfext::ExtElem> positions) {
    const code::CodeParams& p = ctx.params();
    if (positions.empty()) throw std::invalid_argument("at least one position required");
    if (positions.size() > p.outer_dim())
        throw std::invalid_argument("more positions than outer message symbols");
    std::set<std::uint64_t> distinct;
    for (const gfext::ExtElem& pos : positions) {
        if (!ctx.ext().valid(pos)) throw std::invalid_argument("position outside GF(q^k)");
        if (!distinct.insert(ctx.ext().to_index(pos)).second)
            throw std::invalid_argument("positions must be distinct");
    }
    const unsigned mk = p.outer_len_log2();
    const std::uint64_t id_bits = p.identity_bits();
    const std::uint64_t key_bits = static_cast<std::uint64_t>(mk) * positions.size();
    if (id_bits > 24 || key_bits > 24) throw std::invalid_argument("instance too large to enumerate");

    std::vector<std::uint64_t> counts(std::uint64_t{1} << key_bits, 0);
    const std::uint64_t total = std::uint64_t{1} << id_bits;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        const code::Identity id = ctx.identity_from_index(idx);
        std::uint64_t key = 0;
        for (std::size_t t = 0; t < positions.size(); ++t)
            key |= ctx.ext().to_index(outer_eval(ctx, id, positions[t])) << (mk * t);
        ++counts[key];
    }
    const std::uint64_t expected = total >> key_bits;
    return std::all_of(counts.begin(), counts.end(),
                       [expected](std::uint64_t c) { return c == expected; });
}

std::uint64_t breakeven_challenges(const code::CodeParams& params) {
    // k/(k+2) * q^(k-delta) == identity_bits / challenge_bits, so integer
    // division computes the exact floor
    return params.identity_bits() / params.challenge_bits();
}

std::string emit_collision_csv(std::span<const CollisionExperiment> grid) {
    std::ostringstream out;
    out << "m,k,delta,n_c,samples,accepts,fraction,theory,std_error\n";
    out << std::setprecision(10);
    for (const CollisionExperiment& exp : grid) {
        const CollisionResult r = run_collision_experiment(exp);
        out << exp.params.m << ',' << exp.params.k << ',' << exp.params.delta << ','
            << exp.n_challenges << ',' << exp.num_samples << ',' << r.accept_count << ','
            << r.fraction << ',' << r.theory << ',' << r.std_error << '\n';
    }
    return std::move(out).str();
}

}  // namespace idcode::analysis
