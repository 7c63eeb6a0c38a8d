#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "idcode/code.hpp"

namespace idcode::analysis {

// How the challenges of one experiment share randomness: distinct_r1 forces
// pairwise-distinct outer positions (the regime where acceptance is exactly
// q^-n_c); independent draws every challenge fresh, allowing repeats.
enum class RandomnessMode { distinct_r1, independent };

struct CollisionExperiment {
    code::CodeParams params;
    unsigned n_challenges = 1;
    std::uint64_t num_samples = 1;
    std::uint64_t seed = 0;
    RandomnessMode mode = RandomnessMode::distinct_r1;
};

struct CollisionResult {
    std::uint64_t accept_count = 0;
    double fraction = 0.0;   // accept_count / num_samples
    double theory = 0.0;     // q^(-n_challenges)
    double std_error = 0.0;  // sqrt(theory * (1 - theory) / num_samples)
};

// Fixes one reference identity (from the seed), generates n_challenges
// challenges from it, then counts how many of num_samples uniformly random
// identities accept all of them. Deterministic given the seed.
CollisionResult run_collision_experiment(const CollisionExperiment& exp);

// Counts identities accepting every challenge by enumerating the whole
// identity space; requires identity_bits <= 24.
std::uint64_t exhaustive_accept_count(const code::CodeContext& ctx,
                                      std::span<const code::Challenge> challenges);

// Maps every outer message through the generator columns picked by
// `positions` (distinct outer evaluation points, at most outer_dim of them)
// and reports whether every outcome vector over GF(q^k) appears equally
// often. Exhaustive: requires the identity space and the outcome space to be
// enumerable (<= 2^24 each).
bool mds_equidistribution_check(const code::CodeContext& ctx,
                                std::span<const gfext::ExtElem> positions);

// floor(k/(k+2) * q^(k-delta)): beyond this many challenges, sending the raw
// identity costs fewer bits. Equals floor(identity_bits / challenge_bits).
std::uint64_t breakeven_challenges(const code::CodeParams& params);

// Runs every experiment in the grid and renders one CSV row per experiment:
// m,k,delta,n_c,samples,accepts,fraction,theory,std_error (input order).
std::string emit_collision_csv(std::span<const CollisionExperiment> grid);

}  // namespace idcode::analysis
