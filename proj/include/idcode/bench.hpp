#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "idcode/code.hpp"

namespace idcode::bench {

struct BenchConfig {
    std::vector<code::CodeParams> grid;
    double link_rate_bps = 20e6;       // identity-transmission baseline rate
    unsigned repetitions = 9;          // timing samples per point, >= 3
    double time_budget_seconds = 2.0;  // skip a point when one run estimates above this
    double min_sample_seconds = 2e-3;  // batch calls until one sample spans at least this
    std::uint64_t seed = 1;
};

struct BenchRow {
    unsigned m = 0, k = 0, delta = 0;
    gf2m::Backend backend = gf2m::Backend::zech;
    bool skipped = false;
    double median_tag_seconds = 0.0;
    double stddev_seconds = 0.0;
    std::uint64_t identity_bits = 0;
    double tx_seconds = 0.0;          // identity_bits / link_rate_bps
    double end_to_end_seconds = 0.0;  // 2 * median (sender + verifier recompute)
};

// Times compute_tag on a fixed random identity and randomness for every grid
// point under both backends (identity generation and serialization excluded
// from the timed region). Two rows per point, ordered by (m, k, delta,
// backend). Single-threaded.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

// Columns: m,k,delta,backend,median_tag_s,stddev_s,identity_bits,tx_s,
// end_to_end_s,skipped — sorted by (m, k, delta, backend).
std::string emit_bench_csv(std::span<const BenchRow> rows);

}  // namespace idcode::bench
