#include "idcode/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace idcode::bench {

namespace {

using Clock = std::chrono::steady_clock;

// keeps the timed compute_tag calls from being optimized away
volatile gf2m::Elem g_sink = 0;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double sample_stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// identities above this size are reported as skipped rather than materialized
constexpr std::uint64_t kMaxIdentityRamBytes = std::uint64_t{512} << 20;

BenchRow bench_point(const code::CodeParams& p, gf2m::Backend backend, const BenchConfig& cfg,
                     std::uint64_t seed) {
    BenchRow row;
    row.m = p.m;
    row.k = p.k;
    row.delta = p.delta;
    row.backend = backend;
    row.identity_bits = p.identity_bits();
    row.tx_seconds = static_cast<double>(row.identity_bits) / cfg.link_rate_bps;

    if (p.outer_dim() * p.k * sizeof(gf2m::Elem) > kMaxIdentityRamBytes) {
        row.skipped = true;
        return row;
    }

    code::CodeContext ctx(p, backend);
    Rng rng(seed);
    const code::Identity id = ctx.random_identity(rng);
    gfext::ExtElem r1;
    r1.coeffs.resize(p.k);
    for (unsigned j = 0; j < p.k; ++j) r1.coeffs[j] = static_cast<gf2m::Elem>(rng.bits(p.m));
    const gf2m::Elem r2 = static_cast<gf2m::Elem>(rng.bits(p.m));

    // warm-up run doubles as the skip estimate
    const Clock::time_point w0 = Clock::now();
    g_sink = ctx.compute_tag(id, r1, r2);
    const double estimate = seconds_since(w0);
    if (estimate > cfg.time_budget_seconds) {
        row.skipped = true;
        return row;
    }

    const std::uint64_t batch = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::ceil(cfg.min_sample_seconds / std::max(estimate, 1e-9))));
    std::vector<double> samples;
    samples.reserve(cfg.repetitions);
    for (unsigned r = 0; r < cfg.repetitions; ++r) {
        const Clock::time_point t0 = Clock::now();
        gf2m::Elem acc = 0;
        for (std::uint64_t b = 0; b < batch; ++b) acc ^= ctx.compute_tag(id, r1, r2);
        g_sink = acc;
        samples.push_back(seconds_since(t0) / static_cast<double>(batch));
    }
    row.median_tag_seconds = median_of(samples);
    row.stddev_seconds = sample_stddev(samples);
    row.end_to_end_seconds = 2.0 * row.median_tag_seconds;
    return row;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
    if (cfg.grid.empty()) throw std::invalid_argument("bench grid is empty");
    if (cfg.repetitions < 3) throw std::invalid_argument("repetitions must be at least 3");
    if (!(cfg.link_rate_bps > 0)) throw std::invalid_argument("link rate must be positive");

    std::vector<code::CodeParams> grid = cfg.grid;
    std::sort(grid.begin(), grid.end(), [](const code::CodeParams& a, const code::CodeParams& b) {
        return std::tie(a.m, a.k, a.delta) < std::tie(b.m, b.k, b.delta);
    });

    std::vector<BenchRow> rows;
    rows.reserve(grid.size() * 2);
    std::uint64_t point = 0;
    for (const code::CodeParams& p : grid) {
        for (gf2m::Backend backend : {gf2m::Backend::zech, gf2m::Backend::polynomial})
            rows.push_back(bench_point(p, backend, cfg, Rng::derive(cfg.seed, point)));
        ++point;
    }
    return rows;
}

std::string emit_bench_csv(std::span<const BenchRow> rows) {
    std::vector<BenchRow> ordered(rows.begin(), rows.end());
    std::sort(ordered.begin(), ordered.end(), [](const BenchRow& a, const BenchRow& b) {
        return std::tie(a.m, a.k, a.delta, a.backend) < std::tie(b.m, b.k, b.delta, b.backend);
    });
    std::ostringstream out;
    out << "m,k,delta,backend,median_tag_s,stddev_s,identity_bits,tx_s,end_to_end_s,skipped\n";
    out << std::setprecision(9);
    for (const BenchRow& r : ordered) {
        out << r.m << ',' << r.k << ',' << r.delta << ','
            << (r.backend == gf2m::Backend::zech ? "zech" : "polynomial") << ','
            << r.median_tag_seconds << ',' << r.stddev_seconds << ',' << r.identity_bits << ','
            << r.tx_seconds << ',' << r.end_to_end_seconds << ',' << (r.skipped ? 1 : 0) << '\n';
    }
    return std::move(out).str();
}

}  // namespace idcode::bench
