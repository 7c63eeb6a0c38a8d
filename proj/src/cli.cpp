#include "idcode/cli.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "idcode/analysis.hpp"
#include "idcode/bench.hpp"
#include "idcode/code.hpp"
#include "idcode/netdemo.hpp"

namespace idcode::cli {

namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::uint8_t> bytes;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        bytes.insert(bytes.end(), buf, buf + in.gcount());
    return bytes;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Shared --m/--k/--delta triple; every subcommand takes the code parameters.
struct ParamOpts {
    unsigned m = 0, k = 0, delta = 0;

    void attach(CLI::App& cmd) {
        cmd.add_option("--m", m, "field exponent: the base field is GF(2^m)")
            ->required()
            ->envname("IDCODE_M");
        cmd.add_option("--k", k, "inner code dimension")->required()->envname("IDCODE_K");
        cmd.add_option("--delta", delta, "outer rate reduction exponent")
            ->required()
            ->envname("IDCODE_DELTA");
    }
    code::CodeParams params() const { return code::CodeParams(m, k, delta); }
};

std::string render_ext(const gfext::ExtElem& e) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < e.coeffs.size(); ++i) {
        if (i) out << ',';
        out << e.coeffs[i];
    }
    out << ']';
    return out.str();
}

code::Identity load_identity(const code::CodeContext& ctx, const std::string& path) {
    const std::vector<std::uint8_t> bytes = read_file(path);
    if (bytes.size() != ctx.params().identity_bytes()) {
        std::ostringstream msg;
        msg << path << " holds " << bytes.size() << " bytes but (m=" << ctx.params().m
            << ",k=" << ctx.params().k << ",delta=" << ctx.params().delta << ") needs "
            << ctx.params().identity_bytes();
        throw std::invalid_argument(std::move(msg).str());
    }
    return ctx.parse_identity(bytes);
}

void print_latency_summary(std::vector<std::uint64_t> ns) {
    if (ns.empty()) return;
    std::sort(ns.begin(), ns.end());
    std::cout << "latency_ns min=" << ns.front() << " median=" << ns[ns.size() / 2]
              << " max=" << ns.back() << '\n';
}

void print_session(const netdemo::SessionStats& s) {
    std::cout << "frames_sent=" << s.frames_sent << " frames_received=" << s.frames_received
              << " accepts=" << s.accepts << " rejects=" << s.rejects << " timeouts=" << s.timeouts
              << " false_rejects=" << s.false_rejects << '\n'
              << "crc_failures=" << s.crc_failures << " pilot_mismatches=" << s.pilot_mismatches
              << " length_rejects=" << s.length_rejects << " malformed=" << s.malformed
              << " identity_bytes_received=" << s.identity_bytes_received << '\n';
    print_latency_summary(s.latency_ns);
}

std::vector<code::CodeParams> parse_points(const std::string& points) {
    std::vector<code::CodeParams> grid;
    std::istringstream in(points);
    std::string item;
    while (std::getline(in, item, ';')) {
        if (item.empty()) continue;
        unsigned m = 0, k = 0, d = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(item);
        if (!(ss >> m >> c1 >> k >> c2 >> d) || c1 != ',' || c2 != ',' || (ss >> std::ws, !ss.eof()))
            throw std::invalid_argument("bad grid point '" + item + "', expected m,k,delta");
        grid.emplace_back(m, k, d);
    }
    if (grid.empty()) throw std::invalid_argument("empty parameter grid");
    return grid;
}

int dispatch(CLI::App& app,
             CLI::App* keygen, CLI::App* tag, CLI::App* verify, CLI::App* collide,
             CLI::App* bench_cmd, CLI::App* send, CLI::App* listen,
             ParamOpts& par,
             std::uint64_t seed, const std::string& out_path,
             const std::string& identity_file, const std::string& challenge_hex,
             std::uint64_t samples, unsigned n_challenges,
             const std::string& collide_mode, const std::string& send_mode,
             const std::string& points, double link_rate, unsigned reps, double time_budget,
             const std::string& host, std::uint16_t port, std::uint64_t count,
             double flip_prob, unsigned timeout_ms, const std::string& stats_csv,
             std::uint64_t channel_seed, std::uint64_t accept_count) {
    if (app.got_subcommand(keygen)) {
        code::CodeContext ctx(par.params());
        Rng rng(seed);
        const code::Identity id = ctx.random_identity(rng);
        write_file(out_path, ctx.serialize_identity(id));
        std::cout << "wrote " << ctx.params().identity_bytes() << " bytes ("
                  << ctx.params().identity_bits() << " bits) to " << out_path << '\n';
        return 0;
    }

    if (app.got_subcommand(tag)) {
        code::CodeContext ctx(par.params());
        const code::Identity id = load_identity(ctx, identity_file);
        Rng rng(seed);
        const code::Challenge ch = ctx.generate_challenge(id, rng);
        std::cout << "challenge=" << to_hex(ctx.serialize_challenge(ch)) << '\n'
                  << "r1=" << render_ext(ch.r1) << " r2=" << ch.r2 << " tag=" << ch.tag << '\n';
        return 0;
    }

    if (app.got_subcommand(verify)) {
        code::CodeContext ctx(par.params());
        const code::Identity id = load_identity(ctx, identity_file);
        const code::Challenge ch = ctx.parse_challenge(from_hex(challenge_hex));
        const code::VerifyResult res = ctx.verify_challenge(id, ch);
        std::cout << (res.accepted ? "accept" : "reject") << " tag=" << ch.tag
                  << " recomputed=" << res.recomputed_tag << '\n';
        return res.accepted ? 0 : 1;
    }

    if (app.got_subcommand(collide)) {
        analysis::RandomnessMode mode = analysis::RandomnessMode::distinct_r1;
        if (collide_mode == "independent")
            mode = analysis::RandomnessMode::independent;
        else if (collide_mode != "distinct-r1")
            throw std::invalid_argument("unknown randomness mode '" + collide_mode + "'");
        const analysis::CollisionExperiment exp{
            .params = par.params(),
            .n_challenges = n_challenges,
            .num_samples = samples,
            .seed = seed,
            .mode = mode,
        };
        const std::string csv = analysis::emit_collision_csv({&exp, 1});
        if (out_path.empty())
            std::cout << csv;
        else
            write_text(out_path, csv);
        return 0;
    }

    if (app.got_subcommand(bench_cmd)) {
        bench::BenchConfig cfg;
        cfg.grid = points.empty() ? std::vector{par.params()} : parse_points(points);
        cfg.link_rate_bps = link_rate;
        cfg.repetitions = reps;
        cfg.time_budget_seconds = time_budget;
        cfg.seed = seed;
        const std::string csv = bench::emit_bench_csv(bench::run_bench(cfg));
        if (out_path.empty())
            std::cout << csv;
        else
            write_text(out_path, csv);
        return 0;
    }

    if (app.got_subcommand(send)) {
        netdemo::SenderMode smode = netdemo::SenderMode::identify;
        if (send_mode == "transmit-identity")
            smode = netdemo::SenderMode::transmit_identity;
        else if (send_mode != "identify")
            throw std::invalid_argument("unknown sender mode '" + send_mode + "'");
        code::CodeContext ctx(par.params());
        const netdemo::SenderConfig cfg{
            .host = host,
            .port = port,
            .params = par.params(),
            .identity = load_identity(ctx, identity_file),
            .mode = smode,
            .count = count,
            .seed = seed,
            .timeout_ms = timeout_ms,
        };
        const netdemo::SessionStats stats = netdemo::run_sender(cfg);
        print_session(stats);
        if (!stats_csv.empty()) write_text(stats_csv, netdemo::emit_stats_csv(stats));
        return 0;
    }

    if (app.got_subcommand(listen)) {
        code::CodeContext ctx(par.params());
        netdemo::VerifierConfig cfg{
            .host = host,
            .port = port,
            .params = par.params(),
            .identity = load_identity(ctx, identity_file),
            .flip_prob = flip_prob,
            .channel_seed = channel_seed,
        };
        netdemo::Verifier verifier(cfg);
        verifier.start();
        std::cout << "listening on " << cfg.host << ':' << verifier.port() << std::endl;
        if (accept_count == 0) accept_count = ~std::uint64_t{0};  // serve until killed
        verifier.wait_connections(accept_count);
        const netdemo::SessionStats stats = verifier.stats();
        verifier.stop();
        print_session(stats);
        if (!stats_csv.empty()) write_text(stats_csv, netdemo::emit_stats_csv(stats));
        return 0;
    }

    return 2;  // unreachable: a subcommand is required
}

}  // namespace

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

std::vector<std::uint8_t> from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
    const auto nibble = [](char c) -> unsigned {
        if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
        throw std::invalid_argument(std::string("not a hex digit: '") + c + "'");
    };
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
    return out;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"identification codes over concatenated Reed-Solomon evaluation"};
    app.require_subcommand(1);

    ParamOpts par;
    std::uint64_t seed = 1;
    std::string out_path;
    std::string identity_file;
    std::string challenge_hex;
    std::uint64_t samples = 100000;
    unsigned n_challenges = 1;
    std::string collide_mode = "distinct-r1";
    std::string send_mode = "identify";
    std::string points;
    double link_rate = 20e6;
    unsigned reps = 9;
    double time_budget = 2.0;
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
    std::uint64_t count = 1;
    double flip_prob = 0.0;
    unsigned timeout_ms = 5000;
    std::string stats_csv;
    std::uint64_t channel_seed = 1;
    std::uint64_t accept_count = 1;

    const auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "deterministic RNG seed")->envname("IDCODE_SEED");
    };

    CLI::App* keygen = app.add_subcommand("keygen", "generate a uniformly random identity file");
    par.attach(*keygen);
    add_seed(keygen);
    keygen->add_option("--out", out_path, "output identity file (.id)")->required();

    CLI::App* tag = app.add_subcommand("tag", "draw randomness and print a challenge for an identity");
    par.attach(*tag);
    add_seed(tag);
    tag->add_option("--identity-file", identity_file, "packed identity file")->required();

    CLI::App* verify = app.add_subcommand("verify", "check a challenge against an identity");
    par.attach(*verify);
    verify->add_option("--identity-file", identity_file, "packed identity file")->required();
    verify->add_option("challenge", challenge_hex, "serialized challenge in hex")->required();

    CLI::App* collide = app.add_subcommand("collide", "Monte-Carlo collision experiment, CSV output");
    par.attach(*collide);
    add_seed(collide);
    collide->add_option("--samples", samples, "identities sampled")->envname("IDCODE_SAMPLES");
    collide->add_option("--n-challenges", n_challenges, "challenges each sample must satisfy")
        ->envname("IDCODE_N_CHALLENGES");
    collide->add_option("--mode", collide_mode, "randomness mode: distinct-r1 | independent");
    collide->add_option("--out", out_path, "CSV path (default: stdout)");

    CLI::App* bench_cmd = app.add_subcommand("bench", "time tag computation, CSV output");
    bench_cmd->add_option("--m", par.m, "field exponent (single grid point)")->envname("IDCODE_M");
    bench_cmd->add_option("--k", par.k, "inner code dimension")->envname("IDCODE_K");
    bench_cmd->add_option("--delta", par.delta, "outer rate reduction exponent")->envname("IDCODE_DELTA");
    bench_cmd->add_option("--points", points, "grid as m,k,delta;m,k,delta;... (overrides --m/--k/--delta)");
    add_seed(bench_cmd);
    bench_cmd->add_option("--link-rate", link_rate, "identity transmission rate, bits/s")
        ->envname("IDCODE_LINK_RATE");
    bench_cmd->add_option("--reps", reps, "timing repetitions per point (>= 3)");
    bench_cmd->add_option("--time-budget", time_budget, "skip points estimated above this many seconds")
        ->envname("IDCODE_TIME_BUDGET");
    bench_cmd->add_option("--out", out_path, "CSV path (default: stdout)");

    CLI::App* send = app.add_subcommand("send", "connect to a verifier and run the protocol");
    par.attach(*send);
    add_seed(send);
    send->add_option("--host", host, "verifier address");
    send->add_option("--port", port, "verifier port")->required();
    send->add_option("--identity-file", identity_file, "packed identity file")->required();
    send->add_option("--mode", send_mode, "identify | transmit-identity");
    send->add_option("--count", count, "challenges to send in identify mode");
    send->add_option("--timeout-ms", timeout_ms, "per-verdict wait")->envname("IDCODE_TIMEOUT_MS");
    send->add_option("--stats-csv", stats_csv, "write per-challenge records to this CSV");

    CLI::App* listen = app.add_subcommand("listen", "serve verification for incoming senders");
    par.attach(*listen);
    listen->add_option("--host", host, "bind address");
    listen->add_option("--port", port, "bind port (0 picks an ephemeral port)");
    listen->add_option("--identity-file", identity_file, "packed identity file")->required();
    listen->add_option("--flip-prob", flip_prob, "bit-flip probability applied to received frames")
        ->envname("IDCODE_FLIP_PROB");
    listen->add_option("--channel-seed", channel_seed, "bit-flip channel seed");
    listen->add_option("--accept-count", accept_count, "connections to serve before exiting (0 = forever)");
    listen->add_option("--stats-csv", stats_csv, "write per-challenge records to this CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // --help exits cleanly; flag errors are malformed input
    }

    try {
        return dispatch(app, keygen, tag, verify, collide, bench_cmd, send, listen, par, seed,
                        out_path, identity_file, challenge_hex, samples, n_challenges, collide_mode,
                        send_mode,
                        points, link_rate, reps, time_budget, host, port, count, flip_prob,
                        timeout_ms, stats_csv, channel_seed, accept_count);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace idcode::cli
