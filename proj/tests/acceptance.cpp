// Acceptance run: one PASS/FAIL line per criterion, thresholds fixed below.
//
// Statistical checks run at the desk-scale profile (n = 2000, n_c = 256,
// T = 10n). Sweep and search results are also written as harness CSVs to
// --out-dir so they can be plotted.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "odma_ura/channel.hpp"
#include "odma_ura/detector.hpp"
#include "odma_ura/harness.hpp"
#include "odma_ura/io.hpp"
#include "odma_ura/polar.hpp"
#include "odma_ura/receiver.hpp"
#include "odma_ura/rng.hpp"

using namespace odma_ura;

namespace {

// Pinned thresholds.
constexpr int kRoundTripMessages = 1000;
constexpr double kRoundTripSeconds = 30.0;
constexpr int kNoiseDecodes = 10000;
constexpr double kFalseAcceptFactor = 10.0;
constexpr int kOracleSegments = 50;
constexpr int kSingleUserCases = 100;
constexpr int kSicRealizations = 20;
constexpr int kSicMaxUsers = 5;
constexpr double kSicResidualRatio = 1e-9;
constexpr int kNoiselessTrials = 100;
constexpr std::int64_t kNoiselessMissSlack = 1;
constexpr int kSweepTrials = 200;
constexpr double kSweepTarget = 0.05;
constexpr int kTrendTrials = 100;
constexpr double kInnerWindowEbN0 = 4.0;
constexpr double kEps = 0.05;
constexpr int kDeterminismTrials = 6;

const EbN0Grid kSearchGrid{3.0, 15.0, 1.0};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int prec = 4)
{
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

std::string fmt_db(const std::optional<double>& v)
{
    return v ? fmt(*v, 3) + " dB" : std::string("not found");
}

double or_inf(const std::optional<double>& v) { return v ? *v : std::numeric_limits<double>::infinity(); }

BitVector random_bits(std::mt19937_64& rng, int len)
{
    BitVector v(static_cast<std::size_t>(len));
    for (auto& b : v)
        b = static_cast<std::uint8_t>(rng() & 1u);
    return v;
}

// Non-increasing within Wilson-interval slack: each later point is either no
// worse or its interval overlaps the earlier one.
bool no_worse_within_ci(const SweepPoint& earlier, const SweepPoint& later)
{
    return later.mean_pupe <= earlier.mean_pupe || later.ci95_lo <= earlier.ci95_hi;
}

std::string describe(const SweepPoint& p)
{
    return fmt(p.eb_n0_db, 3) + " dB: " + fmt(p.mean_pupe) + " [" + fmt(p.ci95_lo) + ", " + fmt(p.ci95_hi) + "] (" +
           std::to_string(p.misses) + "/" + std::to_string(p.arrivals) + ")";
}

struct Context {
    int workers = 1;
    std::filesystem::path out_dir;
    std::map<std::string, MinEbN0Result> searches;  // shared between the load and detector checks

    const MinEbN0Result& search(const std::string& key, const SystemConfig& cfg)
    {
        auto it = searches.find(key);
        if (it == searches.end()) {
            const auto t0 = Clock::now();
            it = searches.emplace(key, find_min_eb_n0(cfg, kEps, kSearchGrid, kTrendTrials, workers)).first;
            std::cout << "    search " << key << ": " << fmt_db(it->second.eb_n0_db) << " after "
                      << it->second.evaluated.size() << " points, " << fmt(seconds_since(t0), 3) << " s\n";
            for (const auto& p : it->second.evaluated)
                std::cout << "      " << describe(p) << "\n";
        }
        return it->second;
    }

    void write_rows(const std::string& name, const std::vector<CsvRow>& rows) const
    {
        std::filesystem::create_directories(out_dir);
        io::write_csv_file((out_dir / name).string(), rows);
    }
};

Outcome polar_round_trip(Context&)
{
    std::mt19937_64 rng(1001);
    const auto t0 = Clock::now();
    int ok = 0;
    int total = 0;
    for (int n : {256, 512}) {
        const auto code = polar::construct(n, 112);
        for (int t = 0; t < kRoundTripMessages; ++t) {
            const auto m = random_bits(rng, code.message_len());
            const auto x = polar::encode(polar::crc_append(m, code), code);
            std::vector<double> llr(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                llr[i] = x[i] ? -1e3 : 1e3;
            const auto out = polar::scl_decode(llr, code, 32);
            ok += out && *out == m;
            ++total;
        }
    }
    const double secs = seconds_since(t0);
    return {ok == total && secs < kRoundTripSeconds,
            std::to_string(ok) + "/" + std::to_string(total) + " recovered (n_c 256 and 512, k=112, L=32) in " +
                fmt(secs, 3) + " s (limit " + fmt(kRoundTripSeconds) + " s)"};
}

Outcome crc_false_accept(Context&)
{
    const int list = 32;
    const auto code = polar::construct(256, 112);
    std::mt19937_64 rng(1002);
    std::normal_distribution<double> noise(0.0, 2.0);
    std::vector<double> llr(256);
    int passes = 0;
    for (int t = 0; t < kNoiseDecodes; ++t) {
        for (auto& v : llr)
            v = noise(rng);
        passes += polar::scl_decode(llr, code, list).has_value();
    }
    const double rate = static_cast<double>(passes) / kNoiseDecodes;
    const double bound = kFalseAcceptFactor * list * std::pow(2.0, -16);
    return {rate <= bound, std::to_string(passes) + "/" + std::to_string(kNoiseDecodes) + " pure-noise decodes pass (rate " +
                               fmt(rate) + ", bound " + fmt(bound) + ")"};
}

Outcome detector_oracle(Context&)
{
    auto cfg = desk_profile(5);
    const auto pm = gen_pattern_matrix(cfg);
    const auto code = make_code(cfg);
    const std::int64_t n = cfg.n;
    const std::int64_t starts = candidate_starts(cfg);
    std::mt19937_64 rng(1003);
    std::normal_distribution<double> g(0.0, 1.0);

    int tables_equal = 0;
    for (int s = 0; s < kOracleSegments; ++s) {
        std::vector<double> y(static_cast<std::size_t>(2 * n));
        for (auto& v : y)
            v = g(rng);
        const auto table = score_table(y, pm, starts, cfg.energy_metric);
        bool same = true;
        for (int i = 0; i < pm.size() && same; ++i) {
            std::vector<std::uint8_t> mask(static_cast<std::size_t>(n), 0);
            for (auto idx : pm.column(i))
                mask[static_cast<std::size_t>(idx)] = 1;
            for (std::int64_t b = 0; b < starts && same; ++b) {
                double e = 0.0;
                for (std::int64_t t = 0; t < n; ++t)
                    if (mask[static_cast<std::size_t>(t)])
                        e += std::abs(y[static_cast<std::size_t>(b + t)]);
                same = table.at(i, b) == e;
            }
        }
        tables_equal += same;
    }

    cfg.sigma2 = 0.0;
    int top_correct = 0;
    for (int c = 0; c < kSingleUserCases; ++c) {
        const auto msg = random_bits(rng, cfg.B);
        const auto start = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(starts));
        const int pattern = pattern_index_of(msg, cfg);
        std::vector<double> y(static_cast<std::size_t>(2 * n), 0.0);
        add_waveform(y, start, message_codeword(msg, code, cfg), pm.column(pattern),
                     std::sqrt(group_power(pattern, cfg)), {});
        const auto cands = detect_energy(y, pm, cfg);
        top_correct += !cands.empty() && cands[0].start == start && cands[0].pattern_index == pattern;
    }
    return {tables_equal == kOracleSegments && top_correct == kSingleUserCases,
            "score tables equal to brute force " + std::to_string(tables_equal) + "/" +
                std::to_string(kOracleSegments) + "; clean single user ranked first " + std::to_string(top_correct) +
                "/" + std::to_string(kSingleUserCases)};
}

Outcome sic_exactness(Context&)
{
    auto cfg = desk_profile(5);
    cfg.sigma2 = 0.0;
    cfg.P = 1.0;
    const auto pm = gen_pattern_matrix(cfg);
    const auto code = make_code(cfg);
    const Preamble pre;
    const ReceiverContext ctx{cfg, pm, code, pre};
    const std::int64_t outer_len = static_cast<std::int64_t>(cfg.N_s) * cfg.n;
    std::mt19937_64 rng(1004);

    int recovered = 0;
    double worst_ratio = 0.0;
    std::int64_t users = 0;
    for (int r = 0; r < kSicRealizations; ++r) {
        const int k = 1 + static_cast<int>(rng() % kSicMaxUsers);
        std::vector<Arrival> arrivals;
        for (int u = 0; u < k; ++u)
            arrivals.push_back(make_arrival(random_bits(rng, cfg.B), static_cast<std::int64_t>(rng() % cfg.T), cfg));
        users += k;
        Rng chan(static_cast<std::uint64_t>(r));
        const auto real = synthesize(arrivals, pm, code, cfg, pre, chan);
        const auto out = decode_stream(real.y, ctx);
        recovered += count_misses(out.messages, arrivals) == 0;

        // Final residual: the received signal minus every reconstructed packet.
        auto residual = real.y;
        for (const auto& e : out.entries)
            add_waveform(residual, e.abs_start, e.codeword, pm.column(e.pattern_index), std::sqrt(e.group_power), pre,
                         -1.0);
        for (const auto t0 : outer_window_starts(cfg)) {
            double pre_e = 0.0;
            double post_e = 0.0;
            for (std::int64_t t = t0; t < t0 + outer_len; ++t) {
                pre_e += real.y[static_cast<std::size_t>(t)] * real.y[static_cast<std::size_t>(t)];
                post_e += residual[static_cast<std::size_t>(t)] * residual[static_cast<std::size_t>(t)];
            }
            const double ratio = pre_e > 0.0 ? post_e / pre_e : (post_e > 0.0 ? 1.0 : 0.0);
            worst_ratio = std::max(worst_ratio, ratio);
        }
    }
    return {recovered == kSicRealizations && worst_ratio <= kSicResidualRatio,
            std::to_string(recovered) + "/" + std::to_string(kSicRealizations) + " noiseless realizations (" +
                std::to_string(users) + " users, 1.." + std::to_string(kSicMaxUsers) +
                " each) fully recovered; worst residual/pre-SIC energy over windows " + fmt(worst_ratio, 3) +
                " (limit " + fmt(kSicResidualRatio) + ")"};
}

Outcome noiseless_pupe(Context& ctx)
{
    const auto cfg = desk_profile(2);
    const auto p = run_point(cfg, 20.0, kNoiselessTrials, ctx.workers);
    return {p.misses <= kNoiselessMissSlack, "K_a=2 at 20 dB, " + std::to_string(kNoiselessTrials) + " trials: " +
                                                 std::to_string(p.misses) + " misses of " + std::to_string(p.arrivals) +
                                                 " arrivals (allowed " + std::to_string(kNoiselessMissSlack) + ")"};
}

Outcome monotone_sweep(Context& ctx)
{
    const auto cfg = desk_profile(5);
    const auto res = run_sweep(cfg, {2.0, 4.0, 6.0, 8.0}, kSweepTrials, ctx.workers);
    std::vector<CsvRow> rows;
    std::string detail;
    bool monotone = true;
    for (std::size_t k = 0; k < res.points.size(); ++k) {
        rows.push_back(make_row(cfg, res.points[k]));
        detail += (k ? "; " : "") + describe(res.points[k]);
        if (k > 0)
            monotone = monotone && no_worse_within_ci(res.points[k - 1], res.points[k]);
    }
    ctx.write_rows("sweep_ka5.csv", rows);
    const double last = res.points.back().mean_pupe;
    return {monotone && last <= kSweepTarget, "K_a=5, " + std::to_string(kSweepTrials) + " trials/point: " + detail +
                                                 "; PUPE(8 dB) " + fmt(last) + " (target " + fmt(kSweepTarget) + ")"};
}

Outcome inner_window_trend(Context& ctx)
{
    std::vector<SweepPoint> pts;
    std::vector<CsvRow> rows;
    std::string detail;
    for (int len : {2, 3, 4}) {
        auto cfg = desk_profile(5);
        cfg.inner_len_packets = len;
        pts.push_back(run_point(cfg, kInnerWindowEbN0, kTrendTrials, ctx.workers));
        rows.push_back(make_row(cfg, pts.back()));
        detail += (len > 2 ? "; " : "") + std::to_string(len) + "n " + fmt(pts.back().mean_pupe) + " [" +
                  fmt(pts.back().ci95_lo) + ", " + fmt(pts.back().ci95_hi) + "]";
    }
    ctx.write_rows("inner_window_ka5.csv", rows);
    // A longer window may not beat a shorter one beyond the CI slack.
    const bool ok = no_worse_within_ci(pts[1], pts[0]) && no_worse_within_ci(pts[2], pts[1]);
    return {ok, "K_a=5 at " + fmt(kInnerWindowEbN0) + " dB, " + std::to_string(kTrendTrials) + " trials: " + detail};
}

CsvRow min_row(const SystemConfig& cfg, const MinEbN0Result& r)
{
    return make_row(cfg, r.evaluated.back());
}

Outcome detector_trend(Context& ctx)
{
    const auto energy_cfg = desk_profile(5);
    auto pre_cfg = desk_profile(5);
    pre_cfg.detector_mode = DetectorMode::PreambleCorrelation;
    pre_cfg.n_p = 256;
    const auto& e = ctx.search("energy ka=5", energy_cfg);
    const auto& p = ctx.search("preamble ka=5", pre_cfg);
    std::vector<CsvRow> rows;
    if (e.eb_n0_db)
        rows.push_back(min_row(energy_cfg, e));
    if (p.eb_n0_db)
        rows.push_back(min_row(pre_cfg, p));
    ctx.write_rows("minebn0_detector.csv", rows);
    const bool ok = e.eb_n0_db.has_value() && or_inf(e.eb_n0_db) <= or_inf(p.eb_n0_db);
    std::string gap = (e.eb_n0_db && p.eb_n0_db) ? fmt(*p.eb_n0_db - *e.eb_n0_db, 3) + " dB" : "n/a";
    return {ok, "required Eb/N0 at PUPE " + fmt(kEps) + ", K_a=5: energy " + fmt_db(e.eb_n0_db) + ", preamble " +
                    fmt_db(p.eb_n0_db) + " (measured gap " + gap + ")"};
}

Outcome load_trend(Context& ctx)
{
    std::vector<std::optional<double>> mins;
    std::vector<CsvRow> rows;
    std::string detail;
    for (double ka : {2.0, 5.0, 10.0}) {
        const auto cfg = desk_profile(ka);
        const auto& r = ctx.search("energy ka=" + fmt(ka), cfg);
        mins.push_back(r.eb_n0_db);
        if (r.eb_n0_db)
            rows.push_back(min_row(cfg, r));
        detail += (detail.empty() ? "" : ", ") + std::string("K_a=") + fmt(ka) + " " + fmt_db(r.eb_n0_db);
    }
    ctx.write_rows("minebn0_load.csv", rows);
    const bool ok = mins[0].has_value() && or_inf(mins[0]) <= or_inf(mins[1]) && or_inf(mins[1]) <= or_inf(mins[2]);
    return {ok, "required Eb/N0 at PUPE " + fmt(kEps) + ": " + detail};
}

Outcome determinism(Context& ctx)
{
    const auto cfg = desk_profile(2);
    auto csv_for = [&](int workers) {
        const auto res = run_sweep(cfg, {3.0, 6.0}, kDeterminismTrials, workers);
        std::vector<CsvRow> rows;
        for (const auto& p : res.points)
            rows.push_back(make_row(cfg, p));
        std::ostringstream os;
        io::write_csv(os, rows);
        return os.str();
    };
    const auto a = csv_for(1);
    const auto b = csv_for(1);
    const auto c = csv_for(3);
    return {a == b && a == c, "sweep CSV with 1, 1 and 3 workers: " + std::string(a == b && a == c ? "byte-identical" : "differs") +
                                  " (" + std::to_string(a.size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"odma_ura acceptance run"};
    Context ctx;
    std::string out_dir = "acceptance_out";
    std::vector<int> only;
    app.add_option("--workers", ctx.workers, "worker threads for Monte Carlo trials")->check(CLI::PositiveNumber);
    app.add_option("--out-dir", out_dir, "directory for the CSVs of the statistical checks");
    app.add_option("--only", only, "run only these criteria")->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    ctx.out_dir = out_dir;

    const std::vector<std::pair<std::string, std::function<Outcome(Context&)>>> criteria = {
        {"polar round-trip", polar_round_trip},
        {"CRC false-accept", crc_false_accept},
        {"detector oracle", detector_oracle},
        {"SIC exactness", sic_exactness},
        {"noiseless end-to-end PUPE", noiseless_pupe},
        {"monotone Eb/N0 sweep", monotone_sweep},
        {"inner window length trend", inner_window_trend},
        {"energy vs preamble detection", detector_trend},
        {"load trend", load_trend},
        {"determinism across worker counts", determinism},
    };

    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end())
            continue;
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[k].second(ctx);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << id << "  " << criteria[k].first
                  << ": " << o.detail << "  [" << fmt(seconds_since(t0), 3) << " s]" << std::endl;
    }
    std::cout << (failed ? "acceptance: " + std::to_string(failed) + " failed" : std::string("acceptance: all passed"))
              << std::endl;
    return failed ? 1 : 0;
}
