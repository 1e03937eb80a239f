#include "odma_ura/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "odma_ura/rng.hpp"

namespace odma_ura {

namespace {

const SystemConfig& validated(const SystemConfig& cfg)
{
    validate(cfg);
    return cfg;
}

}  // namespace

Simulation::Simulation(SystemConfig cfg)
    : cfg_(validated(cfg)),
      patterns_(gen_pattern_matrix(cfg_)),
      code_(make_code(cfg_)),
      preamble_(gen_preamble(cfg_))
{
}

std::uint64_t Simulation::trial_seed(std::uint64_t trial_index) const
{
    return derive_seed(cfg_.seed, Stream::Trial, trial_index);
}

ChannelRealization Simulation::realize(std::uint64_t trial_index) const
{
    Rng rng(trial_seed(trial_index));
    const auto arrivals = draw_arrivals(cfg_, rng);
    return synthesize(arrivals, patterns_, code_, cfg_, preamble_, rng);
}

TrialResult Simulation::run_trial(std::uint64_t trial_index) const
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto realization = realize(trial_index);
    const auto decoded = decode_stream(realization.y, context());

    TrialResult r;
    r.seed = trial_seed(trial_index);
    r.trial_index = trial_index;
    r.K_aT = static_cast<std::int64_t>(realization.arrivals.size());
    r.decoded_count = static_cast<std::int64_t>(decoded.messages.size());
    r.misses = count_misses(decoded.messages, realization.arrivals);
    r.pupe = compute_pupe(decoded.messages, realization.arrivals);

    std::set<BitVector> truth;
    for (const auto& a : realization.arrivals) {
        truth.insert(a.message);
        if (!decoded.tested.contains({a.delta, a.pattern_index}))
            ++r.detection_miss_count;
    }
    for (const auto& m : decoded.messages)
        if (!truth.contains(m))
            ++r.false_decodes;

    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

TrialResult run_trial(const SystemConfig& cfg, std::uint64_t master_seed, std::uint64_t trial_index)
{
    SystemConfig c = cfg;
    c.seed = master_seed;
    return Simulation(c).run_trial(trial_index);
}

std::vector<TrialResult> run_trials(const Simulation& sim, int trials, int workers)
{
    if (trials <= 0)
        throw std::invalid_argument("no trials");
    std::vector<TrialResult> results(static_cast<std::size_t>(trials));
    const int threads = std::max(1, std::min(workers, trials));
    if (threads == 1) {
        for (int i = 0; i < trials; ++i)
            results[static_cast<std::size_t>(i)] = sim.run_trial(static_cast<std::uint64_t>(i));
        return results;
    }
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < trials; i = next++)
                results[static_cast<std::size_t>(i)] = sim.run_trial(static_cast<std::uint64_t>(i));
        });
    pool.clear();
    return results;
}

std::pair<double, double> wilson_interval(std::int64_t k, std::int64_t n, double z)
{
    if (n <= 0)
        return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    const double lo = k == 0 ? 0.0 : std::max(0.0, centre - half);
    const double hi = k == n ? 1.0 : std::min(1.0, centre + half);
    return {lo, hi};
}

PooledPupe pool_pupe(const std::vector<TrialResult>& trials)
{
    PooledPupe p;
    for (const auto& t : trials) {
        p.arrivals += t.K_aT;
        p.misses += t.misses;
    }
    p.pupe = p.arrivals > 0 ? static_cast<double>(p.misses) / static_cast<double>(p.arrivals) : 0.0;
    std::tie(p.ci_lo, p.ci_hi) = wilson_interval(p.misses, p.arrivals);
    return p;
}

SweepPoint run_point(const SystemConfig& cfg, double eb_n0_db, int trials, int workers)
{
    const Simulation sim(at_eb_n0(cfg, eb_n0_db));
    const auto pooled = pool_pupe(run_trials(sim, trials, workers));
    return {eb_n0_db, trials, pooled.arrivals, pooled.misses, pooled.pupe, pooled.ci_lo, pooled.ci_hi};
}

SweepResult run_sweep(const SystemConfig& cfg, const std::vector<double>& eb_n0_list, int trials, int workers)
{
    if (trials <= 0)
        throw std::invalid_argument("no trials");
    if (eb_n0_list.empty())
        throw std::invalid_argument("empty Eb/N0 list");
    validate(cfg);
    SweepResult out;
    out.config = cfg;
    auto points = eb_n0_list;
    std::sort(points.begin(), points.end());
    for (double eb : points)
        out.points.push_back(run_point(cfg, eb, trials, workers));
    return out;
}

std::vector<double> EbN0Grid::points() const
{
    if (!(step > 0.0) || hi < lo)
        throw std::invalid_argument("Eb/N0 grid needs lo <= hi and step > 0");
    std::vector<double> out;
    for (int i = 0;; ++i) {
        const double v = lo + i * step;
        if (v > hi + 1e-9 * std::max(1.0, std::abs(hi)))
            break;
        out.push_back(v);
    }
    return out;
}

EbN0Grid parse_grid(const std::string& text)
{
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad Eb/N0 grid '" + text + "', expected lo:hi:step");
        }
    }
    if (parts.size() == 1)
        return {parts[0], parts[0], 1.0};
    if (parts.size() != 3)
        throw std::invalid_argument("bad Eb/N0 grid '" + text + "', expected lo:hi:step");
    EbN0Grid g{parts[0], parts[1], parts[2]};
    g.points();
    return g;
}

MinEbN0Result find_min_eb_n0(const SystemConfig& cfg, double eps, const EbN0Grid& grid, int trials, int workers)
{
    MinEbN0Result out;
    const auto pts = grid.points();
    // A finite number of trials can never certify a zero error rate.
    if (eps <= 0.0)
        return out;
    for (double eb : pts) {
        out.evaluated.push_back(run_point(cfg, eb, trials, workers));
        if (out.evaluated.back().ci95_hi <= eps) {
            out.eb_n0_db = eb;
            break;
        }
    }
    return out;
}

CsvRow make_row(const SystemConfig& cfg, const SweepPoint& point)
{
    CsvRow row;
    row.eb_n0_db = point.eb_n0_db;
    row.ka = cfg.K_a;
    row.n = cfg.n;
    row.n_c = cfg.n_c;
    row.inner_len = cfg.inner_len_packets;
    row.detector = to_string(cfg.detector_mode);
    row.trials = point.trials;
    row.arrivals = point.arrivals;
    row.misses = point.misses;
    row.pupe = point.mean_pupe;
    row.ci_lo = point.ci95_lo;
    row.ci_hi = point.ci95_hi;
    row.seed = cfg.seed;
    return row;
}

}  // namespace odma_ura
