#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "odma_ura/channel.hpp"
#include "odma_ura/config.hpp"
#include "odma_ura/odma.hpp"
#include "odma_ura/polar.hpp"
#include "odma_ura/receiver.hpp"

namespace odma_ura {

struct TrialResult {
    std::uint64_t seed = 0;            // derived per-trial seed
    std::uint64_t trial_index = 0;
    std::int64_t K_aT = 0;             // realized arrivals
    std::int64_t decoded_count = 0;    // |L|
    std::int64_t misses = 0;
    double pupe = 0.0;
    std::int64_t detection_miss_count = 0;  // arrivals never offered to the decoder
    std::int64_t false_decodes = 0;         // messages in L matching no arrival
    double runtime_ms = 0.0;
};

/// Validated configuration together with the shared pattern matrix, polar code
/// and preamble. Immutable and safe to share across worker threads.
class Simulation {
public:
    explicit Simulation(SystemConfig cfg);

    const SystemConfig& config() const { return cfg_; }
    const PatternMatrix& patterns() const { return patterns_; }
    const polar::PolarCode& code() const { return code_; }
    const Preamble& preamble() const { return preamble_; }
    ReceiverContext context() const { return {cfg_, patterns_, code_, preamble_}; }

    std::uint64_t trial_seed(std::uint64_t trial_index) const;
    ChannelRealization realize(std::uint64_t trial_index) const;
    TrialResult run_trial(std::uint64_t trial_index) const;

private:
    SystemConfig cfg_;
    PatternMatrix patterns_;
    polar::PolarCode code_;
    Preamble preamble_;
};

/// Deterministic in (master_seed, trial_index); master_seed overrides cfg.seed.
TrialResult run_trial(const SystemConfig& cfg, std::uint64_t master_seed, std::uint64_t trial_index);

/// Trials [0, trials) on `workers` threads; output order is by trial index.
std::vector<TrialResult> run_trials(const Simulation& sim, int trials, int workers = 1);

/// Wilson score interval for k successes out of n at ~95% (z = 1.959964).
std::pair<double, double> wilson_interval(std::int64_t k, std::int64_t n, double z = 1.959963984540054);

struct PooledPupe {
    std::int64_t arrivals = 0;
    std::int64_t misses = 0;
    double pupe = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 1.0;
};

/// Sum of misses over sum of arrivals across trials, with a Wilson interval.
PooledPupe pool_pupe(const std::vector<TrialResult>& trials);

struct SweepPoint {
    double eb_n0_db = 0.0;
    int trials = 0;
    std::int64_t arrivals = 0;
    std::int64_t misses = 0;
    double mean_pupe = 0.0;
    double ci95_lo = 0.0;
    double ci95_hi = 1.0;
};

struct SweepResult {
    SystemConfig config;
    std::vector<SweepPoint> points;   // sorted by eb_n0_db
    double target_eps = 0.05;
};

SweepPoint run_point(const SystemConfig& cfg, double eb_n0_db, int trials, int workers = 1);

/// Throws std::invalid_argument("no trials") for trials <= 0.
SweepResult run_sweep(const SystemConfig& cfg, const std::vector<double>& eb_n0_list, int trials, int workers = 1);

struct EbN0Grid {
    double lo = 0.0;
    double hi = 0.0;
    double step = 1.0;

    std::vector<double> points() const;
};

/// Parses "lo:hi:step" (or a single value).
EbN0Grid parse_grid(const std::string& text);

struct MinEbN0Result {
    std::optional<double> eb_n0_db;
    std::vector<SweepPoint> evaluated;
};

/// Smallest grid point whose pooled PUPE upper 95% bound is <= eps. Points are
/// evaluated in ascending order and the scan stops at the first qualifying one.
MinEbN0Result find_min_eb_n0(const SystemConfig& cfg, double eps, const EbN0Grid& grid, int trials,
                             int workers = 1);

/// One row of the results CSV.
struct CsvRow {
    double eb_n0_db = 0.0;
    double ka = 0.0;
    std::int64_t n = 0;
    int n_c = 0;
    int inner_len = 0;
    std::string detector;
    int trials = 0;
    std::int64_t arrivals = 0;
    std::int64_t misses = 0;
    double pupe = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const CsvRow&) const = default;
};

CsvRow make_row(const SystemConfig& cfg, const SweepPoint& point);

}  // namespace odma_ura
