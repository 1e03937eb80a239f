#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "odma_ura/config.hpp"
#include "odma_ura/odma.hpp"

namespace odma_ura {

/// A detected (start time, pattern) hypothesis. `start` is relative to the
/// inner window; `score` is the pattern energy or the preamble correlation.
struct Candidate {
    std::int64_t start = 0;
    int pattern_index = 0;
    double score = 0.0;

    bool operator==(const Candidate&) const = default;
};

/// Pattern scores e[i][b] for every pattern i and start b in [0, starts).
struct ScoreTable {
    int patterns = 0;
    std::int64_t starts = 0;
    std::vector<double> scores;  // row-major by pattern

    double at(int pattern, std::int64_t start) const
    {
        return scores[static_cast<std::size_t>(pattern) * static_cast<std::size_t>(starts) +
                      static_cast<std::size_t>(start)];
    }
};

/// Sum over the column's active indices of |y_b[idx]| (L1) or y_b[idx]^2 (L2).
double pattern_energy(std::span<const double> y_b, std::span<const std::int32_t> column,
                      EnergyMetric metric = EnergyMetric::L1);

/// Inner product of the first n_p samples of y_b with the preamble.
double preamble_correlate(std::span<const double> y_b, const Preamble& preamble);

/// Number of candidate start times in an inner window: (inner_len - 1) * n.
std::int64_t candidate_starts(const SystemConfig& cfg);

/// Survivors kept per detection pass: (inner_len - 1) * (round(K_a) + u),
/// capped by the number of start times.
int candidates_per_window(const SystemConfig& cfg);

/// Every e[i][b] for b in [0, starts). y_s must hold at least starts - 1 + n samples.
ScoreTable score_table(std::span<const double> y_s, const PatternMatrix& patterns, std::int64_t starts,
                       EnergyMetric metric = EnergyMetric::L1);

/// Per start, the argmax pattern (ties to the lower index); then the `count`
/// best starts by descending score, ties to smaller start then smaller pattern.
std::vector<Candidate> select_survivors(const ScoreTable& table, int count);

/// Preamble-free joint start time and pattern estimation.
std::vector<Candidate> detect_energy(std::span<const double> y_s, const PatternMatrix& patterns,
                                     const SystemConfig& cfg);

/// Preamble correlation picks the starts; the pattern at each start is the
/// argmax of the pattern energy.
std::vector<Candidate> detect_preamble(std::span<const double> y_s, const PatternMatrix& patterns,
                                       const Preamble& preamble, const SystemConfig& cfg);

/// Dispatches on cfg.detector_mode.
std::vector<Candidate> detect(std::span<const double> y_s, const PatternMatrix& patterns, const Preamble& preamble,
                              const SystemConfig& cfg);

/// CSV rows `b,i,score` for diagnostics.
void write_score_table_csv(std::ostream& os, const ScoreTable& table);

}  // namespace odma_ura
