#include "odma_ura/detector.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace odma_ura {

namespace {

bool ranks_before(const Candidate& a, const Candidate& b)
{
    if (a.score != b.score)
        return a.score > b.score;
    if (a.start != b.start)
        return a.start < b.start;
    return a.pattern_index < b.pattern_index;
}

void require_length(std::span<const double> y_s, std::int64_t starts, std::int64_t n)
{
    if (static_cast<std::int64_t>(y_s.size()) < starts - 1 + n)
        throw std::invalid_argument("inner window segment too short for the candidate start range");
}

}  // namespace

double pattern_energy(std::span<const double> y_b, std::span<const std::int32_t> column, EnergyMetric metric)
{
    double e = 0.0;
    if (metric == EnergyMetric::L1) {
        for (auto idx : column)
            e += std::abs(y_b[static_cast<std::size_t>(idx)]);
    } else {
        for (auto idx : column) {
            const double v = y_b[static_cast<std::size_t>(idx)];
            e += v * v;
        }
    }
    return e;
}

double preamble_correlate(std::span<const double> y_b, const Preamble& preamble)
{
    double c = 0.0;
    for (std::size_t i = 0; i < preamble.samples.size(); ++i)
        c += y_b[i] * preamble.samples[i];
    return c;
}

std::int64_t candidate_starts(const SystemConfig& cfg)
{
    return static_cast<std::int64_t>(cfg.inner_len_packets - 1) * cfg.n;
}

int candidates_per_window(const SystemConfig& cfg)
{
    const std::int64_t want = static_cast<std::int64_t>(cfg.inner_len_packets - 1) * cfg.candidates_per_packet();
    return static_cast<int>(std::min(want, candidate_starts(cfg)));
}

ScoreTable score_table(std::span<const double> y_s, const PatternMatrix& patterns, std::int64_t starts,
                       EnergyMetric metric)
{
    require_length(y_s, starts, patterns.n);
    ScoreTable table;
    table.patterns = patterns.size();
    table.starts = starts;
    table.scores.assign(static_cast<std::size_t>(table.patterns) * static_cast<std::size_t>(starts), 0.0);

    std::vector<double> mag(y_s.size());
    for (std::size_t j = 0; j < y_s.size(); ++j)
        mag[j] = metric == EnergyMetric::L1 ? std::abs(y_s[j]) : y_s[j] * y_s[j];

    // Accumulating column index by column index keeps every e[i][b] summed in
    // increasing index order, so values match a per-start loop bit for bit.
    const auto len = static_cast<std::size_t>(starts);
    for (int i = 0; i < table.patterns; ++i) {
        double* row = table.scores.data() + static_cast<std::size_t>(i) * len;
        for (auto idx : patterns.column(i)) {
            const double* src = mag.data() + idx;
            for (std::size_t b = 0; b < len; ++b)
                row[b] += src[b];
        }
    }
    return table;
}

std::vector<Candidate> select_survivors(const ScoreTable& table, int count)
{
    std::vector<Candidate> survivors(static_cast<std::size_t>(table.starts));
    for (std::int64_t b = 0; b < table.starts; ++b) {
        Candidate best{b, 0, table.at(0, b)};
        for (int i = 1; i < table.patterns; ++i) {
            const double e = table.at(i, b);
            if (e > best.score) {
                best.score = e;
                best.pattern_index = i;
            }
        }
        survivors[static_cast<std::size_t>(b)] = best;
    }
    const auto keep = std::min<std::size_t>(static_cast<std::size_t>(std::max(count, 0)), survivors.size());
    std::partial_sort(survivors.begin(), survivors.begin() + static_cast<std::ptrdiff_t>(keep), survivors.end(),
                      ranks_before);
    survivors.resize(keep);
    return survivors;
}

std::vector<Candidate> detect_energy(std::span<const double> y_s, const PatternMatrix& patterns,
                                     const SystemConfig& cfg)
{
    const auto table = score_table(y_s, patterns, candidate_starts(cfg), cfg.energy_metric);
    return select_survivors(table, candidates_per_window(cfg));
}

std::vector<Candidate> detect_preamble(std::span<const double> y_s, const PatternMatrix& patterns,
                                       const Preamble& preamble, const SystemConfig& cfg)
{
    if (preamble.empty())
        throw std::invalid_argument("preamble detection requires a non-empty preamble");
    const std::int64_t starts = candidate_starts(cfg);
    require_length(y_s, starts, patterns.n);

    std::vector<Candidate> peaks(static_cast<std::size_t>(starts));
    for (std::int64_t b = 0; b < starts; ++b)
        peaks[static_cast<std::size_t>(b)] = {b, 0, preamble_correlate(y_s.subspan(static_cast<std::size_t>(b)), preamble)};
    const auto keep =
        std::min<std::size_t>(static_cast<std::size_t>(candidates_per_window(cfg)), peaks.size());
    std::partial_sort(peaks.begin(), peaks.begin() + static_cast<std::ptrdiff_t>(keep), peaks.end(), ranks_before);
    peaks.resize(keep);

    for (auto& c : peaks) {
        const auto y_b = y_s.subspan(static_cast<std::size_t>(c.start), static_cast<std::size_t>(patterns.n));
        double best = -1.0;
        for (int i = 0; i < patterns.size(); ++i) {
            const double e = pattern_energy(y_b, patterns.column(i), cfg.energy_metric);
            if (e > best) {
                best = e;
                c.pattern_index = i;
            }
        }
    }
    return peaks;
}

std::vector<Candidate> detect(std::span<const double> y_s, const PatternMatrix& patterns, const Preamble& preamble,
                              const SystemConfig& cfg)
{
    if (cfg.detector_mode == DetectorMode::PreambleCorrelation)
        return detect_preamble(y_s, patterns, preamble, cfg);
    return detect_energy(y_s, patterns, cfg);
}

void write_score_table_csv(std::ostream& os, const ScoreTable& table)
{
    os << "b,i,score\n" << std::setprecision(17);
    for (std::int64_t b = 0; b < table.starts; ++b)
        for (int i = 0; i < table.patterns; ++i)
            os << b << ',' << i << ',' << table.at(i, b) << '\n';
}

}  // namespace odma_ura
