#include "odma_ura/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace odma_ura {

namespace {

double energy(std::span<const double> v) { return std::inner_product(v.begin(), v.end(), v.begin(), 0.0); }

// Subtracts the part of a decoded packet that falls inside [origin, origin + len).
void cancel_clipped(std::vector<double>& residual, std::int64_t origin, const DecodedEntry& e,
                    const ReceiverContext& ctx)
{
    const auto len = static_cast<std::int64_t>(residual.size());
    const std::int64_t rel = e.abs_start - origin;
    if (rel >= len || rel + ctx.cfg.n <= 0)
        return;
    auto sub = [&](std::int64_t pos, double v) {
        const std::int64_t at = rel + pos;
        if (at >= 0 && at < len)
            residual[static_cast<std::size_t>(at)] -= v;
    };
    for (std::size_t i = 0; i < ctx.preamble.samples.size(); ++i)
        sub(static_cast<std::int64_t>(i), ctx.preamble.samples[i]);
    const double amp = std::sqrt(e.group_power);
    const auto& column = ctx.patterns.column(e.pattern_index);
    for (std::size_t j = 0; j < column.size(); ++j)
        sub(column[j], e.codeword[j] ? -amp : amp);
}

BitVector pattern_prefix(int pattern_index, int bits)
{
    BitVector out(static_cast<std::size_t>(bits));
    for (int i = 0; i < bits; ++i)
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((pattern_index >> (bits - 1 - i)) & 1);
    return out;
}

}  // namespace

bool DecodedSet::contains(const BitVector& message, std::int64_t abs_start) const
{
    return keys_.contains({message, abs_start});
}

bool DecodedSet::insert(DecodedEntry entry)
{
    if (!keys_.emplace(entry.message, entry.abs_start).second)
        return false;
    entries_.push_back(std::move(entry));
    return true;
}

std::vector<double> extract_llrs(std::span<const double> y_s, const Candidate& candidate,
                                 const PatternMatrix& patterns, const SystemConfig& cfg)
{
    const auto& column = patterns.column(candidate.pattern_index);
    const double pg = group_power(candidate.pattern_index, cfg);
    const double* base = y_s.data() + candidate.start;

    double sq = 0.0;
    for (auto idx : column)
        sq += base[idx] * base[idx];
    const double mean_sq = column.empty() ? 0.0 : sq / static_cast<double>(column.size());
    // Floor keeps the LLRs finite for noiseless inputs.
    const double var = std::max({cfg.sigma2, mean_sq - pg, 1e-12 * pg});

    const double scale = 2.0 * std::sqrt(pg) / var;
    std::vector<double> llr(column.size());
    for (std::size_t j = 0; j < column.size(); ++j)
        llr[j] = scale * base[column[j]];
    return llr;
}

InnerResult decode_inner_window(WindowState& state, std::int64_t inner_offset, const ReceiverContext& ctx,
                                std::int64_t outer_start, int outer_iteration)
{
    const auto& cfg = ctx.cfg;
    const std::int64_t span_len = static_cast<std::int64_t>(cfg.inner_len_packets) * cfg.n;
    if (inner_offset < 0 || inner_offset + span_len > static_cast<std::int64_t>(state.residual.size()))
        throw std::out_of_range("inner window exceeds the residual buffer");

    InnerResult result;
    ++state.stats.windows_run;
    for (int iter = 1; iter <= cfg.n_max; ++iter) {
        const std::span<double> y_s(state.residual.data() + inner_offset, static_cast<std::size_t>(span_len));
        const auto candidates = detect(y_s, ctx.patterns, ctx.preamble, cfg);
        ++state.stats.detection_passes;

        int decodes = 0;
        for (const auto& c : candidates) {
            const std::int64_t abs_start = state.origin + inner_offset + c.start;
            state.tested.emplace(abs_start, c.pattern_index);
            ++state.stats.candidates_tested;

            const auto llr = extract_llrs(y_s, c, ctx.patterns, cfg);
            // Exact zeros are erasures. With fewer than k observed bits the
            // list collapses onto the all-zero word, whose CRC is also zero.
            const auto observed = std::count_if(llr.begin(), llr.end(), [](double v) { return v != 0.0; });
            if (observed < ctx.code.k())
                continue;
            auto payload = polar::scl_decode(llr, ctx.code, cfg.list_size);
            if (!payload)
                continue;
            ++state.stats.crc_passes;

            DecodedEntry entry;
            entry.message = pattern_prefix(c.pattern_index, cfg.B_p);
            entry.message.insert(entry.message.end(), payload->begin(), payload->end());
            entry.abs_start = abs_start;
            entry.pattern_index = c.pattern_index;
            entry.group_power = group_power(c.pattern_index, cfg);
            entry.codeword = message_codeword(entry.message, ctx.code, cfg);

            const auto codeword = entry.codeword;
            const double amp = std::sqrt(entry.group_power);
            if (!state.decoded.insert(std::move(entry))) {
                ++state.stats.duplicate_decodes;
                continue;
            }
            ++decodes;
            add_waveform(y_s, c.start, codeword, ctx.patterns.column(c.pattern_index), amp, ctx.preamble, -1.0);
        }

        result.iterations = iter;
        result.new_decodes += decodes;
        if (state.record_trace)
            state.trace.push_back({outer_start, state.origin + inner_offset, outer_iteration, iter,
                                   static_cast<int>(candidates.size()), decodes, energy(y_s)});
        if (decodes == 0) {
            result.settled = true;
            break;
        }
    }
    return result;
}

std::vector<std::int64_t> outer_window_starts(const SystemConfig& cfg)
{
    const std::int64_t last = cfg.T - static_cast<std::int64_t>(cfg.N_s - 1) * cfg.n;
    const std::int64_t step = static_cast<std::int64_t>(cfg.delta) * cfg.n;
    std::vector<std::int64_t> starts;
    for (std::int64_t t = 0; t <= last; t += step)
        starts.push_back(t);
    if (starts.empty() || starts.back() != last)
        starts.push_back(last);
    return starts;
}

StreamResult decode_stream(std::span<const double> y, const ReceiverContext& ctx, bool record_trace)
{
    const auto& cfg = ctx.cfg;
    const std::int64_t n = cfg.n;
    if (static_cast<std::int64_t>(y.size()) != cfg.T + n)
        throw std::invalid_argument("received signal must have length T + n");

    const std::int64_t outer_len = static_cast<std::int64_t>(cfg.N_s) * n;
    const std::int64_t inner_len = static_cast<std::int64_t>(cfg.inner_len_packets) * n;
    const int inner_positions = cfg.N_s - cfg.inner_len_packets + 1;

    StreamResult out;
    WindowState state;
    state.record_trace = record_trace;

    // settled[s / n]: the inner window at absolute start s last ended with an
    // iteration that decoded nothing, and no cancellation has touched it since.
    // Re-running such a window is a no-op, so it is skipped.
    std::vector<std::uint8_t> settled(static_cast<std::size_t>(cfg.T / n + 1), 0);
    auto unsettle = [&](std::int64_t abs_start) {
        for (std::size_t w = 0; w < settled.size(); ++w) {
            const auto s = static_cast<std::int64_t>(w) * n;
            if (s < abs_start + n && s + inner_len > abs_start)
                settled[w] = 0;
        }
    };

    for (const std::int64_t t0 : outer_window_starts(cfg)) {
        state.origin = t0;
        state.residual.assign(y.begin() + t0, y.begin() + t0 + outer_len);
        const double pre = energy(state.residual);
        for (const auto& e : state.decoded.entries())
            cancel_clipped(state.residual, t0, e, ctx);

        for (int outer_iter = 1; outer_iter <= cfg.n_out; ++outer_iter) {
            int found = 0;
            for (int j = 0; j < inner_positions; ++j) {
                const std::int64_t offset = static_cast<std::int64_t>(j) * n;
                const auto slot = static_cast<std::size_t>((t0 + offset) / n);
                if (settled[slot]) {
                    ++state.stats.windows_skipped;
                    continue;
                }
                const std::size_t before = state.decoded.size();
                const auto res = decode_inner_window(state, offset, ctx, t0, outer_iter);
                for (std::size_t k = before; k < state.decoded.size(); ++k)
                    unsettle(state.decoded.entries()[k].abs_start);
                settled[slot] = res.settled ? 1 : 0;
                found += res.new_decodes;
            }
            // An outer pass without progress leaves the residual unchanged, so
            // later passes would repeat it exactly.
            if (found == 0)
                break;
        }
        out.windows.push_back({t0, pre, energy(state.residual)});
    }

    out.entries = state.decoded.entries();
    std::set<BitVector> unique;
    for (const auto& e : out.entries)
        if (unique.insert(e.message).second)
            out.messages.push_back(e.message);
    out.stats = state.stats;
    out.trace = std::move(state.trace);
    out.tested = std::move(state.tested);
    return out;
}

std::int64_t count_misses(const std::vector<BitVector>& decoded, const std::vector<Arrival>& arrivals)
{
    const std::set<BitVector> found(decoded.begin(), decoded.end());
    std::int64_t misses = 0;
    for (const auto& a : arrivals)
        if (!found.contains(a.message))
            ++misses;
    return misses;
}

double compute_pupe(const std::vector<BitVector>& decoded, const std::vector<Arrival>& arrivals)
{
    if (arrivals.empty())
        return 0.0;
    return static_cast<double>(count_misses(decoded, arrivals)) / static_cast<double>(arrivals.size());
}

}  // namespace odma_ura
