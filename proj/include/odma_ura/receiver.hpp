#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "odma_ura/channel.hpp"
#include "odma_ura/config.hpp"
#include "odma_ura/detector.hpp"
#include "odma_ura/odma.hpp"
#include "odma_ura/polar.hpp"

namespace odma_ura {

struct DecodedEntry {
    BitVector message;         // B bits
    std::int64_t abs_start = 0;
    int pattern_index = 0;
    double group_power = 0.0;
    BitVector codeword;        // re-encoded polar codeword used for SIC
};

/// Decoded entries keyed by (message, absolute start), in insertion order.
class DecodedSet {
public:
    bool contains(const BitVector& message, std::int64_t abs_start) const;
    /// False (and no insertion) when the key already exists.
    bool insert(DecodedEntry entry);

    const std::vector<DecodedEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

private:
    std::vector<DecodedEntry> entries_;
    std::set<std::pair<BitVector, std::int64_t>> keys_;
};

struct ReceiverStats {
    std::int64_t detection_passes = 0;
    std::int64_t candidates_tested = 0;
    std::int64_t crc_passes = 0;
    std::int64_t duplicate_decodes = 0;   // CRC passes whose key was already known
    std::int64_t windows_run = 0;
    std::int64_t windows_skipped = 0;     // inner windows whose residual was unchanged since they last settled
};

struct TraceEvent {
    std::int64_t outer_start = 0;
    std::int64_t inner_start = 0;   // absolute
    int outer_iteration = 0;
    int iteration = 0;
    int candidates_tested = 0;
    int decodes = 0;
    double residual_energy = 0.0;   // over the inner window after this iteration
};

/// Residual of one outer window plus the decoded set shared across windows.
struct WindowState {
    std::int64_t origin = 0;             // absolute index of residual[0]
    std::vector<double> residual;
    DecodedSet decoded;
    ReceiverStats stats;
    std::set<std::pair<std::int64_t, int>> tested;  // absolute (start, pattern) pairs handed to the decoder
    bool record_trace = false;
    std::vector<TraceEvent> trace;
};

/// Immutable inputs shared by every window of a stream.
struct ReceiverContext {
    const SystemConfig& cfg;
    const PatternMatrix& patterns;
    const polar::PolarCode& code;
    const Preamble& preamble;
};

struct InnerResult {
    int new_decodes = 0;
    int iterations = 0;
    bool settled = false;   // last iteration decoded nothing new
};

struct WindowEnergy {
    std::int64_t outer_start = 0;
    double pre_energy = 0.0;    // ||y||^2 over the outer window
    double post_energy = 0.0;   // residual energy after the window was processed
};

struct StreamResult {
    std::vector<BitVector> messages;   // final list L, unique by content
    std::vector<DecodedEntry> entries;
    ReceiverStats stats;
    std::vector<WindowEnergy> windows;
    std::vector<TraceEvent> trace;
    std::set<std::pair<std::int64_t, int>> tested;
};

/// LLR[j] = 2 sqrt(P_g) s_j / sigma_hat^2 over the candidate's active indices,
/// with sigma_hat^2 = max(sigma2, mean(s^2) - P_g). Positive favours bit 0.
std::vector<double> extract_llrs(std::span<const double> y_s, const Candidate& candidate,
                                 const PatternMatrix& patterns, const SystemConfig& cfg);

/// Iterative detect / decode / cancel on the inner window starting at
/// `inner_offset` within state.residual. Stops after n_max iterations or the
/// first iteration without a new decode.
InnerResult decode_inner_window(WindowState& state, std::int64_t inner_offset, const ReceiverContext& ctx,
                                std::int64_t outer_start = 0, int outer_iteration = 0);

/// Outer window start positions: 0, delta*n, ... up to T - (N_s - 1) n, with the
/// last position pinned to T - (N_s - 1) n so every start in [0, T) is covered.
std::vector<std::int64_t> outer_window_starts(const SystemConfig& cfg);

/// Double sliding-window decoding of the full received signal (length T + n).
StreamResult decode_stream(std::span<const double> y, const ReceiverContext& ctx, bool record_trace = false);

/// Number of arrivals whose message is missing from `decoded`.
std::int64_t count_misses(const std::vector<BitVector>& decoded, const std::vector<Arrival>& arrivals);

/// Fraction of arrivals whose message is missing from `decoded`; 0 when there are none.
double compute_pupe(const std::vector<BitVector>& decoded, const std::vector<Arrival>& arrivals);

}  // namespace odma_ura
