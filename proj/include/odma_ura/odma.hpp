#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "odma_ura/config.hpp"
#include "odma_ura/polar.hpp"

namespace odma_ura {

/// Shared on-off pattern matrix: M_p columns, each a sorted list of the n_d
/// active indices within [n_p, n).
struct PatternMatrix {
    std::int64_t n = 0;
    int n_d = 0;
    int n_p = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::int32_t>> columns;

    int size() const { return static_cast<int>(columns.size()); }
    const std::vector<std::int32_t>& column(int i) const { return columns[static_cast<std::size_t>(i)]; }

    bool operator==(const PatternMatrix&) const = default;
};

/// Known preamble shared by all users (baseline detector only).
struct Preamble {
    std::vector<double> samples;

    bool empty() const { return samples.empty(); }
};

struct TxPacket {
    std::vector<double> samples;   // length n
    int pattern_index = 0;
    double group_power = 0.0;
    BitVector message;             // B bits
    BitVector codeword;            // n_c polar code bits
};

/// Each column is an independent uniform n_d-subset of [n_p, n).
PatternMatrix gen_pattern_matrix(const SystemConfig& cfg, std::uint64_t seed);

/// Pattern matrix for cfg drawn from the master seed's pattern stream.
PatternMatrix gen_pattern_matrix(const SystemConfig& cfg);

/// i.i.d. equiprobable +-sqrt(P) samples of length n_p (empty when n_p = 0).
Preamble gen_preamble(const SystemConfig& cfg);

/// Big-endian value of the first B_p message bits.
int pattern_index_of(std::span<const std::uint8_t> msg, const SystemConfig& cfg);

/// Per-symbol power for users of the given pattern under power diversity.
double group_power(int pattern_index, const SystemConfig& cfg);

/// Last B_c bits -> CRC -> polar encode.
BitVector message_codeword(std::span<const std::uint8_t> msg, const polar::PolarCode& code, const SystemConfig& cfg);

/// Adds sign * (BPSK(codeword) placed on `column`, plus preamble if any) into
/// `signal` starting at `offset`. Bit 0 maps to +amplitude.
void add_waveform(std::span<double> signal, std::int64_t offset, std::span<const std::uint8_t> codeword,
                  std::span<const std::int32_t> column, double amplitude, const Preamble& preamble,
                  double sign = 1.0);

TxPacket build_packet(std::span<const std::uint8_t> msg, const PatternMatrix& patterns,
                      const polar::PolarCode& code, const SystemConfig& cfg, const Preamble& preamble = {});

polar::PolarCode make_code(const SystemConfig& cfg);

}  // namespace odma_ura
