#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace odma_ura {

/// Bits stored one per byte, values 0 or 1.
using BitVector = std::vector<std::uint8_t>;

namespace polar {

/// 5G NR reliability sequence for N = 1024, least reliable first.
extern const std::array<std::uint16_t, 1024> kNrReliabilitySequence;

/// Indices [0, n_c) in ascending reliability, nested from the 1024-entry sequence.
std::vector<int> reliability_order(int n_c);

/// Generator polynomial (without the leading x^r term) for the supported CRC
/// lengths: 8 -> 0x07, 16 -> 0x1021 (CCITT), 24 -> 0x864CFB. Zero init, no xor-out.
std::uint32_t crc_polynomial(int r);

/// CRC-aided polar code: block length n_c, k = B_c + r information bits.
class PolarCode {
public:
    PolarCode(int n_c, int k, int crc_len = 16);

    int n() const { return n_; }
    int k() const { return k_; }
    int log2n() const { return log2n_; }
    int crc_len() const { return crc_len_; }
    int message_len() const { return k_ - crc_len_; }
    std::uint32_t crc_poly() const { return crc_poly_; }

    const std::vector<int>& frozen_set() const { return frozen_; }
    const std::vector<int>& info_set() const { return info_; }
    bool is_frozen(int i) const { return frozen_mask_[static_cast<std::size_t>(i)] != 0; }

private:
    int n_;
    int k_;
    int log2n_;
    int crc_len_;
    std::uint32_t crc_poly_;
    std::vector<int> frozen_;
    std::vector<int> info_;
    std::vector<std::uint8_t> frozen_mask_;
};

PolarCode construct(int n_c, int k, int crc_len = 16);

/// r-bit CRC of bits, MSB first.
BitVector crc(std::span<const std::uint8_t> bits, int r);

/// msg || CRC(msg).
BitVector crc_append(std::span<const std::uint8_t> msg, const PolarCode& code);

bool crc_check(std::span<const std::uint8_t> bits_with_crc, const PolarCode& code);

/// x = u * F^{(x)m} (natural order, no bit reversal), with `info` placed on the
/// non-frozen positions in increasing index order.
BitVector encode(std::span<const std::uint8_t> info, const PolarCode& code);

/// In-place polar transform of a length-2^m vector.
void polar_transform(std::span<std::uint8_t> u);

/// CRC-aided successive cancellation list decoding.
///
/// LLR convention: positive means bit 0 is more likely. Returns the message
/// (CRC stripped) of the most likely final path passing the CRC, or nullopt
/// when no path passes. Path-metric ties go to the lower path index.
std::optional<BitVector> scl_decode(std::span<const double> llrs, const PolarCode& code, int list_size);

/// Same decoder, returning the full k-bit info word (message || CRC).
std::optional<BitVector> scl_decode_info(std::span<const double> llrs, const PolarCode& code, int list_size);

}  // namespace polar
}  // namespace odma_ura
