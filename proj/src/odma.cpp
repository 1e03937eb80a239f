#include "odma_ura/odma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "odma_ura/rng.hpp"

namespace odma_ura {

PatternMatrix gen_pattern_matrix(const SystemConfig& cfg, std::uint64_t seed)
{
    const std::int64_t span = cfg.n - cfg.n_p;
    if (cfg.n_d <= 0 || cfg.n_d > span)
        throw std::invalid_argument("pattern weight n_d does not fit in [n_p, n)");

    PatternMatrix pm;
    pm.n = cfg.n;
    pm.n_d = cfg.n_d;
    pm.n_p = cfg.n_p;
    pm.seed = seed;
    pm.columns.resize(static_cast<std::size_t>(cfg.M_p()));

    Rng rng(seed);
    std::vector<std::int32_t> pool(static_cast<std::size_t>(span));
    for (auto& col : pm.columns) {
        std::iota(pool.begin(), pool.end(), static_cast<std::int32_t>(cfg.n_p));
        // Partial Fisher-Yates: the first n_d slots become a uniform subset.
        for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.n_d); ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
            std::swap(pool[i], pool[pick(rng)]);
        }
        col.assign(pool.begin(), pool.begin() + cfg.n_d);
        std::sort(col.begin(), col.end());
    }
    return pm;
}

PatternMatrix gen_pattern_matrix(const SystemConfig& cfg)
{
    return gen_pattern_matrix(cfg, derive_seed(cfg.seed, Stream::Patterns));
}

Preamble gen_preamble(const SystemConfig& cfg)
{
    Preamble pre;
    if (cfg.n_p <= 0)
        return pre;
    Rng rng = make_rng(cfg.seed, Stream::Preamble);
    std::bernoulli_distribution coin(0.5);
    const double amp = std::sqrt(cfg.P);
    pre.samples.resize(static_cast<std::size_t>(cfg.n_p));
    for (auto& s : pre.samples)
        s = coin(rng) ? amp : -amp;
    return pre;
}

int pattern_index_of(std::span<const std::uint8_t> msg, const SystemConfig& cfg)
{
    if (static_cast<int>(msg.size()) < cfg.B_p)
        throw std::invalid_argument("message shorter than B_p");
    int idx = 0;
    for (int i = 0; i < cfg.B_p; ++i)
        idx = (idx << 1) | (msg[static_cast<std::size_t>(i)] & 1);
    return idx;
}

double group_power(int pattern_index, const SystemConfig& cfg)
{
    const int groups = static_cast<int>(cfg.power_groups.size());
    if (groups == 0 || cfg.M_p() % groups != 0)
        throw std::invalid_argument("number of power groups must divide M_p");
    if (pattern_index < 0 || pattern_index >= cfg.M_p())
        throw std::out_of_range("pattern index out of range");
    const int per_group = cfg.M_p() / groups;
    return cfg.P * cfg.power_groups[static_cast<std::size_t>(pattern_index / per_group)];
}

BitVector message_codeword(std::span<const std::uint8_t> msg, const polar::PolarCode& code, const SystemConfig& cfg)
{
    if (static_cast<int>(msg.size()) != cfg.B)
        throw std::invalid_argument("message length must be B");
    const auto info = polar::crc_append(msg.subspan(static_cast<std::size_t>(cfg.B_p)), code);
    return polar::encode(info, code);
}

void add_waveform(std::span<double> signal, std::int64_t offset, std::span<const std::uint8_t> codeword,
                  std::span<const std::int32_t> column, double amplitude, const Preamble& preamble, double sign)
{
    double* base = signal.data() + offset;
    for (std::size_t i = 0; i < preamble.samples.size(); ++i)
        base[i] += sign * preamble.samples[i];
    const double a = sign * amplitude;
    for (std::size_t j = 0; j < column.size(); ++j)
        base[column[j]] += codeword[j] ? -a : a;
}

TxPacket build_packet(std::span<const std::uint8_t> msg, const PatternMatrix& patterns,
                      const polar::PolarCode& code, const SystemConfig& cfg, const Preamble& preamble)
{
    TxPacket pkt;
    pkt.message.assign(msg.begin(), msg.end());
    pkt.pattern_index = pattern_index_of(msg, cfg);
    pkt.group_power = group_power(pkt.pattern_index, cfg);
    pkt.codeword = message_codeword(msg, code, cfg);
    pkt.samples.assign(static_cast<std::size_t>(cfg.n), 0.0);
    add_waveform(pkt.samples, 0, pkt.codeword, patterns.column(pkt.pattern_index), std::sqrt(pkt.group_power),
                 preamble);
    return pkt;
}

polar::PolarCode make_code(const SystemConfig& cfg) { return polar::PolarCode(cfg.n_c, cfg.k_info(), cfg.r); }

}  // namespace odma_ura
