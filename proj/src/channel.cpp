#include "odma_ura/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace odma_ura {

namespace {

BitVector random_message(int bits, Rng& rng)
{
    std::bernoulli_distribution coin(0.5);
    BitVector msg(static_cast<std::size_t>(bits));
    for (auto& b : msg)
        b = coin(rng) ? 1 : 0;
    return msg;
}

}  // namespace

Arrival make_arrival(BitVector message, std::int64_t delta, const SystemConfig& cfg)
{
    Arrival a;
    a.pattern_index = pattern_index_of(message, cfg);
    a.group_power = group_power(a.pattern_index, cfg);
    a.delta = delta;
    a.message = std::move(message);
    return a;
}

std::vector<Arrival> draw_arrivals(const SystemConfig& cfg, Rng& rng)
{
    std::vector<Arrival> arrivals;
    if (cfg.arrival_model == ArrivalModel::Poisson) {
        const double mean = cfg.K_a * static_cast<double>(cfg.T) / static_cast<double>(cfg.n);
        std::int64_t count = 0;
        if (mean > 0.0) {
            std::poisson_distribution<std::int64_t> poisson(mean);
            count = poisson(rng);
        }
        std::uniform_int_distribution<std::int64_t> start(0, cfg.T - 1);
        arrivals.reserve(static_cast<std::size_t>(count));
        for (std::int64_t i = 0; i < count; ++i) {
            const auto delta = start(rng);
            arrivals.push_back(make_arrival(random_message(cfg.B, rng), delta, cfg));
        }
    } else {
        const auto per_block = static_cast<std::int64_t>(std::lround(cfg.K_a));
        std::uniform_int_distribution<std::int64_t> offset(0, cfg.n - 1);
        for (std::int64_t block = 0; block < cfg.T / cfg.n; ++block)
            for (std::int64_t i = 0; i < per_block; ++i) {
                const auto delta = block * cfg.n + offset(rng);
                arrivals.push_back(make_arrival(random_message(cfg.B, rng), delta, cfg));
            }
    }
    std::stable_sort(arrivals.begin(), arrivals.end(),
                     [](const Arrival& a, const Arrival& b) { return a.delta < b.delta; });
    return arrivals;
}

ChannelRealization synthesize(const std::vector<Arrival>& arrivals, const PatternMatrix& patterns,
                              const polar::PolarCode& code, const SystemConfig& cfg, const Preamble& preamble,
                              Rng& rng)
{
    ChannelRealization out;
    out.sigma2 = cfg.sigma2;
    out.arrivals = arrivals;
    out.y.assign(static_cast<std::size_t>(cfg.T + cfg.n), 0.0);

    for (const auto& a : arrivals) {
        if (a.delta < 0 || a.delta >= cfg.T)
            throw std::invalid_argument("arrival start time outside [0, T)");
        const auto codeword = message_codeword(a.message, code, cfg);
        add_waveform(out.y, a.delta, codeword, patterns.column(a.pattern_index), std::sqrt(a.group_power),
                     preamble);
    }
    if (cfg.sigma2 > 0.0) {
        std::normal_distribution<double> noise(0.0, std::sqrt(cfg.sigma2));
        for (auto& v : out.y)
            v += noise(rng);
    }
    return out;
}

}  // namespace odma_ura
