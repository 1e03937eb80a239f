#pragma once

#include <cstdint>
#include <vector>

#include "odma_ura/config.hpp"
#include "odma_ura/odma.hpp"
#include "odma_ura/polar.hpp"
#include "odma_ura/rng.hpp"

namespace odma_ura {

struct Arrival {
    BitVector message;
    std::int64_t delta = 0;  // start time in [0, T)
    int pattern_index = 0;
    double group_power = 0.0;
};

/// Received signal y over [0, T + n) plus the ground truth used for scoring.
struct ChannelRealization {
    std::vector<double> y;
    std::vector<Arrival> arrivals;
    double sigma2 = 0.0;
};

/// Poisson(K_a * T / n) arrivals (or round(K_a) per block in FixedPerBlock mode),
/// uniform start times and uniform messages, sorted by start time.
std::vector<Arrival> draw_arrivals(const SystemConfig& cfg, Rng& rng);

/// y = sum_i shift(x_i, delta_i) + z, z ~ N(0, sigma2) i.i.d.
ChannelRealization synthesize(const std::vector<Arrival>& arrivals, const PatternMatrix& patterns,
                              const polar::PolarCode& code, const SystemConfig& cfg, const Preamble& preamble,
                              Rng& rng);

/// Arrival record for a given message and start time.
Arrival make_arrival(BitVector message, std::int64_t delta, const SystemConfig& cfg);

}  // namespace odma_ura
