#pragma once

#include <fstream>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "odma_ura/config.hpp"
#include "odma_ura/polar.hpp"

namespace testing {

inline const nlohmann::json& oracles()
{
    static const nlohmann::json j = [] {
        std::ifstream in(std::string(ODMA_URA_ORACLE_DIR) + "/oracles.json");
        return nlohmann::json::parse(in);
    }();
    return j;
}

inline odma_ura::BitVector random_bits(std::mt19937_64& rng, int len)
{
    odma_ura::BitVector v(static_cast<std::size_t>(len));
    for (auto& b : v)
        b = static_cast<std::uint8_t>(rng() & 1u);
    return v;
}

// Noiseless BPSK LLRs for a codeword (bit 0 -> positive).
inline std::vector<double> clean_llrs(const odma_ura::BitVector& cw, double mag = 1e3)
{
    std::vector<double> llr(cw.size());
    for (std::size_t i = 0; i < cw.size(); ++i)
        llr[i] = cw[i] ? -mag : mag;
    return llr;
}

// Desk profile with a noiseless channel at nominal power.
inline odma_ura::SystemConfig noiseless_desk(double K_a = 2.0)
{
    auto cfg = odma_ura::desk_profile(K_a);
    cfg.sigma2 = 0.0;
    cfg.P = 1.0;
    return cfg;
}

}  // namespace testing
