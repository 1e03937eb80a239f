#include "odma_ura/config.hpp"

#include <cmath>
#include <numeric>

namespace odma_ura {

namespace {

bool is_power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw ConfigError(what);
}

double energy_per_packet_over_power(const SystemConfig& cfg)
{
    // Mean group multiplier is 1, so the average data energy is n_d * P.
    return static_cast<double>(cfg.n_d + cfg.n_p);
}

}  // namespace

int SystemConfig::effective_u() const
{
    if (u)
        return *u;
    return static_cast<int>(std::ceil(K_a / 2.0));
}

int SystemConfig::candidates_per_packet() const
{
    return static_cast<int>(std::lround(K_a)) + effective_u();
}

void validate(const SystemConfig& cfg)
{
    require(cfg.n > 0, "n must be positive");
    require(cfg.B > 0, "B must be positive");
    require(cfg.B_p >= 0 && cfg.B_p <= 20, "B_p must lie in [0, 20]");
    require(cfg.B_c() > 0, "B_c = B - B_p must be positive");
    require(cfg.r == 0 || cfg.r == 8 || cfg.r == 16 || cfg.r == 24,
            "r must be one of 0, 8, 16, 24 (supported CRC lengths)");
    require(is_power_of_two(cfg.n_c) && cfg.n_c <= 1024, "n_c must be a power of two no larger than 1024");
    require(cfg.k_info() <= cfg.n_c, "polar overload: B_c + r exceeds n_c");
    require(cfg.n_d == cfg.n_c, "n_d must equal n_c (one BPSK symbol per coded bit)");
    require(cfg.n_p >= 0, "n_p must be non-negative");
    require(cfg.n_d + cfg.n_p <= cfg.n, "n_d + n_p exceeds packet length n");
    require(std::isfinite(cfg.P) && cfg.P > 0.0, "P must be positive");
    require(std::isfinite(cfg.sigma2) && cfg.sigma2 >= 0.0, "sigma2 must be non-negative");
    require(std::isfinite(cfg.K_a) && cfg.K_a >= 0.0, "K_a must be non-negative");
    require(cfg.effective_u() >= 0, "u must be non-negative");
    require(cfg.N_s >= 2, "N_s must be at least 2");
    require(cfg.delta >= 1, "delta must be positive");
    require(cfg.inner_len_packets >= 2, "inner_len_packets must be at least 2");
    require(cfg.inner_len_packets <= cfg.N_s, "inner window longer than outer window");
    require(cfg.n_max >= 1, "n_max must be positive");
    require(cfg.n_out >= 1, "n_out must be positive");
    require(cfg.T > 0 && cfg.T % cfg.n == 0, "T must be a positive multiple of n");
    require(cfg.T >= static_cast<std::int64_t>(cfg.N_s - 1) * cfg.n, "T shorter than N_s - 1 packets");
    require(cfg.list_size >= 1, "list_size must be positive");

    require(!cfg.power_groups.empty(), "power_groups must be non-empty");
    for (double g : cfg.power_groups)
        require(std::isfinite(g) && g > 0.0, "power_groups entries must be positive");
    const double mean = std::accumulate(cfg.power_groups.begin(), cfg.power_groups.end(), 0.0) /
                        static_cast<double>(cfg.power_groups.size());
    require(std::abs(mean - 1.0) <= 1e-9, "power groups mean != 1");
    require(cfg.M_p() % static_cast<int>(cfg.power_groups.size()) == 0,
            "number of power groups must divide M_p");

    if (cfg.detector_mode == DetectorMode::PreambleCorrelation)
        require(cfg.n_p > 0, "preamble detector requires n_p > 0");
    else
        require(cfg.n_p == 0, "pattern-energy detector requires n_p = 0");
}

double eb_n0_db(const SystemConfig& cfg)
{
    return 10.0 * std::log10(energy_per_packet_over_power(cfg) * cfg.P / (2.0 * cfg.B * cfg.sigma2));
}

double power_for_eb_n0(const SystemConfig& cfg, double eb_n0)
{
    return std::pow(10.0, eb_n0 / 10.0) * 2.0 * cfg.B * cfg.sigma2 / energy_per_packet_over_power(cfg);
}

SystemConfig at_eb_n0(SystemConfig cfg, double eb_n0)
{
    cfg.P = power_for_eb_n0(cfg, eb_n0);
    return cfg;
}

SystemConfig desk_profile(double K_a)
{
    SystemConfig cfg;
    cfg.K_a = K_a;
    return cfg;
}

SystemConfig paper_profile(double K_a)
{
    SystemConfig cfg;
    cfg.n = 10000;
    cfg.n_c = 512;
    cfg.n_d = 512;
    cfg.K_a = K_a;
    cfg.T = 20 * cfg.n;
    return cfg;
}

std::string to_string(DetectorMode mode)
{
    return mode == DetectorMode::PatternEnergy ? "energy" : "preamble";
}

DetectorMode detector_mode_from_string(const std::string& s)
{
    if (s == "energy" || s == "PatternEnergy")
        return DetectorMode::PatternEnergy;
    if (s == "preamble" || s == "PreambleCorrelation")
        return DetectorMode::PreambleCorrelation;
    throw ConfigError("unknown detector_mode '" + s + "'");
}

std::string to_string(EnergyMetric metric) { return metric == EnergyMetric::L1 ? "l1" : "l2"; }

EnergyMetric energy_metric_from_string(const std::string& s)
{
    if (s == "l1")
        return EnergyMetric::L1;
    if (s == "l2")
        return EnergyMetric::L2;
    throw ConfigError("unknown energy_metric '" + s + "'");
}

std::string to_string(ArrivalModel model) { return model == ArrivalModel::Poisson ? "poisson" : "fixed"; }

ArrivalModel arrival_model_from_string(const std::string& s)
{
    if (s == "poisson")
        return ArrivalModel::Poisson;
    if (s == "fixed")
        return ArrivalModel::FixedPerBlock;
    throw ConfigError("unknown arrival_model '" + s + "'");
}

}  // namespace odma_ura
