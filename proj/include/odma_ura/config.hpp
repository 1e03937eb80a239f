#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace odma_ura {

enum class DetectorMode { PatternEnergy, PreambleCorrelation };

enum class EnergyMetric { L1, L2 };

/// How user arrivals are drawn over the observation horizon.
enum class ArrivalModel {
    Poisson,        // K_{a,T} ~ Poisson(K_a * T / n), start times uniform on [0, T)
    FixedPerBlock,  // round(K_a) arrivals in every length-n block (debugging aid)
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Every scalar parameter of the access scheme.
///
/// Field names mirror the JSON config keys. Defaults are the desk-scale
/// profile (n = 2000, 256-length polar code, T = 10 packets).
struct SystemConfig {
    std::int64_t n = 2000;            // packet length in channel uses
    int B = 100;                      // message bits per user
    int B_p = 4;                      // pattern-selector bits, M_p = 2^B_p
    int r = 16;                       // CRC length
    int n_c = 256;                    // polar block length
    int n_d = 256;                    // occupied channel uses per packet
    double P = 1.0;                   // nominal per-symbol transmit power
    double sigma2 = 1.0;              // AWGN variance
    double K_a = 5.0;                 // mean arrivals per packet duration
    std::optional<int> u;             // candidate margin; unset means ceil(K_a / 2)
    int N_s = 5;                      // outer window length in packets
    int delta = 1;                    // outer window shift in packets
    int inner_len_packets = 2;        // inner window length in packets
    int n_max = 50;                   // max inner iterations
    int n_out = 10;                   // outer iterations per outer position
    std::int64_t T = 20000;           // observation horizon in channel uses
    int list_size = 32;               // SCL list size
    std::vector<double> power_groups{1.5, 0.5};
    DetectorMode detector_mode = DetectorMode::PatternEnergy;
    EnergyMetric energy_metric = EnergyMetric::L1;
    ArrivalModel arrival_model = ArrivalModel::Poisson;
    int n_p = 0;                      // preamble length
    std::uint64_t seed = 1;           // master PRNG seed

    int B_c() const { return B - B_p; }
    int M_p() const { return 1 << B_p; }
    int k_info() const { return B_c() + r; }
    int effective_u() const;
    /// round(K_a) + u: survivors kept per packet length of candidate start times.
    int candidates_per_packet() const;

    bool operator==(const SystemConfig&) const = default;
};

/// Throws ConfigError naming the first violated invariant.
void validate(const SystemConfig& cfg);

/// Eb/N0 in dB. Preamble energy (n_p * P) is charged when a preamble is sent.
double eb_n0_db(const SystemConfig& cfg);

/// Exact inverse of eb_n0_db with respect to P.
double power_for_eb_n0(const SystemConfig& cfg, double eb_n0_db);

/// Copy of cfg with P set for the requested Eb/N0.
SystemConfig at_eb_n0(SystemConfig cfg, double eb_n0_db);

SystemConfig desk_profile(double K_a = 5.0);
SystemConfig paper_profile(double K_a = 75.0);

std::string to_string(DetectorMode mode);
DetectorMode detector_mode_from_string(const std::string& s);
std::string to_string(EnergyMetric metric);
EnergyMetric energy_metric_from_string(const std::string& s);
std::string to_string(ArrivalModel model);
ArrivalModel arrival_model_from_string(const std::string& s);

}  // namespace odma_ura
