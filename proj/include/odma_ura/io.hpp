#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "odma_ura/channel.hpp"
#include "odma_ura/config.hpp"
#include "odma_ura/harness.hpp"
#include "odma_ura/odma.hpp"
#include "odma_ura/polar.hpp"
#include "odma_ura/receiver.hpp"

namespace odma_ura::io {

/// Flat key-value document; missing keys keep the desk-profile defaults and
/// unknown keys throw ConfigError.
SystemConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SystemConfig& cfg);
SystemConfig load_config(const std::string& path);
void save_config(const std::string& path, const SystemConfig& cfg);

inline constexpr const char* kCsvHeader =
    "eb_n0_db,ka,n,n_c,inner_len,detector,trials,arrivals,misses,pupe,ci_lo,ci_hi,seed";

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows);
std::vector<CsvRow> read_csv(std::istream& is);
void write_csv_file(const std::string& path, const std::vector<CsvRow>& rows);

/// Sidecar written next to a results CSV: config snapshot plus aggregation notes.
nlohmann::json run_metadata(const SystemConfig& cfg, const std::string& command);
void write_json_file(const std::string& path, const nlohmann::json& j);

nlohmann::json patterns_to_json(const PatternMatrix& pm);
/// Accepts either the object written by patterns_to_json or a bare list of index lists.
PatternMatrix patterns_from_json(const nlohmann::json& j);

nlohmann::json frozen_set_to_json(const polar::PolarCode& code);

nlohmann::json trace_to_json(const std::vector<TraceEvent>& trace);

/// `<prefix>.bin`: y as little-endian float64; `<prefix>.json`: arrivals and sigma2.
void dump_realization(const std::string& prefix, const ChannelRealization& realization);
ChannelRealization load_realization(const std::string& prefix);

std::string bits_to_string(const BitVector& bits);
BitVector bits_from_string(const std::string& s);

}  // namespace odma_ura::io
