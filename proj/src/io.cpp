#include "odma_ura/io.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace odma_ura::io {

using nlohmann::json;

namespace {

const std::set<std::string> kConfigKeys = {
    "n", "B", "B_p", "r", "n_c", "n_d", "P", "sigma2", "K_a", "u", "N_s", "delta", "inner_len_packets",
    "n_max", "n_out", "T", "list_size", "power_groups", "detector_mode", "energy_metric", "arrival_model",
    "n_p", "seed",
};

template <typename T>
void read_key(const json& j, const char* key, T& out)
{
    if (!j.contains(key))
        return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

std::string format_double(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

double parse_double(const std::string& s)
{
    if (s == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
        throw std::invalid_argument("bad number '" + s + "'");
    return v;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in)
{
    std::ifstream is(path, mode);
    if (!is)
        throw std::runtime_error("cannot open '" + path + "' for reading");
    return is;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out)
{
    std::ofstream os(path, mode);
    if (!os)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    return os;
}

}  // namespace

SystemConfig config_from_json(const json& j)
{
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!kConfigKeys.contains(key))
            throw ConfigError("unknown config key '" + key + "'");

    SystemConfig cfg;
    read_key(j, "n", cfg.n);
    read_key(j, "B", cfg.B);
    read_key(j, "B_p", cfg.B_p);
    read_key(j, "r", cfg.r);
    read_key(j, "n_c", cfg.n_c);
    read_key(j, "n_d", cfg.n_d);
    read_key(j, "P", cfg.P);
    read_key(j, "sigma2", cfg.sigma2);
    read_key(j, "K_a", cfg.K_a);
    if (j.contains("u") && !j.at("u").is_null()) {
        int u = 0;
        read_key(j, "u", u);
        cfg.u = u;
    }
    read_key(j, "N_s", cfg.N_s);
    read_key(j, "delta", cfg.delta);
    read_key(j, "inner_len_packets", cfg.inner_len_packets);
    read_key(j, "n_max", cfg.n_max);
    read_key(j, "n_out", cfg.n_out);
    read_key(j, "T", cfg.T);
    read_key(j, "list_size", cfg.list_size);
    read_key(j, "power_groups", cfg.power_groups);
    read_key(j, "n_p", cfg.n_p);
    read_key(j, "seed", cfg.seed);

    std::string s;
    if (j.contains("detector_mode")) {
        read_key(j, "detector_mode", s);
        cfg.detector_mode = detector_mode_from_string(s);
    }
    if (j.contains("energy_metric")) {
        read_key(j, "energy_metric", s);
        cfg.energy_metric = energy_metric_from_string(s);
    }
    if (j.contains("arrival_model")) {
        read_key(j, "arrival_model", s);
        cfg.arrival_model = arrival_model_from_string(s);
    }
    return cfg;
}

json config_to_json(const SystemConfig& cfg)
{
    json j;
    j["n"] = cfg.n;
    j["B"] = cfg.B;
    j["B_p"] = cfg.B_p;
    j["r"] = cfg.r;
    j["n_c"] = cfg.n_c;
    j["n_d"] = cfg.n_d;
    j["P"] = cfg.P;
    j["sigma2"] = cfg.sigma2;
    j["K_a"] = cfg.K_a;
    j["u"] = cfg.u ? json(*cfg.u) : json(nullptr);
    j["N_s"] = cfg.N_s;
    j["delta"] = cfg.delta;
    j["inner_len_packets"] = cfg.inner_len_packets;
    j["n_max"] = cfg.n_max;
    j["n_out"] = cfg.n_out;
    j["T"] = cfg.T;
    j["list_size"] = cfg.list_size;
    j["power_groups"] = cfg.power_groups;
    j["detector_mode"] = to_string(cfg.detector_mode);
    j["energy_metric"] = to_string(cfg.energy_metric);
    j["arrival_model"] = to_string(cfg.arrival_model);
    j["n_p"] = cfg.n_p;
    j["seed"] = cfg.seed;
    return j;
}

SystemConfig load_config(const std::string& path)
{
    auto is = open_in(path);
    json j;
    try {
        is >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("cannot parse '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

void save_config(const std::string& path, const SystemConfig& cfg) { write_json_file(path, config_to_json(cfg)); }

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows)
{
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        os << format_double(r.eb_n0_db) << ',' << format_double(r.ka) << ',' << r.n << ',' << r.n_c << ','
           << r.inner_len << ',' << r.detector << ',' << r.trials << ',' << r.arrivals << ',' << r.misses << ','
           << format_double(r.pupe) << ',' << format_double(r.ci_lo) << ',' << format_double(r.ci_hi) << ','
           << r.seed << '\n';
    }
}

std::vector<CsvRow> read_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader)
        throw std::runtime_error("results CSV header mismatch");
    std::vector<CsvRow> rows;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        const auto c = split_csv_line(line);
        if (c.size() != 13)
            throw std::runtime_error("results CSV row has " + std::to_string(c.size()) + " columns");
        CsvRow r;
        r.eb_n0_db = parse_double(c[0]);
        r.ka = parse_double(c[1]);
        r.n = std::stoll(c[2]);
        r.n_c = std::stoi(c[3]);
        r.inner_len = std::stoi(c[4]);
        r.detector = c[5];
        r.trials = std::stoi(c[6]);
        r.arrivals = std::stoll(c[7]);
        r.misses = std::stoll(c[8]);
        r.pupe = parse_double(c[9]);
        r.ci_lo = parse_double(c[10]);
        r.ci_hi = parse_double(c[11]);
        r.seed = std::stoull(c[12]);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_csv_file(const std::string& path, const std::vector<CsvRow>& rows)
{
    auto os = open_out(path);
    write_csv(os, rows);
}

json run_metadata(const SystemConfig& cfg, const std::string& command)
{
    json j;
    j["command"] = command;
    j["config"] = config_to_json(cfg);
    j["effective_u"] = cfg.effective_u();
    j["pupe_aggregation"] = "pooled: sum of misses / sum of arrivals over trials; trials without arrivals add nothing";
    j["confidence_interval"] = "wilson 95%";
    j["eb_n0_definition"] = "(n_d + n_p) * P / (2 * B * sigma2)";
    return j;
}

void write_json_file(const std::string& path, const json& j)
{
    auto os = open_out(path);
    os << j.dump(2) << '\n';
}

json patterns_to_json(const PatternMatrix& pm)
{
    return json{{"n", pm.n}, {"n_d", pm.n_d}, {"n_p", pm.n_p}, {"seed", pm.seed}, {"columns", pm.columns}};
}

PatternMatrix patterns_from_json(const json& j)
{
    PatternMatrix pm;
    if (j.is_array()) {
        pm.columns = j.get<std::vector<std::vector<std::int32_t>>>();
        std::int64_t hi = 0;
        for (const auto& col : pm.columns)
            for (auto v : col)
                hi = std::max<std::int64_t>(hi, v + 1);
        pm.n = hi;
        pm.n_d = pm.columns.empty() ? 0 : static_cast<int>(pm.columns.front().size());
    } else {
        pm.n = j.at("n").get<std::int64_t>();
        pm.n_d = j.at("n_d").get<int>();
        pm.n_p = j.value("n_p", 0);
        pm.seed = j.value("seed", std::uint64_t{0});
        pm.columns = j.at("columns").get<std::vector<std::vector<std::int32_t>>>();
    }
    for (const auto& col : pm.columns) {
        if (static_cast<int>(col.size()) != pm.n_d)
            throw std::invalid_argument("pattern columns must all have weight n_d");
        for (std::size_t i = 0; i < col.size(); ++i)
            if (col[i] < pm.n_p || col[i] >= pm.n || (i > 0 && col[i] <= col[i - 1]))
                throw std::invalid_argument("pattern column indices must be sorted, unique and within [n_p, n)");
    }
    return pm;
}

json frozen_set_to_json(const polar::PolarCode& code) { return json(code.frozen_set()); }

json trace_to_json(const std::vector<TraceEvent>& trace)
{
    json arr = json::array();
    for (const auto& e : trace)
        arr.push_back({{"outer_start", e.outer_start},
                       {"inner_start", e.inner_start},
                       {"outer_iteration", e.outer_iteration},
                       {"iteration", e.iteration},
                       {"candidates_tested", e.candidates_tested},
                       {"decodes", e.decodes},
                       {"residual_energy", e.residual_energy}});
    return arr;
}

std::string bits_to_string(const BitVector& bits)
{
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i)
        s[i] = bits[i] ? '1' : '0';
    return s;
}

BitVector bits_from_string(const std::string& s)
{
    BitVector bits(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '0' && s[i] != '1')
            throw std::invalid_argument("bit string must contain only 0 and 1");
        bits[i] = s[i] == '1' ? 1 : 0;
    }
    return bits;
}

void dump_realization(const std::string& prefix, const ChannelRealization& realization)
{
    {
        auto os = open_out(prefix + ".bin", std::ios::out | std::ios::binary);
        for (double v : realization.y) {
            auto word = std::bit_cast<std::uint64_t>(v);
            unsigned char buf[8];
            for (int b = 0; b < 8; ++b)
                buf[b] = static_cast<unsigned char>((word >> (8 * b)) & 0xff);
            os.write(reinterpret_cast<const char*>(buf), 8);
        }
    }
    json arr = json::array();
    for (const auto& a : realization.arrivals)
        arr.push_back({{"message", bits_to_string(a.message)},
                       {"delta", a.delta},
                       {"pattern_index", a.pattern_index},
                       {"group_power", a.group_power}});
    write_json_file(prefix + ".json",
                    json{{"length", realization.y.size()}, {"sigma2", realization.sigma2}, {"arrivals", arr}});
}

ChannelRealization load_realization(const std::string& prefix)
{
    ChannelRealization out;
    auto js = open_in(prefix + ".json");
    json meta;
    js >> meta;
    out.sigma2 = meta.at("sigma2").get<double>();
    for (const auto& a : meta.at("arrivals")) {
        Arrival arr;
        arr.message = bits_from_string(a.at("message").get<std::string>());
        arr.delta = a.at("delta").get<std::int64_t>();
        arr.pattern_index = a.at("pattern_index").get<int>();
        arr.group_power = a.at("group_power").get<double>();
        out.arrivals.push_back(std::move(arr));
    }
    const auto len = meta.at("length").get<std::size_t>();
    auto is = open_in(prefix + ".bin", std::ios::in | std::ios::binary);
    out.y.resize(len);
    for (auto& v : out.y) {
        unsigned char buf[8];
        if (!is.read(reinterpret_cast<char*>(buf), 8))
            throw std::runtime_error("channel dump shorter than its sidecar length");
        std::uint64_t word = 0;
        for (int b = 0; b < 8; ++b)
            word |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
        v = std::bit_cast<double>(word);
    }
    return out;
}

}  // namespace odma_ura::io
