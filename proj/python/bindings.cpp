#include <cstdint>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "odma_ura/config.hpp"
#include "odma_ura/harness.hpp"
#include "odma_ura/io.hpp"
#include "odma_ura/polar.hpp"

namespace py = pybind11;
using namespace odma_ura;

namespace {

// Configs cross the boundary as JSON text; the Python side wraps them in dicts.
SystemConfig parse(const std::string& text) { return io::config_from_json(nlohmann::json::parse(text)); }

py::dict point_dict(const SweepPoint& p)
{
    py::dict d;
    d["eb_n0_db"] = p.eb_n0_db;
    d["trials"] = p.trials;
    d["arrivals"] = p.arrivals;
    d["misses"] = p.misses;
    d["pupe"] = p.mean_pupe;
    d["ci_lo"] = p.ci95_lo;
    d["ci_hi"] = p.ci95_hi;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "ODMA unsourced random access simulator core";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("desk_profile", [](double ka) { return io::config_to_json(desk_profile(ka)).dump(); }, py::arg("ka") = 5.0);
    m.def("paper_profile", [](double ka) { return io::config_to_json(paper_profile(ka)).dump(); }, py::arg("ka") = 75.0);
    m.def("normalize_config", [](const std::string& cfg) {
        const auto c = parse(cfg);
        validate(c);
        return io::config_to_json(c).dump();
    });
    m.def("eb_n0_db", [](const std::string& cfg) { return eb_n0_db(parse(cfg)); });
    m.def("power_for_eb_n0", [](const std::string& cfg, double db) { return power_for_eb_n0(parse(cfg), db); });

    m.def("crc", [](const std::vector<std::uint8_t>& bits, int r) { return polar::crc(bits, r); }, py::arg("bits"),
          py::arg("r") = 16);
    m.def("frozen_set", [](int n_c, int k) { return polar::construct(n_c, k, 0).frozen_set(); });
    m.def(
        "polar_encode",
        [](const std::vector<std::uint8_t>& msg, int n_c, int k, int r) {
            const auto code = polar::construct(n_c, k, r);
            return polar::encode(polar::crc_append(msg, code), code);
        },
        py::arg("message"), py::arg("n_c"), py::arg("k"), py::arg("r") = 16);
    m.def(
        "polar_decode",
        [](const std::vector<double>& llr, int k, int r, int list_size) -> py::object {
            const auto code = polar::construct(static_cast<int>(llr.size()), k, r);
            const auto out = polar::scl_decode(llr, code, list_size);
            return out ? py::cast(*out) : py::none();
        },
        py::arg("llr"), py::arg("k"), py::arg("r") = 16, py::arg("list_size") = 32);

    m.def("wilson_interval", [](std::int64_t k, std::int64_t n) { return wilson_interval(k, n); });

    m.def(
        "run_trial",
        [](const std::string& cfg, std::uint64_t seed, std::uint64_t index) {
            TrialResult r;
            {
                py::gil_scoped_release release;
                r = run_trial(parse(cfg), seed, index);
            }
            py::dict d;
            d["seed"] = r.seed;
            d["K_aT"] = r.K_aT;
            d["decoded_count"] = r.decoded_count;
            d["misses"] = r.misses;
            d["pupe"] = r.pupe;
            d["detection_miss_count"] = r.detection_miss_count;
            d["false_decodes"] = r.false_decodes;
            d["runtime_ms"] = r.runtime_ms;
            return d;
        },
        py::arg("config"), py::arg("seed"), py::arg("index"));

    m.def(
        "run_sweep",
        [](const std::string& cfg, const std::vector<double>& ebn0, int trials, int workers) {
            SweepResult res;
            {
                py::gil_scoped_release release;
                res = run_sweep(parse(cfg), ebn0, trials, workers);
            }
            py::list out;
            for (const auto& p : res.points)
                out.append(point_dict(p));
            return out;
        },
        py::arg("config"), py::arg("ebn0"), py::arg("trials"), py::arg("workers") = 1);

    m.def(
        "find_min_eb_n0",
        [](const std::string& cfg, double eps, double lo, double hi, double step, int trials, int workers) {
            MinEbN0Result res;
            {
                py::gil_scoped_release release;
                res = find_min_eb_n0(parse(cfg), eps, EbN0Grid{lo, hi, step}, trials, workers);
            }
            py::list evaluated;
            for (const auto& p : res.evaluated)
                evaluated.append(point_dict(p));
            return py::make_tuple(res.eb_n0_db ? py::cast(*res.eb_n0_db) : py::none(), evaluated);
        },
        py::arg("config"), py::arg("eps"), py::arg("lo"), py::arg("hi"), py::arg("step"), py::arg("trials"),
        py::arg("workers") = 1);

    m.attr("CSV_HEADER") = io::kCsvHeader;
}
