// odma_ura_sim: Monte Carlo driver for the ODMA unsourced random access receiver.
//
//   odma_ura_sim run --config cfg.json --trials 100 --seed 7 --out run.csv
//   odma_ura_sim sweep --ka 5 --ebn0 2:8:2 --trials 200 --out sweep.csv
//   odma_ura_sim minebn0 --ka 10 --eps 0.05 --ebn0 3:15:1 --trials 100 --out min.csv
//   odma_ura_sim ablate-window --lens 2,3,4 --ebn0 4 --trials 100 --out fig3.csv
//
// Every CSV gets a `<out>.json` sidecar holding the config snapshot.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "odma_ura/config.hpp"
#include "odma_ura/harness.hpp"
#include "odma_ura/io.hpp"
#include "odma_ura/receiver.hpp"

using namespace odma_ura;

namespace {

struct Common {
    std::string config_path;
    std::string profile = "desk";
    std::optional<double> ka;
    std::optional<std::string> detector;
    std::optional<std::uint64_t> seed;
    std::optional<int> inner_len;
    int trials = 100;
    int workers = 1;
    std::string out;
};

void add_common(CLI::App* sub, Common& c, bool with_trials = true)
{
    sub->add_option("--config", c.config_path, "JSON config; missing keys keep the profile defaults");
    sub->add_option("--profile", c.profile, "base profile")->check(CLI::IsMember({"desk", "paper"}));
    sub->add_option("--ka", c.ka, "mean arrivals per packet duration");
    sub->add_option("--detector", c.detector, "candidate detector")->check(CLI::IsMember({"energy", "preamble"}));
    sub->add_option("--seed", c.seed, "master seed");
    sub->add_option("--inner-len", c.inner_len, "inner window length in packets");
    if (with_trials) {
        sub->add_option("--trials", c.trials, "trials per Eb/N0 point")->check(CLI::PositiveNumber);
        sub->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    }
    sub->add_option("--out", c.out, "output path");
}

SystemConfig build_config(const Common& c)
{
    SystemConfig cfg;
    if (!c.config_path.empty()) {
        cfg = io::load_config(c.config_path);
    } else {
        cfg = c.profile == "paper" ? paper_profile() : desk_profile();
    }
    if (c.ka) {
        cfg.K_a = *c.ka;
        cfg.u.reset();
    }
    if (c.detector) {
        cfg.detector_mode = detector_mode_from_string(*c.detector);
        cfg.n_p = cfg.detector_mode == DetectorMode::PreambleCorrelation ? 256 : 0;
    }
    if (c.seed)
        cfg.seed = *c.seed;
    if (c.inner_len)
        cfg.inner_len_packets = *c.inner_len;
    validate(cfg);
    return cfg;
}

void emit(const Common& c, const SystemConfig& cfg, const std::string& command, const std::vector<CsvRow>& rows,
          nlohmann::json extra = {})
{
    if (c.out.empty()) {
        io::write_csv(std::cout, rows);
        return;
    }
    io::write_csv_file(c.out, rows);
    auto meta = io::run_metadata(cfg, command);
    if (!extra.is_null())
        meta.update(extra);
    io::write_json_file(c.out + ".json", meta);
    std::cerr << "wrote " << c.out << " (" << rows.size() << " rows)\n";
}

void progress(const SweepPoint& p)
{
    std::cerr << "  " << p.eb_n0_db << " dB: pupe " << p.mean_pupe << " [" << p.ci95_lo << ", " << p.ci95_hi << "] "
              << p.misses << "/" << p.arrivals << "\n";
}

std::string joined(int argc, char** argv)
{
    std::string s;
    for (int i = 0; i < argc; ++i)
        s += (i ? " " : "") + std::string(argv[i]);
    return s;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ODMA unsourced random access simulator"};
    app.require_subcommand(1);
    const std::string command = joined(argc, argv);

    Common run_c, sweep_c, min_c, abl_c, exp_c, dump_c, trace_c;
    std::optional<double> run_ebn0;
    std::string sweep_grid = "2:8:2", min_grid = "3:15:1", abl_grid = "4";
    double eps = 0.05;
    std::vector<int> lens{2, 3, 4};
    std::string what;
    std::uint64_t trial = 0;

    auto* run = app.add_subcommand("run", "trials at a single operating point");
    add_common(run, run_c);
    run->add_option("--ebn0", run_ebn0, "Eb/N0 in dB; default keeps the config power");

    auto* sweep = app.add_subcommand("sweep", "PUPE over an Eb/N0 grid");
    add_common(sweep, sweep_c);
    sweep->add_option("--ebn0", sweep_grid, "lo:hi:step or a single value");

    auto* minebn0 = app.add_subcommand("minebn0", "smallest Eb/N0 meeting a PUPE target");
    add_common(minebn0, min_c);
    minebn0->add_option("--eps", eps, "target PUPE");
    minebn0->add_option("--ebn0", min_grid, "search grid lo:hi:step");

    auto* ablate = app.add_subcommand("ablate-window", "PUPE versus inner window length");
    add_common(ablate, abl_c);
    ablate->add_option("--lens", lens, "inner window lengths in packets")->delimiter(',');
    ablate->add_option("--ebn0", abl_grid, "lo:hi:step or a single value");

    auto* exp = app.add_subcommand("export", "write the pattern matrix, frozen set or resolved config as JSON");
    add_common(exp, exp_c, false);
    exp->add_option("what", what, "patterns | frozen | config")
        ->required()
        ->check(CLI::IsMember({"patterns", "frozen", "config"}));

    auto* dump = app.add_subcommand("dump-channel", "write one channel realization (<out>.bin + <out>.json)");
    add_common(dump, dump_c, false);
    dump->add_option("--trial", trial, "trial index");
    dump->add_option("--ebn0", run_ebn0, "Eb/N0 in dB");

    auto* trace = app.add_subcommand("trace", "decode one trial and write the per-iteration trace as JSON");
    add_common(trace, trace_c, false);
    trace->add_option("--trial", trial, "trial index");
    trace->add_option("--ebn0", run_ebn0, "Eb/N0 in dB");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto cfg = build_config(run_c);
            if (run_ebn0)
                cfg = at_eb_n0(cfg, *run_ebn0);
            const Simulation sim(cfg);
            const auto results = run_trials(sim, run_c.trials, run_c.workers);
            const auto pooled = pool_pupe(results);
            const SweepPoint p{eb_n0_db(cfg), run_c.trials, pooled.arrivals, pooled.misses,
                               pooled.pupe,   pooled.ci_lo, pooled.ci_hi};
            progress(p);
            nlohmann::json per_trial = nlohmann::json::array();
            for (const auto& r : results)
                per_trial.push_back({{"trial_index", r.trial_index},
                                     {"seed", r.seed},
                                     {"K_aT", r.K_aT},
                                     {"decoded_count", r.decoded_count},
                                     {"misses", r.misses},
                                     {"pupe", r.pupe},
                                     {"detection_miss_count", r.detection_miss_count},
                                     {"false_decodes", r.false_decodes},
                                     {"runtime_ms", r.runtime_ms}});
            emit(run_c, cfg, command, {make_row(cfg, p)}, {{"trials", per_trial}});
        } else if (*sweep) {
            const auto cfg = build_config(sweep_c);
            const auto res = run_sweep(cfg, parse_grid(sweep_grid).points(), sweep_c.trials, sweep_c.workers);
            std::vector<CsvRow> rows;
            for (const auto& p : res.points) {
                progress(p);
                rows.push_back(make_row(cfg, p));
            }
            emit(sweep_c, cfg, command, rows);
        } else if (*minebn0) {
            const auto cfg = build_config(min_c);
            const auto res = find_min_eb_n0(cfg, eps, parse_grid(min_grid), min_c.trials, min_c.workers);
            for (const auto& p : res.evaluated)
                progress(p);
            std::vector<CsvRow> rows;
            if (res.eb_n0_db)
                rows.push_back(make_row(cfg, res.evaluated.back()));
            std::cerr << "required Eb/N0: " << (res.eb_n0_db ? std::to_string(*res.eb_n0_db) + " dB" : "not found")
                      << "\n";
            nlohmann::json extra{{"eps", eps}, {"grid", min_grid}};
            extra["required_eb_n0_db"] = res.eb_n0_db ? nlohmann::json(*res.eb_n0_db) : nlohmann::json(nullptr);
            emit(min_c, cfg, command, rows, extra);
        } else if (*ablate) {
            auto base = build_config(abl_c);
            const auto pts = parse_grid(abl_grid).points();
            std::vector<CsvRow> rows;
            for (int len : lens) {
                auto cfg = base;
                cfg.inner_len_packets = len;
                std::cerr << "inner window " << len << "n\n";
                for (const auto& p : run_sweep(cfg, pts, abl_c.trials, abl_c.workers).points) {
                    progress(p);
                    rows.push_back(make_row(cfg, p));
                }
            }
            emit(abl_c, base, command, rows);
        } else if (*exp) {
            const auto cfg = build_config(exp_c);
            nlohmann::json j;
            if (what == "patterns")
                j = io::patterns_to_json(gen_pattern_matrix(cfg));
            else if (what == "frozen")
                j = io::frozen_set_to_json(make_code(cfg));
            else
                j = io::config_to_json(cfg);
            if (exp_c.out.empty())
                std::cout << j.dump(2) << "\n";
            else
                io::write_json_file(exp_c.out, j);
        } else if (*dump) {
            auto cfg = build_config(dump_c);
            if (run_ebn0)
                cfg = at_eb_n0(cfg, *run_ebn0);
            if (dump_c.out.empty())
                throw std::invalid_argument("dump-channel needs --out <prefix>");
            io::dump_realization(dump_c.out, Simulation(cfg).realize(trial));
        } else if (*trace) {
            auto cfg = build_config(trace_c);
            if (run_ebn0)
                cfg = at_eb_n0(cfg, *run_ebn0);
            const Simulation sim(cfg);
            const auto real = sim.realize(trial);
            const auto out = decode_stream(real.y, sim.context(), true);
            nlohmann::json j{{"trial_index", trial},
                             {"arrivals", real.arrivals.size()},
                             {"decoded", out.messages.size()},
                             {"misses", count_misses(out.messages, real.arrivals)},
                             {"events", io::trace_to_json(out.trace)}};
            if (trace_c.out.empty())
                std::cout << j.dump(2) << "\n";
            else
                io::write_json_file(trace_c.out, j);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
