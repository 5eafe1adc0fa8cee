#include "sdlnet/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sdlnet/clockgen.hpp"
#include "sdlnet/engine.hpp"
#include "sdlnet/extraction.hpp"
#include "sdlnet/lossmodel.hpp"
#include "sdlnet/statespace.hpp"
#include "sdlnet/touchstone.hpp"
#include "sdlnet/units.hpp"

namespace sdlnet {

namespace {

using nlohmann::json;

struct LoadedConfig {
    NetworkSpec spec;
    SimConfig sim;
};

json read_json(const std::string& path, const char* what) {
    std::ifstream is(path);
    if (!is) throw ConfigError(what, "cannot open " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError(what, path + ": malformed JSON: " + e.what());
    }
}

// Network keys go to spec_from_json; simulation keys and reduce_port are
// handled here.
LoadedConfig load_config(const std::string& path) {
    json doc = read_json(path, "config");
    if (!doc.is_object()) throw ConfigError("config", path + ": expected a JSON object");

    LoadedConfig cfg;
    std::vector<Issue> issues;
    auto take_int = [&](const char* key, int& slot) {
        if (!doc.contains(key)) return;
        if (!doc.at(key).is_number_integer()) {
            issues.push_back({key, "expected an integer"});
        } else {
            slot = doc.at(key).get<int>();
        }
        doc.erase(key);
    };
    std::optional<int> reduce_port;
    if (doc.contains("reduce_port")) {
        int p = 0;
        take_int("reduce_port", p);
        reduce_port = p;
    }
    take_int("samples_per_delay", cfg.sim.samples_per_delay);
    take_int("settle_hyperperiods", cfg.sim.settle_hyperperiods);
    take_int("measure_hyperperiods", cfg.sim.measure_hyperperiods);
    if (doc.contains("source_amplitude")) {
        if (!doc.at("source_amplitude").is_number()) {
            issues.push_back({"source_amplitude", "expected a number"});
        } else {
            cfg.sim.source_amplitude = doc.at("source_amplitude").get<double>();
        }
        doc.erase("source_amplitude");
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));

    cfg.spec = spec_from_json(doc);
    if (reduce_port) cfg.spec = reduce_network(cfg.spec, *reduce_port);
    if (auto sim_issues = check_sim_config(cfg.sim, cfg.spec); !sim_issues.empty()) {
        throw ConfigError(std::move(sim_issues));
    }
    return cfg;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << text;
    if (!os) throw IoError("failed writing " + path);
}

std::string path_key(Port from, Port to) { return std::to_string(from) + "->" + std::to_string(to); }

CirculationState infer_state(const SParamGrid& grid) {
    CirculationState s;
    for (Port from : grid.ports) {
        Port best = from;
        double best_mag = -1.0;
        for (Port to : grid.ports) {
            if (to == from) continue;
            const double mag = std::abs(grid.at(0, to, from));
            if (mag > best_mag) {
                best_mag = mag;
                best = to;
            }
        }
        s.next[from] = best;
    }
    return s;
}

// =============================================================================
// simulate
// =============================================================================

struct SimulateArgs {
    std::string config;
    std::string schedule;
    std::string state;
    std::string out = "sdlnet_out";
    bool dump_traces = false;
    std::size_t points = 64;
    double fmin = 10e6;
    double fmax = 900e6;
    unsigned jobs = 1;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const auto cfg = load_config(a.config);
    const auto& spec = cfg.spec;

    Schedule schedule;
    std::string schedule_id;
    if (a.schedule.empty()) {
        schedule = restrict_to(canonical_schedule(spec.n_lines, spec.line.delay), spec);
        schedule_id = "canonical";
    } else {
        schedule = schedule_from_json(read_json(a.schedule, "schedule"));
        schedule_id = std::filesystem::path(a.schedule).filename().string();
    }

    const double dt = spec.line.delay / cfg.sim.samples_per_delay;
    const auto freqs = coherent_grid(schedule.hyperperiod, cfg.sim.measure_hyperperiods, a.fmin, a.fmax, a.points, dt);

    const auto grid = sweep(spec, schedule, cfg.sim, freqs, a.jobs, schedule_id);

    CirculationState state;
    if (!a.state.empty()) {
        state = state_from_json(read_json(a.state, "state"));
    } else if (a.schedule.empty()) {
        state = canonical_state(spec);
    } else {
        state = infer_state(grid);
    }
    const auto m = metrics(grid, state);

    const std::string prefix = a.out;
    write_touchstone(grid, std::filesystem::path(prefix + touchstone_extension(grid.ports.size())));
    write_csv(grid, std::filesystem::path(prefix + ".csv"));

    json doc;
    doc["generated_by"] = version_string;
    doc["schedule"] = schedule_id;
    doc["spec"] = spec_to_json(spec);
    doc["ports"] = grid.ports;
    doc["frequencies_hz"] = grid.frequencies;
    doc["state"] = state_to_json(state);
    json il = json::object(), iso = json::object(), rl = json::object(), gd = json::object();
    for (const auto& p : m.insertion_loss) il[path_key(p.from, p.to)] = p.db;
    for (const auto& p : m.isolation) iso[path_key(p.from, p.to)] = p.db;
    for (const auto& p : m.return_loss) rl[std::to_string(p.port)] = p.db;
    doc["insertion_loss_db"] = il;
    doc["isolation_db"] = iso;
    doc["return_loss_db"] = rl;
    try {
        for (const auto& p : m.insertion_loss) {
            std::vector<double> ns;
            for (double s : group_delay(grid, p.from, p.to)) ns.push_back(s * 1e9);
            gd[path_key(p.from, p.to)] = ns;
        }
        doc["group_delay_ns"] = gd;
    } catch (const ConfigError& e) {
        doc["group_delay_error"] = e.what();
    }
    write_text(prefix + ".metrics.json", doc.dump(2) + "\n");

    if (a.dump_traces) {
        const TransientEngine engine(spec, schedule, cfg.sim);
        for (Port q : grid.ports) {
            const auto tr = engine.run({q, freqs.front(), cfg.sim.source_amplitude});
            std::ostringstream os;
            write_traces_csv(tr, os);
            write_text(prefix + ".trace_p" + std::to_string(q) + ".csv", os.str());
        }
    }

    out << std::fixed << std::setprecision(3);
    out << "wrote " << prefix << touchstone_extension(grid.ports.size()) << ", " << prefix << ".csv, " << prefix
        << ".metrics.json (" << grid.frequencies.size() << " frequencies, " << grid.ports.size() << " ports)\n";
    out << "at " << grid.frequencies.front() * 1e-6 << " MHz:\n";
    for (const auto& p : m.insertion_loss) out << "  IL " << path_key(p.from, p.to) << " = " << p.db.front() << " dB\n";
    double worst_iso = isolation_cap_db;
    for (const auto& p : m.isolation) worst_iso = std::min(worst_iso, p.db.front());
    if (!m.isolation.empty()) out << "  worst isolation = " << worst_iso << " dB\n";
    return exit_ok;
}

// =============================================================================
// states
// =============================================================================

BigCount brute_force_count(int n) {
    BigCount total = 0;
    StateEnumerator it(n);
    while (it.next()) ++total;
    return total;
}

int cmd_states(const std::string& mode, int n, std::optional<std::size_t> limit, const std::string& csv,
               std::ostream& out) {
    if (n < 1) throw ConfigError("N", "must be >= 1");
    if (mode == "count") {
        out << count_states(static_cast<unsigned>(n)) << "\n";
        if (n <= 5) {
            const auto brute = brute_force_count(n);
            out << "# brute-force: " << brute << (brute == count_states(static_cast<unsigned>(n)) ? " (match)" : " (MISMATCH)")
                << "\n";
        }
        if (!csv.empty()) {
            std::ostringstream os;
            os << "n_lines,ports,b_given_a,states\n";
            for (int k = 1; k <= n; ++k) {
                os << k << "," << 2 * k << "," << count_b_given_a(static_cast<unsigned>(k)) << ","
                   << count_states(static_cast<unsigned>(k)) << "\n";
            }
            write_text(csv, os.str());
        }
        return exit_ok;
    }
    StateEnumerator it(n, limit);
    while (auto s = it.next()) out << state_to_json(*s).dump() << "\n";
    return exit_ok;
}

// =============================================================================
// synth / validate-clocks / loss-contour
// =============================================================================

int cmd_synth(const std::string& state_path, const std::string& config, const std::string& out_path,
              std::ostream& out) {
    const auto cfg = load_config(config);
    const auto state = state_from_json(read_json(state_path, "state"));
    const auto schedule = synth_schedule(state, cfg.spec);
    const auto text = schedule_to_json(schedule).dump(2) + "\n";
    if (out_path.empty()) {
        out << text;
    } else {
        write_text(out_path, text);
        out << "wrote " << out_path << " (hyperperiod " << seconds_to_ns(schedule.hyperperiod) << " ns, "
            << cycles_of(state).size() << " cycle(s))\n";
    }
    return exit_ok;
}

int cmd_validate_clocks(const std::string& schedule_path, const std::string& config, std::ostream& out) {
    const auto cfg = load_config(config);
    const auto schedule = schedule_from_json(read_json(schedule_path, "schedule"));
    const auto report = validate_schedule(schedule, cfg.spec);
    out << report_to_json(report).dump(2) << "\n";
    return report.passed() ? exit_ok : exit_validation_failed;
}

struct ContourArgs {
    double ts_min = 0.0, ts_max = 5.0;
    int ts_steps = 6;
    double delta_min = 10.0, delta_max = 50.0;
    int delta_steps = 9;
    double r_on = 6.0, r_off = 120e3, z0 = 50.0;
    std::string out;
};

std::vector<double> linspace_ns(double lo, double hi, int steps, const char* what) {
    if (steps < 1) throw ConfigError(what, "steps must be >= 1");
    if (hi < lo) throw ConfigError(what, "max below min");
    std::vector<double> v;
    for (int i = 0; i < steps; ++i) {
        const double x = steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
        v.push_back(ns_to_seconds(x));
    }
    return v;
}

int cmd_loss_contour(const ContourArgs& a, std::ostream& out) {
    const auto ts = linspace_ns(a.ts_min, a.ts_max, a.ts_steps, "ts");
    const auto deltas = linspace_ns(a.delta_min, a.delta_max, a.delta_steps, "delta");
    const auto contour = loss_contour(ts, deltas, a.r_on, a.r_off, a.z0);
    std::ostringstream os;
    write_contour_csv(contour, os);
    if (a.out.empty()) {
        out << os.str();
    } else {
        write_text(a.out, os.str());
    }
    return exit_ok;
}

void print_issues(const ConfigError& e, std::ostream& err) {
    err << "error: invalid input\n";
    for (const auto& i : e.issues()) err << "  " << i.field << ": " << i.message << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Switched-delay-line nonreciprocal network simulator and synthesizer", "sdlnet"};
    app.set_version_flag("--version", version_string);
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Sweep S-parameters by transient simulation");
    simulate->add_option("--config", sim.config, "Network + simulation config JSON")->required();
    simulate->add_option("--schedule", sim.schedule, "Schedule JSON (default: canonical clocks)");
    simulate->add_option("--state", sim.state, "Circulation state JSON used for the metrics");
    simulate->add_option("--out", sim.out, "Output prefix");
    simulate->add_flag("--dump-traces", sim.dump_traces, "Write time traces at the lowest frequency");
    simulate->add_option("--points", sim.points, "Maximum frequency points");
    simulate->add_option("--fmin", sim.fmin, "Lowest frequency, Hz");
    simulate->add_option("--fmax", sim.fmax, "Highest frequency, Hz");
    simulate->add_option("--jobs", sim.jobs, "Worker threads");

    std::string mode;
    int n = 0;
    std::optional<std::size_t> limit;
    std::string states_csv;
    auto* states = app.add_subcommand("states", "Count or enumerate programmable circulation states");
    states->add_option("mode", mode, "count | enumerate")->required()->check(CLI::IsMember({"count", "enumerate"}));
    states->add_option("N", n, "Number of delay lines")->required();
    states->add_option("--limit", limit, "Stop after this many states");
    states->add_option("--out", states_csv, "CSV table of counts for 1..N (count mode)");

    std::string state_path, config, out_path, schedule_path;
    auto* synth = app.add_subcommand("synth", "Synthesize a clock schedule for a circulation state");
    synth->add_option("--state", state_path, "State JSON {\"1\": 2, ...}")->required();
    synth->add_option("--config", config, "Network config JSON")->required();
    synth->add_option("--out", out_path, "Schedule JSON output (default: stdout)");

    ContourArgs contour;
    auto* loss = app.add_subcommand("loss-contour", "Analytic switching-loss contour CSV");
    loss->add_option("--ts-min", contour.ts_min, "ns");
    loss->add_option("--ts-max", contour.ts_max, "ns");
    loss->add_option("--ts-steps", contour.ts_steps);
    loss->add_option("--delta-min", contour.delta_min, "ns");
    loss->add_option("--delta-max", contour.delta_max, "ns");
    loss->add_option("--delta-steps", contour.delta_steps);
    loss->add_option("--r-on", contour.r_on, "ohm");
    loss->add_option("--r-off", contour.r_off, "ohm");
    loss->add_option("--z0", contour.z0, "ohm");
    loss->add_option("--out", contour.out, "CSV output (default: stdout)");

    auto* validate = app.add_subcommand("validate-clocks", "Check a schedule for one-hot and contention rules");
    validate->add_option("--schedule", schedule_path)->required();
    validate->add_option("--config", config)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_input_error;
    }

    try {
        if (*simulate) return cmd_simulate(sim, out);
        if (*states) return cmd_states(mode, n, limit, states_csv, out);
        if (*synth) return cmd_synth(state_path, config, out_path, out);
        if (*loss) return cmd_loss_contour(contour, out);
        if (*validate) return cmd_validate_clocks(schedule_path, config, out);
    } catch (const ConfigError& e) {
        print_issues(e, err);
        return exit_input_error;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const std::exception& e) {
        err << "internal fault: " << e.what() << "\n";
        return exit_internal_fault;
    }
    return exit_input_error;
}

}  // namespace sdlnet
