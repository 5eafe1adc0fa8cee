// Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sdlnet/clockgen.hpp"
#include "sdlnet/engine.hpp"
#include "sdlnet/extraction.hpp"
#include "sdlnet/lossmodel.hpp"
#include "sdlnet/statespace.hpp"
#include "sdlnet/touchstone.hpp"
#include "sdlnet/units.hpp"

using namespace sdlnet;

namespace {

constexpr double kDelta = 10.5e-9;

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Grids produced by criteria 2-8, checked again for passivity in criterion 9.
std::vector<std::pair<std::string, SParamGrid>> g_grids;

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double mag_db(std::complex<double> s) { return s == 0.0 ? -isolation_cap_db : db20(std::abs(s)); }

SwitchModel ideal_switch() { return {0.0, 1e12, 0.0}; }

// Lowest `points` coherent bins of a schedule.
std::vector<double> low_bins(const Schedule& s, const SimConfig& cfg, const NetworkSpec& spec, std::size_t points) {
    const double window = cfg.measure_hyperperiods * s.hyperperiod;
    const double dt = spec.line.delay / cfg.samples_per_delay;
    return coherent_grid(s.hyperperiod, cfg.measure_hyperperiods, 1.0 / window, points / window, points, dt);
}

// ---------------------------------------------------------------------------

Outcome clock_correctness() {
    Outcome o;
    for (int n : {1, 2, 3, 4, 6}) {
        const auto spec = make_full_spec(n, kDelta, ideal_switch());
        const auto r = validate_schedule(canonical_schedule(n, kDelta), spec, 64);
        bool duty_ok = true;
        for (const auto& [key, duty] : r.duty_cycles) duty_ok = duty_ok && std::abs(duty - 1.0 / n) < 1e-12;
        bool pairs_ok = true;
        for (Port m = 1; m <= 2 * n; ++m) {
            const std::pair<Port, Port> want{m, m % (2 * n) + 1};
            pairs_ok = pairs_ok && std::find(r.receiver_offset_pairs.begin(), r.receiver_offset_pairs.end(), want) !=
                                       r.receiver_offset_pairs.end();
        }
        const bool ok = r.one_hot_per_port && r.no_line_contention_per_side && duty_ok && pairs_ok;
        if (!ok) {
            o.pass = false;
            o.detail += "N=" + std::to_string(n) + " failed; ";
        }
    }
    if (o.pass) o.detail = "N in {1,2,3,4,6}: one-hot, no contention, duty 1/N, delta-offset pairs";
    return o;
}

Outcome ideal_circulation() {
    const auto spec = make_full_spec(2, kDelta, ideal_switch());
    const auto sched = canonical_schedule(2, kDelta);
    const SimConfig cfg;
    // Bins 1..10 span exactly one decade.
    const auto freqs = low_bins(sched, cfg, spec, 10);
    const auto grid = sweep(spec, sched, cfg, freqs, 1, "canonical");
    g_grids.emplace_back("ideal N=2", grid);

    double worst_il = 0.0, worst_flat = 0.0, worst_block = -1e9;
    for (Port m = 1; m <= 4; ++m) {
        const Port next = m % 4 + 1;
        double lo = 1e9, hi = -1e9;
        for (std::size_t f = 0; f < freqs.size(); ++f) {
            const double db = mag_db(grid.at(f, next, m));
            worst_il = std::max(worst_il, std::abs(db));
            lo = std::min(lo, db);
            hi = std::max(hi, db);
            for (Port p = 1; p <= 4; ++p) {
                if (p != next) worst_block = std::max(worst_block, mag_db(grid.at(f, p, m)));
            }
        }
        worst_flat = std::max(worst_flat, hi - lo);
    }
    Outcome o;
    o.pass = worst_il <= 0.01 && worst_flat <= 0.01 && worst_block <= -100.0 &&
             std::abs(freqs.back() / freqs.front() - 10.0) < 1e-9 && freqs.size() == 10;
    o.detail = "10 bins " + fmt("%.4g", freqs.front() * 1e-6) + "-" + fmt("%.4g", freqs.back() * 1e-6) +
               " MHz; max |IL| " + fmt("%.2e", worst_il) + " dB, flatness " + fmt("%.2e", worst_flat) +
               " dB, worst blocked " + fmt("%.1f", worst_block) + " dB";
    return o;
}

Outcome h_reduction() {
    Outcome o;
    double worst = 0.0;
    for (double r : {0.1, 3.0, 6.0, 50.0, 60e3}) {
        const std::vector<double> a{1.0}, none{0.0};
        const auto w = solve_side(a, none, Eigen::MatrixXd::Constant(1, 1, 1.0 / r), 50.0);
        const double expect = 100.0 / (r + 100.0);
        worst = std::max(worst, std::abs(w.lines[0] - expect) / expect);
    }
    o.pass = worst <= 1e-12;
    o.detail = "5 resistances, worst relative error " + fmt("%.2e", worst);
    return o;
}

Outcome analytic_vs_engine() {
    Outcome o;
    for (double ts_ns : {0.0, 1.0, 2.0, 4.0}) {
        const auto spec = make_full_spec(2, kDelta, {3.0, 60e3, ns_to_seconds(ts_ns)});
        const auto sched = canonical_schedule(2, kDelta);
        const SimConfig cfg;
        const auto grid = sweep(spec, sched, cfg, low_bins(sched, cfg, spec, 1), 1, "canonical");
        g_grids.emplace_back("t_s=" + fmt("%g", ts_ns) + " ns", grid);
        double engine_il = 0.0;
        for (Port m = 1; m <= 4; ++m) engine_il = std::max(engine_il, loss_db(grid.at(0, m % 4 + 1, m)));
        const double analytic = analytic_il({spec.sw.t_s, kDelta, 3.0, 60e3, 50.0});
        const bool ok = std::abs(engine_il - analytic) <= 0.3;
        o.pass = o.pass && ok;
        o.detail += "t_s=" + fmt("%g", ts_ns) + ": engine " + fmt("%.3f", engine_il) + " vs analytic " +
                    fmt("%.3f", analytic) + (ok ? "" : " (off)") + "; ";
    }
    return o;
}

Outcome realistic_parameters() {
    const auto spec = make_full_spec(2, kDelta, {3.0, 60e3, 2e-9}, 50.0, 1.0);
    const auto sched = canonical_schedule(2, kDelta);
    const SimConfig cfg;
    const auto grid = sweep(spec, sched, cfg, low_bins(sched, cfg, spec, 1), 1, "canonical");
    g_grids.emplace_back("realistic", grid);
    double il_lo = 1e9, il_hi = -1e9, iso = 1e9;
    for (Port m = 1; m <= 4; ++m) {
        const Port next = m % 4 + 1;
        const double il = loss_db(grid.at(0, next, m));
        il_lo = std::min(il_lo, il);
        il_hi = std::max(il_hi, il);
        // Adjacent isolation: the reverse direction between neighbours.
        iso = std::min(iso, loss_db(grid.at(0, m, next)));
    }
    Outcome o;
    o.pass = il_lo >= 2.0 && il_hi <= 4.0 && iso >= 30.0;
    o.detail = "IL " + fmt("%.3f", il_lo) + "-" + fmt("%.3f", il_hi) + " dB at " + fmt("%.3f", grid.frequencies[0] * 1e-6) +
               " MHz, adjacent isolation >= " + fmt("%.1f", iso) + " dB";
    return o;
}

Outcome state_counting() {
    const long expected[] = {0, 2, 12, 216, 5280};
    Outcome o;
    for (int n = 1; n <= 5; ++n) {
        const long brute = oracle::brute_force_state_count(n);
        const bool ok = count_states(static_cast<unsigned>(n)) == brute && brute == expected[n - 1] &&
                        static_cast<long>(enumerate_states(n).size()) == brute;
        o.pass = o.pass && ok;
        o.detail += std::to_string(brute) + (n < 5 ? ", " : "");
    }
    o.detail = "N=1..5: " + o.detail;
    return o;
}

Outcome programmability() {
    const auto spec = make_full_spec(3, kDelta, ideal_switch());
    const SimConfig cfg;
    Outcome o;
    double worst_on = 0.0, worst_off = -1e9, worst_balance = 0.0;
    int realized = 0;
    const auto states = enumerate_states(3);
    for (const auto& state : states) {
        const auto sched = synth_schedule(state, spec);
        const auto grid = sweep(spec, sched, cfg, low_bins(sched, cfg, spec, 2), 1, "synth");
        g_grids.emplace_back("N=3 " + state_to_json(state).dump(), grid);
        bool ok = true;
        for (std::size_t f = 0; f < grid.frequencies.size(); ++f) {
            double lo = 1e9, hi = -1e9;
            for (const auto& [from, to] : state.next) {
                const double on = mag_db(grid.at(f, to, from));
                lo = std::min(lo, on);
                hi = std::max(hi, on);
                for (Port p : grid.ports) {
                    if (p != to) worst_off = std::max(worst_off, mag_db(grid.at(f, p, from)));
                }
            }
            worst_on = std::min(worst_on, lo);
            worst_balance = std::max(worst_balance, hi - lo);
            ok = ok && lo >= -0.05 && hi - lo <= 0.01;
        }
        realized += ok;
    }
    o.pass = realized == 12 && states.size() == 12 && worst_off <= -100.0;
    o.detail = std::to_string(realized) + "/" + std::to_string(states.size()) + " states; worst on-path " +
               fmt("%.2e", worst_on) + " dB, worst off-path " + fmt("%.1f", worst_off) + " dB, balance " +
               fmt("%.2e", worst_balance) + " dB";
    return o;
}

Outcome odd_port_reduction() {
    const auto spec = reduce_network(make_full_spec(2, kDelta, ideal_switch()), 4);
    const auto sched = restrict_to(canonical_schedule(2, kDelta), spec);
    const SimConfig cfg;
    const auto grid = sweep(spec, sched, cfg, low_bins(sched, cfg, spec, 3), 1, "canonical-reduced");
    g_grids.emplace_back("reduced 3-port", grid);
    const double dt = kDelta / cfg.samples_per_delay;

    Outcome o;
    const std::vector<std::tuple<Port, Port, double>> paths{{1, 2, kDelta}, {2, 3, kDelta}, {3, 1, 2 * kDelta}};
    for (const auto& [from, to, want] : paths) {
        // Circulation: the intended receiver dominates the column.
        for (Port p : grid.ports) {
            if (p != to && std::abs(grid.at(0, p, from)) >= std::abs(grid.at(0, to, from))) o.pass = false;
        }
        const auto gd = group_delay(grid, from, to);
        double worst = 0.0;
        for (double d : gd) worst = std::max(worst, std::abs(d - want));
        o.pass = o.pass && worst <= dt;
        o.detail += std::to_string(from) + "->" + std::to_string(to) + " " + fmt("%.4f", seconds_to_ns(gd.front())) +
                    " ns, |S| " + fmt("%.3f", mag_db(grid.at(0, to, from))) + " dB; ";
    }
    return o;
}

Outcome passivity() {
    Outcome o;
    double worst = 0.0;
    std::string where;
    for (const auto& [name, grid] : g_grids) {
        for (const auto& s : grid.s) {
            for (Eigen::Index q = 0; q < s.cols(); ++q) {
                const double power = s.col(q).squaredNorm();
                if (power > worst) {
                    worst = power;
                    where = name;
                }
            }
        }
    }
    o.pass = !g_grids.empty() && worst <= 1.0 + 1e-6;
    o.detail = std::to_string(g_grids.size()) + " grids, max column power " + fmt("%.9f", worst) + " (" + where + ")";
    return o;
}

Outcome contour_properties() {
    std::vector<double> ts, deltas;
    for (int i = 0; i <= 10; ++i) ts.push_back(ns_to_seconds(0.5 * i));
    for (int j = 0; j <= 40; ++j) deltas.push_back(ns_to_seconds(10.0 + j));
    const auto c = loss_contour(ts, deltas, 6.0, 120e3, 50.0);
    bool up_in_ts = true, down_in_delta = true, flat_at_zero = true;
    double worst_quad = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        for (std::size_t j = 0; j < deltas.size(); ++j) {
            const double v = c.il_db[i][j];
            if (i > 0 && v < c.il_db[i - 1][j]) up_in_ts = false;
            if (i > 0 && j > 0 && v > c.il_db[i][j - 1]) down_in_delta = false;
            if (i == 0 && std::abs(v - c.il_db[0][0]) > 1e-12) flat_at_zero = false;
            if (j % 10 == 0 || i % 5 == 0) {
                const double q = oracle::quadrature_il(ts[i], deltas[j], 6.0, 120e3, 50.0);
                worst_quad = std::max(worst_quad, std::abs(v - q));
            }
        }
    }
    Outcome o;
    o.pass = up_in_ts && down_in_delta && flat_at_zero && worst_quad <= 1e-6;
    o.detail = std::string("t_s monotone ") + (up_in_ts ? "yes" : "no") + ", delta monotone " +
               (down_in_delta ? "yes" : "no") + ", t_s=0 flat " + (flat_at_zero ? "yes" : "no") +
               ", max |analytic - quadrature| " + fmt("%.2e", worst_quad) + " dB";
    return o;
}

Outcome round_trips() {
    Outcome o;
    int checked = 0;
    for (const auto& [name, grid] : g_grids) {
        std::ostringstream first;
        write_touchstone(grid, first);
        std::istringstream in(first.str());
        std::ostringstream second;
        write_touchstone(read_touchstone(in, grid.ports.size()), second);
        o.pass = o.pass && first.str() == second.str();
        ++checked;
    }
    std::vector<Schedule> schedules{canonical_schedule(2, kDelta), canonical_schedule(6, kDelta)};
    const auto spec3 = make_full_spec(3, kDelta, ideal_switch());
    for (const auto& state : enumerate_states(3)) schedules.push_back(synth_schedule(state, spec3));
    const auto spec4 = make_full_spec(4, 7.3e-9, ideal_switch());
    for (const auto& state : enumerate_states(4, 20)) schedules.push_back(synth_schedule(state, spec4));
    for (const auto& s : schedules) {
        const auto first = schedule_to_json(s).dump(2);
        const auto second = schedule_to_json(schedule_from_json(nlohmann::json::parse(first))).dump(2);
        o.pass = o.pass && first == second;
    }
    o.detail = std::to_string(checked) + " Touchstone grids, " + std::to_string(schedules.size()) +
               " schedules byte-identical";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "clock correctness", 1.0, clock_correctness},
        {2, "ideal circulation and frequency independence", 60.0, ideal_circulation},
        {3, "h(t) reduction", 1.0, h_reduction},
        {4, "analytic vs engine loss", 120.0, analytic_vs_engine},
        {5, "realistic-parameter simulation", 60.0, realistic_parameters},
        {6, "state counting oracle", 5.0, state_counting},
        {7, "programmability end-to-end", 600.0, programmability},
        {8, "odd-port reduction", 60.0, odd_port_reduction},
        {9, "passivity", 10.0, passivity},
        {10, "loss contour properties", 1.0, contour_properties},
        {11, "file-format round trips", 10.0, round_trips},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.budget_s) {
            o.pass = false;
            o.detail += " [over budget " + fmt("%g", c.budget_s) + " s]";
        }
        failed += !o.pass;
        std::printf("%s criterion %2d: %s (%.2f s) -- %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
