#include "sdlnet/clockgen.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sdlnet/units.hpp"

namespace sdlnet {

namespace {

void check_indices(Port m, Line n, int n_lines) {
    if (n_lines < 1) throw std::out_of_range("line count must be >= 1");
    if (m < 1 || m > 2 * n_lines) throw std::out_of_range("port index " + std::to_string(m) + " out of range");
    if (n < 1 || n > n_lines) throw std::out_of_range("line index " + std::to_string(n) + " out of range");
}

bool slot_is_on(long slot, Port m, Line n, int n_lines) {
    const long period = 2L * n_lines;
    const long j = slot_index(m, n, n_lines);
    slot %= period;
    if (slot < 0) slot += period;
    return slot == j || slot == (j + period - 1) % period;
}

std::string window_text(long a, long b, double tick) {
    std::ostringstream os;
    os << "[" << seconds_to_ns(static_cast<double>(a) * tick) << ", " << seconds_to_ns(static_cast<double>(b) * tick)
       << ") ns";
    return os.str();
}

// Calls fn(begin, end) for each maximal run of ticks where pred holds.
template <class Pred, class Fn>
void for_each_run(long count, Pred pred, Fn fn) {
    long begin = -1;
    for (long t = 0; t <= count; ++t) {
        const bool hit = t < count && pred(t);
        if (hit && begin < 0) begin = t;
        if (!hit && begin >= 0) {
            fn(begin, t);
            begin = -1;
        }
    }
}

}  // namespace

int slot_index(Port m, Line n, int n_lines) {
    check_indices(m, n, n_lines);
    return (m + 2 * n - 2) % (2 * n_lines);
}

bool clock_state(double t, Port m, Line n, int n_lines, double delta) {
    check_indices(m, n, n_lines);
    const double period = 2.0 * n_lines * delta;
    double tau = std::fmod(t, period);
    if (tau < 0.0) tau += period;
    return slot_is_on(static_cast<long>(std::floor(tau / delta)), m, n, n_lines);
}

bool clock_state_ticks(long tick, int ticks_per_delay, Port m, Line n, int n_lines) {
    check_indices(m, n, n_lines);
    long slot = tick / ticks_per_delay;
    if (tick < 0 && tick % ticks_per_delay != 0) --slot;
    return slot_is_on(slot, m, n, n_lines);
}

std::vector<Interval> intervals_from_slots(const std::vector<char>& on, double slot) {
    std::vector<Interval> out;
    const long count = static_cast<long>(on.size());
    for_each_run(count, [&](long t) { return on[static_cast<std::size_t>(t)] != 0; }, [&](long a, long b) {
        out.push_back({static_cast<double>(a) * slot, static_cast<double>(b) * slot});
    });
    return out;
}

Schedule canonical_schedule(int n_lines, double delta) {
    if (n_lines < 1) throw std::out_of_range("line count must be >= 1");
    Schedule s;
    s.hyperperiod = 2.0 * n_lines * delta;
    for (Port m = 1; m <= 2 * n_lines; ++m) {
        for (Line n = 1; n <= n_lines; ++n) {
            std::vector<char> on(static_cast<std::size_t>(2 * n_lines));
            for (long slot = 0; slot < 2L * n_lines; ++slot) on[static_cast<std::size_t>(slot)] = slot_is_on(slot, m, n, n_lines);
            s.switches[{m, n}] = intervals_from_slots(on, delta);
        }
    }
    return s;
}

ScheduleReport validate_schedule(const Schedule& s, const NetworkSpec& spec, int samples_per_delay) {
    if (s.switches.empty()) throw ConfigError("switches", "schedule is empty");
    if (auto issues = check_schedule_structure(s, spec); !issues.empty()) throw ConfigError(std::move(issues));
    if (samples_per_delay < 1) throw ConfigError("samples_per_delay", "must be >= 1");

    const double tick = spec.line.delay / samples_per_delay;
    const long period = to_ticks(s.hyperperiod, tick, "hyperperiod_ns");

    std::map<SwitchKey, std::vector<char>> masks;
    for (Port m : spec.ports_present) {
        for (Line n = 1; n <= spec.n_lines; ++n) masks[{m, n}].assign(static_cast<std::size_t>(period), 0);
    }
    for (const auto& [key, ivs] : s.switches) {
        auto& mask = masks[key];
        for (const auto& w : tick_windows(ivs, period, tick)) {
            for (long u = 0; u < std::min(w.length, period); ++u) mask[static_cast<std::size_t>((w.start + u) % period)] = 1;
        }
    }
    auto on = [&](Port m, Line n, long t) { return masks.at({m, n})[static_cast<std::size_t>(t)] != 0; };

    ScheduleReport r;
    for (Port m : spec.ports_present) {
        auto count_at = [&](long t) {
            int c = 0;
            for (Line n = 1; n <= spec.n_lines; ++n) c += on(m, n, t);
            return c;
        };
        for_each_run(period, [&](long t) { return count_at(t) != 1; }, [&](long a, long b) {
            r.one_hot_per_port = false;
            r.violations.push_back("port " + std::to_string(m) + ": " + std::to_string(count_at(a)) +
                                   " switches on during " + window_text(a, b, tick));
        });
        for (Line n = 1; n <= spec.n_lines; ++n) {
            const auto& mask = masks.at({m, n});
            long total = 0;
            for (char c : mask) total += c;
            r.duty_cycles[{m, n}] = static_cast<double>(total) / static_cast<double>(period);
        }
    }

    for (Side side : {Side::left, Side::right}) {
        const auto ports = spec.ports_on(side);
        for (Line n = 1; n <= spec.n_lines; ++n) {
            auto users = [&](long t) {
                std::vector<Port> u;
                for (Port m : ports) {
                    if (on(m, n, t)) u.push_back(m);
                }
                return u;
            };
            for_each_run(period, [&](long t) { return users(t).size() > 1; }, [&](long a, long b) {
                r.no_line_contention_per_side = false;
                std::string who;
                for (Port m : users(a)) who += (who.empty() ? "" : ",") + std::to_string(m);
                r.violations.push_back("line " + std::to_string(n) + " (" + side_name(side) + "): ports " + who +
                                       " on together during " + window_text(a, b, tick));
            });
        }
    }

    const long shift = samples_per_delay;
    for (Port tx : spec.ports_present) {
        for (Port rx : spec.ports_present) {
            if (side_of(rx) == side_of(tx)) continue;
            bool any = false;
            bool match = true;
            for (Line n = 1; n <= spec.n_lines && match; ++n) {
                for (long t = 0; t < period; ++t) {
                    const long src = ((t - shift) % period + period) % period;
                    if (on(rx, n, t) != on(tx, n, src)) {
                        match = false;
                        break;
                    }
                    any = any || on(tx, n, src);
                }
            }
            if (match && any) r.receiver_offset_pairs.emplace_back(tx, rx);
        }
    }
    return r;
}

nlohmann::json report_to_json(const ScheduleReport& r) {
    nlohmann::json duty = nlohmann::json::array();
    for (const auto& [key, d] : r.duty_cycles) duty.push_back({{"port", key.port}, {"line", key.line}, {"duty", d}});
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [tx, rx] : r.receiver_offset_pairs) pairs.push_back({tx, rx});
    return {
        {"passed", r.passed()},
        {"one_hot_per_port", r.one_hot_per_port},
        {"no_line_contention_per_side", r.no_line_contention_per_side},
        {"duty_cycles", duty},
        {"receiver_offset_pairs", pairs},
        {"violations", r.violations},
    };
}

nlohmann::json schedule_to_json(const Schedule& s) {
    nlohmann::json switches = nlohmann::json::array();
    for (const auto& [key, ivs] : s.switches) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& iv : ivs) list.push_back({seconds_to_ns(iv.start), seconds_to_ns(iv.end)});
        switches.push_back({{"port", key.port}, {"line", key.line}, {"intervals_ns", list}});
    }
    return {{"hyperperiod_ns", seconds_to_ns(s.hyperperiod)}, {"switches", switches}};
}

Schedule schedule_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("schedule", "expected a JSON object");
    for (const auto& [key, _] : doc.items()) {
        if (key != "hyperperiod_ns" && key != "switches") throw ConfigError(key, "unknown key");
    }
    if (!doc.contains("hyperperiod_ns") || !doc.at("hyperperiod_ns").is_number()) {
        throw ConfigError("hyperperiod_ns", "missing or not a number");
    }
    if (!doc.contains("switches") || !doc.at("switches").is_array()) {
        throw ConfigError("switches", "missing or not an array");
    }
    Schedule s;
    s.hyperperiod = ns_to_seconds(doc.at("hyperperiod_ns").get<double>());
    for (const auto& sw : doc.at("switches")) {
        if (!sw.is_object() || !sw.contains("port") || !sw.contains("line") || !sw.contains("intervals_ns") ||
            !sw.at("port").is_number_integer() || !sw.at("line").is_number_integer() ||
            !sw.at("intervals_ns").is_array() || sw.size() != 3) {
            throw ConfigError("switches", "each entry needs integer port, line and an intervals_ns array");
        }
        const SwitchKey key{sw.at("port").get<int>(), sw.at("line").get<int>()};
        std::vector<Interval> ivs;
        for (const auto& pair : sw.at("intervals_ns")) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
                throw ConfigError("intervals_ns", "intervals must be [start, end] number pairs");
            }
            ivs.push_back({ns_to_seconds(pair[0].get<double>()), ns_to_seconds(pair[1].get<double>())});
        }
        if (!s.switches.emplace(key, std::move(ivs)).second) {
            throw ConfigError("switches", "duplicate switch (" + std::to_string(key.port) + "," +
                                              std::to_string(key.line) + ")");
        }
    }
    return s;
}

}  // namespace sdlnet
