#include "sdlnet/netcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "sdlnet/units.hpp"

namespace sdlnet {

namespace {

std::string join_issues(const std::vector<Issue>& issues) {
    std::ostringstream os;
    for (std::size_t i = 0; i < issues.size(); ++i) {
        if (i) os << "; ";
        os << issues[i].field << ": " << issues[i].message;
    }
    return os.str();
}

struct Window {
    double start;
    double length;
};

// Merges touching intervals, including the pair that touches across the
// hyperperiod boundary.
std::vector<Window> cyclic_windows(std::span<const Interval> intervals, double hyperperiod) {
    const double eps = 1e-9 * hyperperiod;
    std::vector<Window> out;
    for (const auto& iv : intervals) {
        if (!out.empty() && std::abs(iv.start - (out.back().start + out.back().length)) <= eps) {
            out.back().length = iv.end - out.back().start;
        } else {
            out.push_back({iv.start, iv.length()});
        }
    }
    if (out.size() > 1 && out.front().start <= eps &&
        std::abs(out.back().start + out.back().length - hyperperiod) <= eps) {
        out.back().length += out.front().length;
        out.erase(out.begin());
    }
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<Issue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ConfigError::ConfigError(std::string field, std::string message)
    : ConfigError(std::vector<Issue>{{std::move(field), std::move(message)}}) {}

// =============================================================================
// NetworkSpec
// =============================================================================

bool NetworkSpec::has_port(Port p) const {
    return std::find(ports_present.begin(), ports_present.end(), p) != ports_present.end();
}

std::vector<Port> NetworkSpec::ports_on(Side s) const {
    std::vector<Port> out;
    for (Port p : ports_present) {
        if (side_of(p) == s) out.push_back(p);
    }
    return out;
}

NetworkSpec make_full_spec(int n_lines, double delay, SwitchModel sw, double z0, double loss_db) {
    NetworkSpec spec;
    spec.n_lines = n_lines;
    spec.ports_present.resize(static_cast<std::size_t>(std::max(0, 2 * n_lines)));
    std::iota(spec.ports_present.begin(), spec.ports_present.end(), 1);
    spec.z0 = z0;
    spec.sw = sw;
    spec.line = {delay, loss_db};
    return spec;
}

std::vector<Issue> check_spec(const NetworkSpec& spec) {
    std::vector<Issue> issues;
    auto fail = [&](const char* field, std::string msg) { issues.push_back({field, std::move(msg)}); };

    if (spec.n_lines < 1) fail("n_lines", "must be >= 1");
    if (spec.ports_present.empty()) {
        fail("ports_present", "must not be empty");
    } else {
        std::set<Port> seen;
        for (Port p : spec.ports_present) {
            if (p < 1 || p > spec.port_count()) {
                fail("ports_present", "port " + std::to_string(p) + " outside 1.." + std::to_string(spec.port_count()));
            }
            if (!seen.insert(p).second) fail("ports_present", "port " + std::to_string(p) + " listed twice");
        }
        if (spec.n_lines >= 1 && static_cast<int>(seen.size()) < spec.port_count() - 1) {
            fail("ports_present", "at most one port may be absent (got " + std::to_string(seen.size()) + " of " +
                                      std::to_string(spec.port_count()) + ")");
        }
    }
    if (!(std::isfinite(spec.z0) && spec.z0 > 0.0)) fail("z0_ohm", "must be > 0");
    if (!(std::isfinite(spec.sw.r_on) && spec.sw.r_on >= 0.0)) fail("r_on_ohm", "must be >= 0");
    if (!(std::isfinite(spec.sw.r_off) && spec.sw.r_off > spec.sw.r_on)) fail("r_off_ohm", "must exceed r_on_ohm");
    if (!(std::isfinite(spec.line.delay) && spec.line.delay > 0.0)) fail("delta_ns", "must be > 0");
    if (!(std::isfinite(spec.line.loss_db) && spec.line.loss_db >= 0.0)) fail("line_loss_db", "must be >= 0");
    if (!(std::isfinite(spec.sw.t_s) && spec.sw.t_s >= 0.0)) {
        fail("t_s_ns", "must be >= 0");
    } else if (spec.line.delay > 0.0 && spec.sw.t_s >= spec.line.delay) {
        fail("t_s_ns", "switching time must be shorter than the line delay");
    }
    return issues;
}

NetworkSpec validate_spec(NetworkSpec spec) {
    auto issues = check_spec(spec);
    if (!issues.empty()) throw ConfigError(std::move(issues));
    std::sort(spec.ports_present.begin(), spec.ports_present.end());
    return spec;
}

nlohmann::json spec_to_json(const NetworkSpec& spec) {
    return {
        {"n_lines", spec.n_lines},
        {"delta_ns", seconds_to_ns(spec.line.delay)},
        {"z0_ohm", spec.z0},
        {"r_on_ohm", spec.sw.r_on},
        {"r_off_ohm", spec.sw.r_off},
        {"t_s_ns", seconds_to_ns(spec.sw.t_s)},
        {"line_loss_db", spec.line.loss_db},
        {"ports_present", spec.ports_present},
    };
}

NetworkSpec spec_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config", "expected a JSON object");

    static const std::set<std::string> known = {"n_lines",   "delta_ns",     "z0_ohm",       "r_on_ohm",
                                                "r_off_ohm", "t_s_ns",       "line_loss_db", "ports_present"};
    std::vector<Issue> issues;
    for (const auto& [key, _] : doc.items()) {
        if (!known.contains(key)) issues.push_back({key, "unknown key"});
    }

    auto number = [&](const char* key, bool required, double fallback) -> double {
        if (!doc.contains(key)) {
            if (required) issues.push_back({key, "missing"});
            return fallback;
        }
        const auto& v = doc.at(key);
        if (!v.is_number()) {
            issues.push_back({key, "expected a number"});
            return fallback;
        }
        return v.get<double>();
    };

    NetworkSpec spec;
    if (!doc.contains("n_lines")) {
        issues.push_back({"n_lines", "missing"});
    } else if (!doc.at("n_lines").is_number_integer()) {
        issues.push_back({"n_lines", "expected an integer"});
    } else {
        spec.n_lines = doc.at("n_lines").get<int>();
    }
    spec.line.delay = ns_to_seconds(number("delta_ns", true, 0.0));
    spec.z0 = number("z0_ohm", false, 50.0);
    spec.sw.r_on = number("r_on_ohm", true, 0.0);
    spec.sw.r_off = number("r_off_ohm", true, 0.0);
    spec.sw.t_s = ns_to_seconds(number("t_s_ns", true, 0.0));
    spec.line.loss_db = number("line_loss_db", false, 0.0);

    if (doc.contains("ports_present")) {
        const auto& arr = doc.at("ports_present");
        if (!arr.is_array()) {
            issues.push_back({"ports_present", "expected an array of port indices"});
        } else {
            for (const auto& v : arr) {
                if (!v.is_number_integer()) {
                    issues.push_back({"ports_present", "expected integer port indices"});
                    break;
                }
                spec.ports_present.push_back(v.get<int>());
            }
        }
    } else if (spec.n_lines > 0) {
        spec.ports_present.resize(static_cast<std::size_t>(2 * spec.n_lines));
        std::iota(spec.ports_present.begin(), spec.ports_present.end(), 1);
    }

    if (!issues.empty()) throw ConfigError(std::move(issues));
    return validate_spec(std::move(spec));
}

// =============================================================================
// Switch resistance
// =============================================================================

double ramp_resistance(double offset, double length, const SwitchModel& m) {
    if (m.t_s <= 0.0) return m.r_on;
    if (offset < m.t_s) return m.r_off + (m.r_on - m.r_off) * (offset / m.t_s);
    if (offset <= length - m.t_s) return m.r_on;
    return m.r_on + (m.r_off - m.r_on) * ((offset - length + m.t_s) / m.t_s);
}

double switch_resistance(double t, std::span<const Interval> intervals, double hyperperiod,
                         const SwitchModel& model) {
    const auto windows = cyclic_windows(intervals, hyperperiod);
    double tau = std::fmod(t, hyperperiod);
    if (tau < 0.0) tau += hyperperiod;

    for (const auto& w : windows) {
        if (w.length >= hyperperiod * (1.0 - 1e-12)) return model.r_on;
        if (w.length < 2.0 * model.t_s) {
            throw ConfigError("intervals", "on-window shorter than twice the switching time");
        }
    }
    for (const auto& w : windows) {
        double u = tau - w.start;
        if (u < 0.0) u += hyperperiod;
        if (u < w.length) return ramp_resistance(u, w.length, model);
    }
    return model.r_off;
}

long to_ticks(double t, double tick, const std::string& what) {
    const double x = t / tick;
    const double r = std::round(x);
    if (!std::isfinite(x) || std::abs(x - r) > 1e-6) {
        throw ConfigError(what, "time " + std::to_string(seconds_to_ns(t)) + " ns is not a multiple of the " +
                                    std::to_string(seconds_to_ns(tick)) + " ns timestep");
    }
    return static_cast<long>(r);
}

std::vector<TickWindow> tick_windows(std::span<const Interval> intervals, long period_ticks, double tick) {
    std::vector<TickWindow> out;
    for (const auto& iv : intervals) {
        const long s = to_ticks(iv.start, tick, "intervals");
        const long e = to_ticks(iv.end, tick, "intervals");
        if (e <= s) continue;
        if (!out.empty() && out.back().start + out.back().length == s) {
            out.back().length = e - out.back().start;
        } else {
            out.push_back({s, e - s});
        }
    }
    if (out.size() > 1 && out.front().start == 0 && out.back().start + out.back().length == period_ticks) {
        out.back().length += out.front().length;
        out.erase(out.begin());
    }
    return out;
}

std::vector<double> resistance_profile(std::span<const Interval> intervals, long period_ticks, double tick,
                                       const SwitchModel& model) {
    std::vector<double> r(static_cast<std::size_t>(period_ticks), model.r_off);
    for (const auto& w : tick_windows(intervals, period_ticks, tick)) {
        if (w.length >= period_ticks) {
            std::fill(r.begin(), r.end(), model.r_on);
            continue;
        }
        const double len = static_cast<double>(w.length) * tick;
        if (len < 2.0 * model.t_s * (1.0 - 1e-12)) {
            throw ConfigError("intervals", "on-window shorter than twice the switching time");
        }
        for (long u = 0; u < w.length; ++u) {
            r[static_cast<std::size_t>((w.start + u) % period_ticks)] =
                ramp_resistance(static_cast<double>(u) * tick, len, model);
        }
    }
    return r;
}

std::vector<Issue> check_schedule_structure(const Schedule& s, const NetworkSpec& spec) {
    std::vector<Issue> issues;
    if (!(std::isfinite(s.hyperperiod) && s.hyperperiod > 0.0)) {
        issues.push_back({"hyperperiod_ns", "must be > 0"});
        return issues;
    }
    const double eps = 1e-9 * s.hyperperiod;
    for (const auto& [key, ivs] : s.switches) {
        const std::string field = "switch(" + std::to_string(key.port) + "," + std::to_string(key.line) + ")";
        if (!spec.has_port(key.port)) issues.push_back({field, "port " + std::to_string(key.port) + " is not present"});
        if (key.line < 1 || key.line > spec.n_lines) issues.push_back({field, "line out of range"});
        for (std::size_t i = 0; i < ivs.size(); ++i) {
            const auto& iv = ivs[i];
            if (!(iv.start >= -eps && iv.end <= s.hyperperiod + eps && iv.start < iv.end)) {
                issues.push_back({field, "interval outside [0, hyperperiod) or empty"});
            }
            if (i > 0 && ivs[i - 1].end > iv.start + eps) {
                issues.push_back({field, "intervals overlap or are unsorted"});
            }
        }
    }
    return issues;
}

Schedule restrict_to(const Schedule& s, const NetworkSpec& spec) {
    Schedule out{s.hyperperiod, {}};
    for (const auto& [key, ivs] : s.switches) {
        if (spec.has_port(key.port)) out.switches.emplace(key, ivs);
    }
    return out;
}

}  // namespace sdlnet
