#include "sdlnet/statespace.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "sdlnet/clockgen.hpp"

namespace sdlnet {

CirculationState canonical_state(const NetworkSpec& spec) {
    CirculationState s;
    const auto& ports = spec.ports_present;
    for (std::size_t i = 0; i < ports.size(); ++i) s.next[ports[i]] = ports[(i + 1) % ports.size()];
    return s;
}

Admissibility is_admissible(const CirculationState& state, const NetworkSpec& spec) {
    std::set<Port> keys;
    std::set<Port> values;
    for (const auto& [from, to] : state.next) {
        keys.insert(from);
        values.insert(to);
    }
    const std::set<Port> present(spec.ports_present.begin(), spec.ports_present.end());
    if (keys != present || values != present || state.next.size() != present.size()) {
        throw ConfigError("state", "not a bijection on the present ports");
    }

    Admissibility r;
    for (const auto& [from, to] : state.next) {
        if (side_of(from) == side_of(to)) {
            r.admissible = false;
            r.violations.push_back("same-side mapping " + std::to_string(from) + "->" + std::to_string(to) + " (" +
                                   side_name(side_of(from)) + " to " + side_name(side_of(to)) + ")");
        }
        if (from < to && state.next.at(to) == from) {
            r.admissible = false;
            r.violations.push_back("2-cycle " + std::to_string(from) + "<->" + std::to_string(to) +
                                   " (reciprocal pair)");
        }
    }
    return r;
}

BigCount count_b_given_a(unsigned n) {
    // (N-k)! runs downward while C(N,k) runs upward.
    std::vector<BigCount> fact(n + 1, 1);
    for (unsigned i = 1; i <= n; ++i) fact[i] = fact[i - 1] * i;
    BigCount total = 0;
    BigCount binom = 1;
    for (unsigned k = 0; k <= n; ++k) {
        const BigCount term = binom * fact[n - k];
        if (k % 2 == 0) {
            total += term;
        } else {
            total -= term;
        }
        binom = binom * (n - k) / (k + 1);
    }
    return total;
}

BigCount count_states(unsigned n) {
    BigCount fact = 1;
    for (unsigned i = 2; i <= n; ++i) fact *= i;
    return fact * count_b_given_a(n);
}

std::vector<std::vector<Port>> cycles_of(const CirculationState& state) {
    std::vector<std::vector<Port>> cycles;
    std::set<Port> seen;
    for (const auto& [start, _] : state.next) {
        if (seen.contains(start)) continue;
        std::vector<Port> cycle;
        for (Port p = start; !seen.contains(p); p = state.next.at(p)) {
            seen.insert(p);
            cycle.push_back(p);
        }
        auto lowest_left = cycle.end();
        for (auto it = cycle.begin(); it != cycle.end(); ++it) {
            if (side_of(*it) == Side::left && (lowest_left == cycle.end() || *it < *lowest_left)) lowest_left = it;
        }
        if (lowest_left != cycle.end()) std::rotate(cycle.begin(), lowest_left, cycle.end());
        cycles.push_back(std::move(cycle));
    }
    return cycles;
}

// =============================================================================
// Enumeration
// =============================================================================

StateEnumerator::StateEnumerator(int n_lines, std::optional<std::size_t> limit) : n_(n_lines), limit_(limit) {
    if (n_lines < 1) throw ConfigError("n_lines", "must be >= 1");
    if (n_lines > max_unlimited_lines && !limit) {
        throw ConfigError("n_lines", "enumeration beyond N=" + std::to_string(max_unlimited_lines) +
                                         " requires a limit");
    }
    a_.resize(static_cast<std::size_t>(n_));
    b_.resize(static_cast<std::size_t>(n_));
    std::iota(a_.begin(), a_.end(), 0);
    std::iota(b_.begin(), b_.end(), 0);
}

bool StateEnumerator::advance() {
    if (std::next_permutation(b_.begin(), b_.end())) return true;
    return std::next_permutation(a_.begin(), a_.end());
}

std::optional<CirculationState> StateEnumerator::next() {
    if (done_ || (limit_ && produced_ >= *limit_)) return std::nullopt;
    for (;;) {
        if (!started_) {
            started_ = true;
        } else if (!advance()) {
            done_ = true;
            return std::nullopt;
        }
        bool ok = true;
        for (std::size_t i = 0; i < a_.size() && ok; ++i) ok = b_[static_cast<std::size_t>(a_[i])] != static_cast<int>(i);
        if (!ok) continue;

        CirculationState s;
        for (int i = 0; i < n_; ++i) {
            s.next[2 * i + 1] = 2 * a_[static_cast<std::size_t>(i)] + 2;
            s.next[2 * i + 2] = 2 * b_[static_cast<std::size_t>(i)] + 1;
        }
        ++produced_;
        return s;
    }
}

std::vector<CirculationState> enumerate_states(int n_lines, std::optional<std::size_t> limit) {
    StateEnumerator it(n_lines, limit);
    std::vector<CirculationState> out;
    while (auto s = it.next()) out.push_back(std::move(*s));
    return out;
}

// =============================================================================
// Synthesis
// =============================================================================

Schedule synth_schedule(const CirculationState& state, const NetworkSpec& spec) {
    if (!spec.is_full()) throw ConfigError("ports_present", "synthesis needs all 2N ports present");
    const auto adm = is_admissible(state, spec);
    if (!adm.admissible) {
        std::vector<Issue> issues;
        for (const auto& v : adm.violations) issues.push_back({"state", v});
        throw ConfigError(std::move(issues));
    }

    const auto cycles = cycles_of(state);
    long period_slots = 1;
    for (const auto& c : cycles) period_slots = std::lcm(period_slots, static_cast<long>(c.size()));

    const double delta = spec.line.delay;
    Schedule s;
    s.hyperperiod = static_cast<double>(period_slots) * delta;
    for (Port m : spec.ports_present) {
        for (Line n = 1; n <= spec.n_lines; ++n) s.switches[{m, n}] = {};
    }

    Line base = 0;
    for (const auto& cycle : cycles) {
        const int c = static_cast<int>(cycle.size()) / 2;
        for (int local_port = 1; local_port <= 2 * c; ++local_port) {
            for (int local_line = 1; local_line <= c; ++local_line) {
                std::vector<char> on(static_cast<std::size_t>(period_slots));
                for (long slot = 0; slot < period_slots; ++slot) {
                    on[static_cast<std::size_t>(slot)] = clock_state_ticks(slot, 1, local_port, local_line, c);
                }
                s.switches[{cycle[static_cast<std::size_t>(local_port - 1)], base + local_line}] =
                    intervals_from_slots(on, delta);
            }
        }
        base += c;
    }
    return s;
}

nlohmann::json state_to_json(const CirculationState& state) {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [from, to] : state.next) doc[std::to_string(from)] = to;
    return doc;
}

CirculationState state_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("state", "expected a JSON object mapping port -> port");
    CirculationState s;
    for (const auto& [key, value] : doc.items()) {
        std::size_t used = 0;
        int from = 0;
        try {
            from = std::stoi(key, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != key.size() || from < 1) throw ConfigError("state", "key '" + key + "' is not a port index");
        if (!value.is_number_integer()) throw ConfigError("state", "value for port " + key + " is not a port index");
        s.next[from] = value.get<int>();
    }
    return s;
}

}  // namespace sdlnet
