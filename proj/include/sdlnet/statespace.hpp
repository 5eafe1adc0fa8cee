#pragma once

// Programmable circulation states of a full 2N-port network.
//
// A state maps every port to the port that receives its circulation. Only
// left<->right mappings are realizable and no two ports may feed each other,
// so every cycle alternates sides and has length 2c with c >= 2.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "json.hpp"
#include "sdlnet/netcore.hpp"

namespace sdlnet {

using BigCount = boost::multiprecision::cpp_int;

struct CirculationState {
    std::map<Port, Port> next;  // next[p] = port receiving circulation from p

    bool operator==(const CirculationState&) const = default;
    auto operator<=>(const CirculationState&) const = default;
};

/// 1 -> 2 -> ... -> last present port -> first present port.
CirculationState canonical_state(const NetworkSpec& spec);

struct Admissibility {
    bool admissible = true;
    std::vector<std::string> violations;
};

/// Throws ConfigError if the state is not a bijection on the present ports.
Admissibility is_admissible(const CirculationState& state, const NetworkSpec& spec);

/// Ways to fill the right->left sub-matrix for one fixed left->right
/// permutation: sum_k (-1)^k C(N,k) (N-k)!
BigCount count_b_given_a(unsigned n);

/// N! * count_b_given_a(N).
BigCount count_states(unsigned n);

/// Cycles of the state, each starting at its lowest-numbered left port,
/// ordered by their lowest-numbered port.
std::vector<std::vector<Port>> cycles_of(const CirculationState& state);

/// Deterministic enumeration of admissible states of the full 2N-port
/// network. Copyable; each copy continues independently.
class StateEnumerator {
public:
    static constexpr int max_unlimited_lines = 6;

    /// Throws ConfigError if n_lines > 6 and no limit is given.
    StateEnumerator(int n_lines, std::optional<std::size_t> limit = std::nullopt);

    std::optional<CirculationState> next();

private:
    bool advance();

    int n_ = 0;
    std::optional<std::size_t> limit_;
    std::size_t produced_ = 0;
    std::vector<int> a_;  // a_[i]: right slot fed by left port 2i+1
    std::vector<int> b_;  // b_[i]: left slot fed by right port 2i+2
    bool started_ = false;
    bool done_ = false;
};

std::vector<CirculationState> enumerate_states(int n_lines, std::optional<std::size_t> limit = std::nullopt);

/// Clock schedule realizing `state`: each cycle of length 2c gets c dedicated
/// lines (lowest free lines to the cycle with the lowest port) driven by the
/// canonical 2c-port clocks; the hyperperiod is the lcm of the cycle periods.
/// Throws ConfigError for inadmissible states or reduced networks.
Schedule synth_schedule(const CirculationState& state, const NetworkSpec& spec);

// {"1": 2, "2": 3, ...}
nlohmann::json state_to_json(const CirculationState& state);
CirculationState state_from_json(const nlohmann::json& doc);

}  // namespace sdlnet
