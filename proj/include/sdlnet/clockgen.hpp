#pragma once

// Canonical switch clocks of the 2N-port switched-delay-line network and
// sampling-based schedule validation.
//
// Every clock has period 2N*delta and is on for two consecutive delta-slots.
// Switch (m, n) uses slot j = (m + 2n - 2) mod 2N and is on during slots
// j-1 and j (mod 2N), i.e. [(j-1)delta, (j+1)delta) with wraparound for j = 0.

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sdlnet/netcore.hpp"

namespace sdlnet {

int slot_index(Port m, Line n, int n_lines);

bool clock_state(double t, Port m, Line n, int n_lines, double delta);

/// Same clock evaluated on the integer grid delta/ticks_per_delay.
bool clock_state_ticks(long tick, int ticks_per_delay, Port m, Line n, int n_lines);

/// Intervals of every switch of the full 2N-port network; circulation 1->2->...->2N->1.
Schedule canonical_schedule(int n_lines, double delta);

/// Turns per-slot on flags (one flag per `slot` seconds) into sorted, merged
/// half-open intervals.
std::vector<Interval> intervals_from_slots(const std::vector<char>& on, double slot);

struct ScheduleReport {
    bool one_hot_per_port = true;
    bool no_line_contention_per_side = true;
    std::map<SwitchKey, double> duty_cycles;
    /// (transmitter, receiver): on every line the receiver's switch is the
    /// transmitter's delayed by one line delay.
    std::vector<std::pair<Port, Port>> receiver_offset_pairs;
    std::vector<std::string> violations;

    [[nodiscard]] bool passed() const { return one_hot_per_port && no_line_contention_per_side; }
};

/// Samples the schedule on a delta/samples_per_delay grid. Throws ConfigError
/// for an empty schedule, absent ports or off-grid interval boundaries.
ScheduleReport validate_schedule(const Schedule& s, const NetworkSpec& spec, int samples_per_delay = 64);

nlohmann::json report_to_json(const ScheduleReport& r);

// {hyperperiod_ns, switches: [{port, line, intervals_ns: [[s, e], ...]}]}
nlohmann::json schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const nlohmann::json& doc);

}  // namespace sdlnet
