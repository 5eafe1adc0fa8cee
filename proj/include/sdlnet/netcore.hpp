#pragma once

// Domain types shared by every sdlnet module: the static network description,
// switch/line models, switch schedules and the time-varying switch resistance.

#include <compare>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace sdlnet {

using Port = int;  // 1-based; odd ports sit on the left of the lines, even on the right
using Line = int;  // 1-based

enum class Side { left, right };

constexpr Side side_of(Port p) { return (p % 2 != 0) ? Side::left : Side::right; }
constexpr const char* side_name(Side s) { return s == Side::left ? "left" : "right"; }

// =============================================================================
// Errors
// =============================================================================

struct Issue {
    std::string field;
    std::string message;
};

/// Invalid user input (configuration, schedule, state). Carries every
/// violated rule so a caller can report them all at once.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<Issue> issues);
    ConfigError(std::string field, std::string message);

    [[nodiscard]] const std::vector<Issue>& issues() const { return issues_; }

private:
    std::vector<Issue> issues_;
};

/// File could not be read or written; the message names the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Internal fault inside the transient solver or extraction.
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// =============================================================================
// Models
// =============================================================================

struct SwitchModel {
    double r_on = 0.0;   // ohms
    double r_off = 0.0;  // ohms
    double t_s = 0.0;    // seconds, linear ramp time
};

struct LineModel {
    double delay = 0.0;    // seconds, one end-to-end traversal
    double loss_db = 0.0;  // flat attenuation per traversal
};

struct NetworkSpec {
    int n_lines = 0;
    std::vector<Port> ports_present;  // ascending
    double z0 = 50.0;
    SwitchModel sw;
    LineModel line;

    [[nodiscard]] int port_count() const { return 2 * n_lines; }
    [[nodiscard]] bool has_port(Port p) const;
    [[nodiscard]] bool is_full() const { return static_cast<int>(ports_present.size()) == port_count(); }
    [[nodiscard]] std::vector<Port> ports_on(Side s) const;
};

/// Network with every port 1..2N present.
NetworkSpec make_full_spec(int n_lines, double delay, SwitchModel sw, double z0 = 50.0, double loss_db = 0.0);

/// Lists every violated NetworkSpec invariant; empty when valid.
std::vector<Issue> check_spec(const NetworkSpec& spec);

/// Returns the spec with ports sorted and deduplicated, or throws ConfigError
/// listing all violated invariants.
NetworkSpec validate_spec(NetworkSpec spec);

// JSON configuration document (keys n_lines, delta_ns, z0_ohm, r_on_ohm,
// r_off_ohm, t_s_ns, line_loss_db, ports_present). Unknown keys are rejected.
nlohmann::json spec_to_json(const NetworkSpec& spec);
NetworkSpec spec_from_json(const nlohmann::json& doc);

// =============================================================================
// Schedule
// =============================================================================

/// Half-open on-interval [start, end) in seconds.
struct Interval {
    double start = 0.0;
    double end = 0.0;

    [[nodiscard]] double length() const { return end - start; }
    bool operator==(const Interval&) const = default;
};

struct SwitchKey {
    Port port = 0;
    Line line = 0;

    auto operator<=>(const SwitchKey&) const = default;
};

struct Schedule {
    double hyperperiod = 0.0;
    std::map<SwitchKey, std::vector<Interval>> switches;

    bool operator==(const Schedule&) const = default;
};

/// Resistance at `offset` seconds into an on-window of `length` seconds:
/// r_off -> r_on ramp over the first t_s, r_on plateau, r_on -> r_off ramp
/// over the last t_s.
double ramp_resistance(double offset, double length, const SwitchModel& model);

/// Resistance of one switch at time t. Intervals are evaluated modulo the
/// hyperperiod; an interval ending at the hyperperiod and one starting at 0
/// form a single wrapped window. Throws ConfigError if a window is shorter
/// than 2*t_s.
double switch_resistance(double t, std::span<const Interval> intervals, double hyperperiod,
                         const SwitchModel& model);

/// Converts a time to an integer number of ticks of `tick` seconds, throwing
/// ConfigError (naming `what`) if it is not on the grid.
long to_ticks(double t, double tick, const std::string& what);

/// On-window in ticks, possibly wrapping past the hyperperiod.
struct TickWindow {
    long start = 0;
    long length = 0;
};

/// Intervals as cyclically merged tick windows.
std::vector<TickWindow> tick_windows(std::span<const Interval> intervals, long period_ticks, double tick);

/// Samples switch_resistance at every tick of one hyperperiod using integer
/// window arithmetic.
std::vector<double> resistance_profile(std::span<const Interval> intervals, long period_ticks, double tick,
                                       const SwitchModel& model);

/// Checks structural Schedule invariants against a spec: ports present, lines
/// in range, intervals sorted, disjoint and inside [0, hyperperiod).
std::vector<Issue> check_schedule_structure(const Schedule& s, const NetworkSpec& spec);

/// Keeps only switches whose port is present in `spec`.
Schedule restrict_to(const Schedule& s, const NetworkSpec& spec);

}  // namespace sdlnet
