#pragma once

// =============================================================================
// Discrete-time traveling-wave simulator
// =============================================================================
// Every line is a matched, dispersionless Z0 line of exactly K samples delay.
// At each timestep the two sides of the line array are solved as resistive
// networks: each port and each line end is a Thevenin source 2a behind Z0,
// each switch a resistance R(t) between a port node and a line-end node.
// Outgoing waves are b = V - a.
// =============================================================================

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sdlnet/netcore.hpp"

namespace sdlnet {

struct SimConfig {
    int samples_per_delay = 128;  // K, timestep = delta / K
    int settle_hyperperiods = 8;
    int measure_hyperperiods = 4;
    double source_amplitude = 1.0;  // Thevenin open-circuit volts
};

std::vector<Issue> check_sim_config(const SimConfig& cfg, const NetworkSpec& spec);

struct Excitation {
    Port port = 1;
    double frequency = 0.0;  // Hz, must sit on the coherent grid
    double amplitude = 1.0;
};

/// Scattering matrix of one side for the given switch conductances
/// (rows: ports, columns: lines; 0 = no switch, +inf = short). Rows/columns
/// of the result are ordered ports first, then lines.
Eigen::MatrixXd side_scattering(const Eigen::MatrixXd& conductance, double z0);

struct SideWaves {
    std::vector<double> ports;  // b_m
    std::vector<double> lines;  // b_n, injected into the lines
};

SideWaves solve_side(std::span<const double> port_waves, std::span<const double> line_waves,
                     const Eigen::MatrixXd& conductance, double z0);

struct WaveState {
    int depth = 0;
    std::vector<std::vector<double>> forward;   // left -> right, per line
    std::vector<std::vector<double>> backward;  // right -> left, per line
    std::vector<double> left_port_voltage, left_line_voltage;
    std::vector<double> right_port_voltage, right_line_voltage;

    WaveState(int lines, int depth, std::size_t left_ports, std::size_t right_ports);
};

struct Traces {
    double dt = 0.0;
    Port excited = 0;
    std::vector<Port> ports;                    // present ports, ascending
    std::vector<double> incident;               // a_q per sample
    std::vector<std::vector<double>> outgoing;  // b_p per sample, parallel to `ports`
    long hyperperiod_samples = 0;
    long measure_start = 0;
    long measure_length = 0;
};

/// Precomputed per-tick side scattering for one spec + schedule. Immutable
/// after construction; run() may be called concurrently.
class TransientEngine {
public:
    TransientEngine(NetworkSpec spec, const Schedule& schedule, SimConfig cfg);

    [[nodiscard]] Traces run(const Excitation& exc) const;

    [[nodiscard]] double timestep() const { return dt_; }
    [[nodiscard]] long hyperperiod_samples() const { return period_; }
    [[nodiscard]] double hyperperiod() const { return static_cast<double>(period_) * dt_; }
    [[nodiscard]] const NetworkSpec& spec() const { return spec_; }
    [[nodiscard]] const SimConfig& config() const { return cfg_; }

private:
    struct SideTable {
        std::vector<Port> ports;
        std::vector<Eigen::MatrixXd> matrices;
        std::vector<std::uint32_t> pattern;  // per tick -> matrices index
    };

    SideTable build_side(Side side, const Schedule& schedule) const;

    NetworkSpec spec_;
    SimConfig cfg_;
    double dt_ = 0.0;
    long period_ = 0;
    SideTable left_;
    SideTable right_;
};

Traces run_transient(const NetworkSpec& spec, const Schedule& schedule, const Excitation& exc,
                     const SimConfig& cfg);

/// Removes a port and its switches from a full network.
NetworkSpec reduce_network(const NetworkSpec& spec, Port removed_port);

/// CSV: t_ns, a_q, b_<port>... at full sample rate.
void write_traces_csv(const Traces& traces, std::ostream& os);

}  // namespace sdlnet
