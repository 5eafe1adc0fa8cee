#include "sdlnet/engine.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>

#include "sdlnet/units.hpp"

namespace sdlnet {

std::vector<Issue> check_sim_config(const SimConfig& cfg, const NetworkSpec& spec) {
    std::vector<Issue> issues;
    if (cfg.samples_per_delay < 32) issues.push_back({"samples_per_delay", "must be >= 32"});
    if (cfg.settle_hyperperiods < 4) issues.push_back({"settle_hyperperiods", "must be >= 4"});
    if (cfg.measure_hyperperiods < 1) issues.push_back({"measure_hyperperiods", "must be >= 1"});
    if (!std::isfinite(cfg.source_amplitude)) issues.push_back({"source_amplitude", "must be finite"});
    if (cfg.samples_per_delay >= 32 && spec.sw.t_s > 0.0 &&
        spec.line.delay / cfg.samples_per_delay > spec.sw.t_s / 4.0 * (1.0 + 1e-12)) {
        issues.push_back({"samples_per_delay", "timestep must not exceed t_s/4"});
    }
    return issues;
}

// =============================================================================
// Side solve
// =============================================================================

Eigen::MatrixXd side_scattering(const Eigen::MatrixXd& conductance, double z0) {
    const auto ports = conductance.rows();
    const auto lines = conductance.cols();
    const auto nodes = ports + lines;
    const double g0 = 1.0 / z0;

    // Zero-ohm switches merge their two nodes into one supernode.
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(nodes));
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto find = [&](Eigen::Index i) {
        while (parent[static_cast<std::size_t>(i)] != i) {
            parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
            i = parent[static_cast<std::size_t>(i)];
        }
        return i;
    };
    for (Eigen::Index m = 0; m < ports; ++m) {
        for (Eigen::Index n = 0; n < lines; ++n) {
            if (std::isinf(conductance(m, n))) parent[static_cast<std::size_t>(find(m))] = find(ports + n);
        }
    }
    std::vector<Eigen::Index> super(static_cast<std::size_t>(nodes), -1);
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < nodes; ++i) {
        auto& id = super[static_cast<std::size_t>(find(i))];
        if (id < 0) id = count++;
    }
    Eigen::MatrixXd incidence = Eigen::MatrixXd::Zero(nodes, count);
    for (Eigen::Index i = 0; i < nodes; ++i) incidence(i, super[static_cast<std::size_t>(find(i))]) = 1.0;

    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(count, count);
    for (Eigen::Index i = 0; i < nodes; ++i) {
        const auto s = super[static_cast<std::size_t>(find(i))];
        g(s, s) += g0;
    }
    for (Eigen::Index m = 0; m < ports; ++m) {
        for (Eigen::Index n = 0; n < lines; ++n) {
            const double c = conductance(m, n);
            if (c <= 0.0 || std::isinf(c)) continue;
            const auto a = super[static_cast<std::size_t>(find(m))];
            const auto b = super[static_cast<std::size_t>(find(ports + n))];
            if (a == b) continue;
            g(a, a) += c;
            g(b, b) += c;
            g(a, b) -= c;
            g(b, a) -= c;
        }
    }

    const Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) throw SimulationError("side nodal matrix is not positive definite");
    const Eigen::MatrixXd v = llt.solve(incidence.transpose());
    return 2.0 * g0 * incidence * v - Eigen::MatrixXd::Identity(nodes, nodes);
}

SideWaves solve_side(std::span<const double> port_waves, std::span<const double> line_waves,
                     const Eigen::MatrixXd& conductance, double z0) {
    if (conductance.cols() < 1) throw ConfigError("lines", "at least one line is required");
    if (static_cast<Eigen::Index>(port_waves.size()) != conductance.rows() ||
        static_cast<Eigen::Index>(line_waves.size()) != conductance.cols()) {
        throw ConfigError("conductance", "dimensions do not match the wave vectors");
    }
    if ((conductance.array() < 0.0).any()) throw ConfigError("conductance", "must be >= 0");

    const auto s = side_scattering(conductance, z0);
    Eigen::VectorXd a(s.rows());
    for (std::size_t i = 0; i < port_waves.size(); ++i) a(static_cast<Eigen::Index>(i)) = port_waves[i];
    for (std::size_t i = 0; i < line_waves.size(); ++i) {
        a(static_cast<Eigen::Index>(port_waves.size() + i)) = line_waves[i];
    }
    const Eigen::VectorXd b = s * a;
    SideWaves out;
    out.ports.assign(b.data(), b.data() + port_waves.size());
    out.lines.assign(b.data() + port_waves.size(), b.data() + b.size());
    return out;
}

WaveState::WaveState(int lines, int depth_, std::size_t left_ports, std::size_t right_ports)
    : depth(depth_),
      forward(static_cast<std::size_t>(lines), std::vector<double>(static_cast<std::size_t>(depth_), 0.0)),
      backward(static_cast<std::size_t>(lines), std::vector<double>(static_cast<std::size_t>(depth_), 0.0)),
      left_port_voltage(left_ports, 0.0),
      left_line_voltage(static_cast<std::size_t>(lines), 0.0),
      right_port_voltage(right_ports, 0.0),
      right_line_voltage(static_cast<std::size_t>(lines), 0.0) {}

// =============================================================================
// Engine
// =============================================================================

TransientEngine::TransientEngine(NetworkSpec spec, const Schedule& schedule, SimConfig cfg)
    : spec_(validate_spec(std::move(spec))), cfg_(cfg) {
    if (auto issues = check_sim_config(cfg_, spec_); !issues.empty()) throw ConfigError(std::move(issues));
    if (auto issues = check_schedule_structure(schedule, spec_); !issues.empty()) throw ConfigError(std::move(issues));
    dt_ = spec_.line.delay / cfg_.samples_per_delay;
    period_ = to_ticks(schedule.hyperperiod, dt_, "hyperperiod_ns");
    if (period_ < 1) throw ConfigError("hyperperiod_ns", "shorter than one timestep");
    left_ = build_side(Side::left, schedule);
    right_ = build_side(Side::right, schedule);
}

TransientEngine::SideTable TransientEngine::build_side(Side side, const Schedule& schedule) const {
    SideTable table;
    table.ports = spec_.ports_on(side);
    const auto rows = static_cast<Eigen::Index>(table.ports.size());
    const auto cols = static_cast<Eigen::Index>(spec_.n_lines);

    // Resistance profile per (port row, line column); switches missing from
    // the schedule exist but stay off.
    std::vector<std::vector<double>> profiles;
    for (Port m : table.ports) {
        for (Line n = 1; n <= spec_.n_lines; ++n) {
            auto it = schedule.switches.find({m, n});
            if (it == schedule.switches.end()) {
                profiles.emplace_back(static_cast<std::size_t>(period_), spec_.sw.r_off);
            } else {
                profiles.push_back(resistance_profile(it->second, period_, dt_, spec_.sw));
            }
        }
    }

    std::map<std::vector<double>, std::uint32_t> seen;
    table.pattern.resize(static_cast<std::size_t>(period_));
    std::vector<double> key(profiles.size());
    for (long t = 0; t < period_; ++t) {
        for (std::size_t i = 0; i < profiles.size(); ++i) key[i] = profiles[i][static_cast<std::size_t>(t)];
        auto [it, inserted] = seen.try_emplace(key, static_cast<std::uint32_t>(table.matrices.size()));
        if (inserted) {
            Eigen::MatrixXd g(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r) {
                for (Eigen::Index c = 0; c < cols; ++c) {
                    const double res = key[static_cast<std::size_t>(r * cols + c)];
                    g(r, c) = res == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / res;
                }
            }
            table.matrices.push_back(side_scattering(g, spec_.z0));
        }
        table.pattern[static_cast<std::size_t>(t)] = it->second;
    }
    return table;
}

Traces TransientEngine::run(const Excitation& exc) const {
    if (!spec_.has_port(exc.port)) throw ConfigError("excitation", "port " + std::to_string(exc.port) + " is not present");
    const long measure = period_ * cfg_.measure_hyperperiods;
    const long total = period_ * (cfg_.settle_hyperperiods + cfg_.measure_hyperperiods);

    // Tone bin within the measurement window; its phase is computed from the
    // integer product bin*k so every window sees identical samples.
    const double bins = exc.frequency * static_cast<double>(measure) * dt_;
    const long bin = std::lround(bins);
    if (!(exc.frequency >= 0.0) || std::abs(bins - static_cast<double>(bin)) > 1e-6) {
        throw ConfigError("frequency", "frequency is not on the coherent grid of the measurement window");
    }
    if (2 * bin >= measure) throw ConfigError("frequency", "frequency at or above the Nyquist rate");

    const int depth = cfg_.samples_per_delay;
    const double line_gain = std::pow(10.0, -spec_.line.loss_db / 20.0);
    const int lines = spec_.n_lines;
    const auto nl = left_.ports.size();
    const auto nr = right_.ports.size();

    WaveState state(lines, depth, nl, nr);
    Eigen::VectorXd a_left = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nl) + lines);
    Eigen::VectorXd a_right = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nr) + lines);
    Eigen::VectorXd b_left(a_left.size());
    Eigen::VectorXd b_right(a_right.size());

    const auto index_in = [](const std::vector<Port>& ports, Port p) -> long {
        auto it = std::find(ports.begin(), ports.end(), p);
        return it == ports.end() ? -1 : static_cast<long>(it - ports.begin());
    };
    const long src_left = index_in(left_.ports, exc.port);
    const long src_right = index_in(right_.ports, exc.port);

    Traces tr;
    tr.dt = dt_;
    tr.excited = exc.port;
    tr.ports = spec_.ports_present;
    tr.hyperperiod_samples = period_;
    tr.measure_start = total - measure;
    tr.measure_length = measure;
    tr.incident.resize(static_cast<std::size_t>(total));
    tr.outgoing.assign(tr.ports.size(), std::vector<double>(static_cast<std::size_t>(total)));

    std::vector<std::pair<std::size_t, std::size_t>> trace_slot;  // (side 0/1, row) per traced port
    for (Port p : tr.ports) {
        const long l = index_in(left_.ports, p);
        trace_slot.emplace_back(l >= 0 ? 0 : 1, static_cast<std::size_t>(l >= 0 ? l : index_in(right_.ports, p)));
    }

    const double two_pi = 2.0 * std::numbers::pi;
    for (long k = 0; k < total; ++k) {
        const auto slot = static_cast<std::size_t>(k % depth);
        const auto tick = static_cast<std::size_t>(k % period_);
        const long phase = static_cast<long>((static_cast<long long>(bin) * k) % measure);
        const double incident =
            0.5 * exc.amplitude * std::cos(two_pi * static_cast<double>(phase) / static_cast<double>(measure));

        if (src_left >= 0) a_left(src_left) = incident;
        if (src_right >= 0) a_right(src_right) = incident;
        for (int n = 0; n < lines; ++n) {
            a_left(static_cast<Eigen::Index>(nl) + n) = line_gain * state.backward[static_cast<std::size_t>(n)][slot];
            a_right(static_cast<Eigen::Index>(nr) + n) = line_gain * state.forward[static_cast<std::size_t>(n)][slot];
        }

        b_left.noalias() = left_.matrices[left_.pattern[tick]] * a_left;
        b_right.noalias() = right_.matrices[right_.pattern[tick]] * a_right;

        for (int n = 0; n < lines; ++n) {
            state.forward[static_cast<std::size_t>(n)][slot] = b_left(static_cast<Eigen::Index>(nl) + n);
            state.backward[static_cast<std::size_t>(n)][slot] = b_right(static_cast<Eigen::Index>(nr) + n);
            state.left_line_voltage[static_cast<std::size_t>(n)] =
                a_left(static_cast<Eigen::Index>(nl) + n) + b_left(static_cast<Eigen::Index>(nl) + n);
            state.right_line_voltage[static_cast<std::size_t>(n)] =
                a_right(static_cast<Eigen::Index>(nr) + n) + b_right(static_cast<Eigen::Index>(nr) + n);
        }
        for (std::size_t i = 0; i < nl; ++i) {
            state.left_port_voltage[i] = a_left(static_cast<Eigen::Index>(i)) + b_left(static_cast<Eigen::Index>(i));
        }
        for (std::size_t i = 0; i < nr; ++i) {
            state.right_port_voltage[i] = a_right(static_cast<Eigen::Index>(i)) + b_right(static_cast<Eigen::Index>(i));
        }

        tr.incident[static_cast<std::size_t>(k)] = incident;
        for (std::size_t i = 0; i < trace_slot.size(); ++i) {
            const auto& [side, row] = trace_slot[i];
            tr.outgoing[i][static_cast<std::size_t>(k)] =
                side == 0 ? b_left(static_cast<Eigen::Index>(row)) : b_right(static_cast<Eigen::Index>(row));
        }
    }
    return tr;
}

Traces run_transient(const NetworkSpec& spec, const Schedule& schedule, const Excitation& exc,
                     const SimConfig& cfg) {
    return TransientEngine(spec, schedule, cfg).run(exc);
}

NetworkSpec reduce_network(const NetworkSpec& spec, Port removed_port) {
    if (removed_port < 1 || removed_port > spec.port_count()) {
        throw ConfigError("reduce_port", "port " + std::to_string(removed_port) + " out of range");
    }
    if (!spec.has_port(removed_port)) {
        throw ConfigError("reduce_port", "port " + std::to_string(removed_port) + " is already absent");
    }
    if (!spec.is_full()) throw ConfigError("reduce_port", "only a full 2N-port network can be reduced");
    NetworkSpec out = spec;
    std::erase(out.ports_present, removed_port);
    return validate_spec(std::move(out));
}

void write_traces_csv(const Traces& traces, std::ostream& os) {
    os << "t_ns,a_" << traces.excited;
    for (Port p : traces.ports) os << ",b_" << p;
    os << "\n";
    char buf[32];
    for (std::size_t k = 0; k < traces.incident.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(k) * traces.dt * 1e9);
        os << buf;
        std::snprintf(buf, sizeof buf, ",%.12e", traces.incident[k]);
        os << buf;
        for (const auto& b : traces.outgoing) {
            std::snprintf(buf, sizeof buf, ",%.12e", b[k]);
            os << buf;
        }
        os << "\n";
    }
}

}  // namespace sdlnet
