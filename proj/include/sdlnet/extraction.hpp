#pragma once

// S-parameters from single-tone transient runs: the incident and outgoing
// waves are correlated against the tone's DFT bin over an integer number of
// hyperperiods, so the tone and every switching spur land on exact bins.

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdlnet/engine.hpp"
#include "sdlnet/netcore.hpp"
#include "sdlnet/statespace.hpp"

namespace sdlnet {

struct SParamGrid {
    std::vector<double> frequencies;  // Hz, ascending
    std::vector<Port> ports;          // present ports, ascending
    std::vector<Eigen::MatrixXcd> s;  // s[f](to, from), indices into `ports`
    double z0 = 50.0;
    NetworkSpec spec;
    std::string schedule_id;

    [[nodiscard]] std::size_t index_of(Port p) const;
    [[nodiscard]] std::complex<double> at(std::size_t f, Port to, Port from) const;
};

/// Frequencies k / (measure_hyperperiods * hyperperiod) inside [f_min, f_max]
/// and below the Nyquist rate of `dt`, thinned evenly to at most max_points.
/// Throws ConfigError when no bin falls in the range.
std::vector<double> coherent_grid(double schedule_hyperperiod, int measure_hyperperiods, double f_min,
                                  double f_max, std::size_t max_points, double dt);

struct SampleWindow {
    long start = 0;
    long length = 0;
};

/// S[p][q] for every traced port p, q = the excited port.
std::vector<std::complex<double>> extract_column(const Traces& traces, double frequency, SampleWindow window);

/// Measurement window of a run.
inline SampleWindow measure_window(const Traces& t) { return {t.measure_start, t.measure_length}; }

/// One transient run per (excited port, frequency); `jobs` worker threads.
/// Results do not depend on the number of jobs.
SParamGrid sweep(const NetworkSpec& spec, const Schedule& schedule, const SimConfig& cfg,
                 const std::vector<double>& frequencies, unsigned jobs = 1, std::string schedule_id = "");

inline constexpr double isolation_cap_db = 200.0;

/// -20 log10 |s|, capped at isolation_cap_db.
double loss_db(std::complex<double> s);

struct PathSeries {
    Port from = 0;
    Port to = 0;
    std::vector<double> db;
};

struct PortSeries {
    Port port = 0;
    std::vector<double> db;
};

struct Metrics {
    std::vector<PathSeries> insertion_loss;  // p -> state(p)
    std::vector<PathSeries> isolation;       // p -> r, r != state(p), r != p
    std::vector<PortSeries> return_loss;
};

Metrics metrics(const SParamGrid& grid, const CirculationState& state);

/// -d(phase)/d(omega) per adjacent frequency pair, in seconds. Throws
/// ConfigError with fewer than two points, or when the spacing exceeds
/// 0.5 / max_delay (default: twice the line delay).
std::vector<double> group_delay(const SParamGrid& grid, Port from, Port to,
                                std::optional<double> max_delay = std::nullopt);

}  // namespace sdlnet
