#include "sdlnet/extraction.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "sdlnet/units.hpp"

namespace sdlnet {

std::size_t SParamGrid::index_of(Port p) const {
    auto it = std::find(ports.begin(), ports.end(), p);
    if (it == ports.end()) throw ConfigError("port", "port " + std::to_string(p) + " not in grid");
    return static_cast<std::size_t>(it - ports.begin());
}

std::complex<double> SParamGrid::at(std::size_t f, Port to, Port from) const {
    return s.at(f)(static_cast<Eigen::Index>(index_of(to)), static_cast<Eigen::Index>(index_of(from)));
}

std::vector<double> coherent_grid(double schedule_hyperperiod, int measure_hyperperiods, double f_min,
                                  double f_max, std::size_t max_points, double dt) {
    if (!(schedule_hyperperiod > 0.0) || measure_hyperperiods < 1 || !(dt > 0.0)) {
        throw ConfigError("grid", "hyperperiod, window and timestep must be positive");
    }
    const double window = measure_hyperperiods * schedule_hyperperiod;
    const double nyquist = 0.5 / dt;
    const double top = std::min(f_max, nyquist);

    // Bin arithmetic in units of the bin spacing; tolerate rounding at edges.
    long k_lo = std::max(1L, static_cast<long>(std::ceil(f_min * window - 1e-9)));
    long k_hi = static_cast<long>(std::floor(top * window + 1e-9));
    if (static_cast<double>(k_hi) / window >= nyquist) --k_hi;
    if (k_hi < k_lo || max_points == 0) {
        throw ConfigError("grid", "no coherent frequency bin inside the requested range");
    }

    std::vector<long> ks;
    const long span = k_hi - k_lo + 1;
    if (static_cast<std::size_t>(span) <= max_points) {
        for (long k = k_lo; k <= k_hi; ++k) ks.push_back(k);
    } else if (max_points == 1) {
        ks.push_back(k_lo);
    } else {
        for (std::size_t i = 0; i < max_points; ++i) {
            const long k = k_lo + std::lround(static_cast<double>(i) * static_cast<double>(k_hi - k_lo) /
                                              static_cast<double>(max_points - 1));
            if (ks.empty() || ks.back() != k) ks.push_back(k);
        }
    }
    std::vector<double> out;
    out.reserve(ks.size());
    for (long k : ks) out.push_back(static_cast<double>(k) / window);
    return out;
}

namespace {

std::vector<std::complex<double>> twiddles(long bin, long length) {
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<std::complex<double>> w(static_cast<std::size_t>(length));
    for (long n = 0; n < length; ++n) {
        const long phase = static_cast<long>((static_cast<long long>(bin) * n) % length);
        w[static_cast<std::size_t>(n)] = std::polar(1.0, -two_pi * static_cast<double>(phase) / static_cast<double>(length));
    }
    return w;
}

std::complex<double> dft_bin(const std::vector<double>& x, const std::vector<std::complex<double>>& w, long start) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t n = 0; n < w.size(); ++n) acc += x[static_cast<std::size_t>(start) + n] * w[n];
    return acc;
}

}  // namespace

std::vector<std::complex<double>> extract_column(const Traces& traces, double frequency, SampleWindow window) {
    if (window.length <= 0 || window.start < 0 ||
        window.start + window.length > static_cast<long>(traces.incident.size())) {
        throw ConfigError("window", "sample window outside the traces");
    }
    if (traces.hyperperiod_samples > 0 && window.length % traces.hyperperiod_samples != 0) {
        throw ConfigError("window", "window is not an integer number of hyperperiods");
    }
    const double cycles = frequency * static_cast<double>(window.length) * traces.dt;
    const long bin = std::lround(cycles);
    if (std::abs(cycles - static_cast<double>(bin)) > 1e-6) {
        throw ConfigError("window", "window does not hold an integer number of tone cycles");
    }

    const auto w = twiddles(bin, window.length);
    const auto ref = dft_bin(traces.incident, w, window.start);
    if (std::abs(ref) == 0.0) throw SimulationError("incident wave has no energy at the tone bin");
    std::vector<std::complex<double>> column;
    column.reserve(traces.outgoing.size());
    for (const auto& b : traces.outgoing) column.push_back(dft_bin(b, w, window.start) / ref);
    return column;
}

SParamGrid sweep(const NetworkSpec& spec, const Schedule& schedule, const SimConfig& cfg,
                 const std::vector<double>& frequencies, unsigned jobs, std::string schedule_id) {
    const TransientEngine engine(spec, schedule, cfg);

    SParamGrid grid;
    grid.frequencies = frequencies;
    grid.ports = engine.spec().ports_present;
    grid.z0 = engine.spec().z0;
    grid.spec = engine.spec();
    grid.schedule_id = std::move(schedule_id);
    if (!std::is_sorted(frequencies.begin(), frequencies.end()) ||
        std::adjacent_find(frequencies.begin(), frequencies.end()) != frequencies.end()) {
        throw ConfigError("frequencies", "must be strictly ascending");
    }

    const auto np = static_cast<Eigen::Index>(grid.ports.size());
    grid.s.assign(frequencies.size(), Eigen::MatrixXcd::Zero(np, np));
    const std::size_t items = frequencies.size() * grid.ports.size();
    if (items == 0) return grid;

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < items; i = next++) {
            const std::size_t f = i / grid.ports.size();
            const std::size_t q = i % grid.ports.size();
            try {
                const auto tr = engine.run({grid.ports[q], frequencies[f], cfg.source_amplitude});
                const auto col = extract_column(tr, frequencies[f], measure_window(tr));
                for (std::size_t p = 0; p < col.size(); ++p) {
                    grid.s[f](static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = col[p];
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = items;
            }
        }
    };

    const unsigned threads = std::clamp<unsigned>(jobs, 1U, static_cast<unsigned>(std::min<std::size_t>(items, 256)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return grid;
}

double loss_db(std::complex<double> s) {
    const double mag = std::abs(s);
    if (mag == 0.0) return isolation_cap_db;
    return std::min(isolation_cap_db, -db20(mag));
}

Metrics metrics(const SParamGrid& grid, const CirculationState& state) {
    Metrics m;
    auto series = [&](Port to, Port from) {
        std::vector<double> db;
        for (std::size_t f = 0; f < grid.frequencies.size(); ++f) db.push_back(loss_db(grid.at(f, to, from)));
        return db;
    };
    for (const auto& [from, to] : state.next) {
        (void)grid.index_of(from);  // throws for ports absent from the grid
        (void)grid.index_of(to);  // throws for ports absent from the grid
        m.insertion_loss.push_back({from, to, series(to, from)});
    }
    for (Port from : grid.ports) {
        auto it = state.next.find(from);
        for (Port to : grid.ports) {
            if (to == from || (it != state.next.end() && it->second == to)) continue;
            m.isolation.push_back({from, to, series(to, from)});
        }
        m.return_loss.push_back({from, series(from, from)});
    }
    return m;
}

std::vector<double> group_delay(const SParamGrid& grid, Port from, Port to, std::optional<double> max_delay) {
    if (grid.frequencies.size() < 2) throw ConfigError("frequencies", "group delay needs at least two frequency points");
    const double bound = max_delay.value_or(2.0 * grid.spec.line.delay);
    std::vector<double> out;
    for (std::size_t f = 1; f < grid.frequencies.size(); ++f) {
        const double df = grid.frequencies[f] - grid.frequencies[f - 1];
        if (df * bound > 0.5) {
            throw ConfigError("frequencies", "grid spacing " + std::to_string(df * 1e-6) +
                                                 " MHz is too coarse to unwrap phase; use spacing below " +
                                                 std::to_string(0.5 / bound * 1e-6) + " MHz");
        }
        // Phase of the ratio gives the wrapped difference directly.
        const auto ratio = grid.at(f, to, from) / grid.at(f - 1, to, from);
        out.push_back(-std::arg(ratio) / (2.0 * std::numbers::pi * df));
    }
    return out;
}

}  // namespace sdlnet
