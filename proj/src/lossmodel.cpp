#include "sdlnet/lossmodel.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "sdlnet/units.hpp"

namespace sdlnet {

std::vector<Issue> check_loss_query(const LossQuery& q) {
    std::vector<Issue> issues;
    if (!(q.delta > 0.0)) issues.push_back({"delta", "must be > 0"});
    if (!(q.t_s >= 0.0 && q.t_s < q.delta)) issues.push_back({"t_s", "must satisfy 0 <= t_s < delta"});
    if (!(q.r_on >= 0.0 && q.r_on < q.r_off)) issues.push_back({"r_on", "must satisfy 0 <= r_on < r_off"});
    if (!(q.z0 > 0.0)) issues.push_back({"z0", "must be > 0"});
    return issues;
}

double h_transmission(double resistance, double z0) { return 2.0 * z0 / (resistance + 2.0 * z0); }

double mean_window_transmission(const LossQuery& q) {
    const double window = 2.0 * q.delta;
    const double h_on = h_transmission(q.r_on, q.z0);
    // Integral of h over one linear ramp between r_on and r_off.
    const double ramp = q.t_s * (2.0 * q.z0 / (q.r_off - q.r_on)) *
                        std::log((q.r_off + 2.0 * q.z0) / (q.r_on + 2.0 * q.z0));
    return ((window - 2.0 * q.t_s) * h_on + 2.0 * ramp) / window;
}

double analytic_il(const LossQuery& q) {
    if (auto issues = check_loss_query(q); !issues.empty()) throw ConfigError(std::move(issues));
    return -2.0 * db20(mean_window_transmission(q));
}

LossContour loss_contour(const std::vector<double>& t_s_values, const std::vector<double>& delta_values, double r_on,
                         double r_off, double z0) {
    LossContour c{t_s_values, delta_values, {}};
    for (std::size_t i = 0; i < t_s_values.size(); ++i) {
        std::vector<double> row;
        for (std::size_t j = 0; j < delta_values.size(); ++j) {
            const LossQuery q{t_s_values[i], delta_values[j], r_on, r_off, z0};
            if (auto issues = check_loss_query(q); !issues.empty()) {
                throw ConfigError("contour[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                                  "t_s=" + std::to_string(seconds_to_ns(q.t_s)) + " ns, delta=" +
                                      std::to_string(seconds_to_ns(q.delta)) + " ns: " + issues.front().message);
            }
            row.push_back(analytic_il(q));
        }
        c.il_db.push_back(std::move(row));
    }
    return c;
}

void write_contour_csv(const LossContour& c, std::ostream& os) {
    char buf[48];
    os << "t_s_ns\\delta_ns";
    for (double d : c.delta_values) {
        std::snprintf(buf, sizeof buf, ",%.10g", seconds_to_ns(d));
        os << buf;
    }
    os << "\n";
    for (std::size_t i = 0; i < c.t_s_values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.10g", seconds_to_ns(c.t_s_values[i]));
        os << buf;
        for (double v : c.il_db[i]) {
            std::snprintf(buf, sizeof buf, ",%.4f", v);
            os << buf;
        }
        os << "\n";
    }
}

}  // namespace sdlnet
