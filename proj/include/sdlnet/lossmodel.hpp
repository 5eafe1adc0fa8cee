#pragma once

// Closed-form switching loss of one switched path.
//
// A switch window lasts 2*delta: a linear r_off -> r_on ramp of t_s, an r_on
// plateau, and a linear r_on -> r_off ramp of t_s. Each crossing transmits
// h(t) = 2 Z0 / (R(t) + 2 Z0). The path crosses two such switches and its
// insertion loss is taken as IL = -40 log10(mean of h over the window).
// The window is 2*delta for any line count, so the same expression serves
// every N.

#include <iosfwd>
#include <vector>

#include "sdlnet/netcore.hpp"

namespace sdlnet {

struct LossQuery {
    double t_s = 0.0;    // seconds
    double delta = 0.0;  // seconds
    double r_on = 0.0;
    double r_off = 0.0;
    double z0 = 50.0;
};

std::vector<Issue> check_loss_query(const LossQuery& q);

double h_transmission(double resistance, double z0);

/// Mean of h(t) over one 2*delta switch window.
double mean_window_transmission(const LossQuery& q);

/// -40 log10(mean_window_transmission). Throws ConfigError on invalid queries.
double analytic_il(const LossQuery& q);

struct LossContour {
    std::vector<double> t_s_values;    // rows
    std::vector<double> delta_values;  // columns
    std::vector<std::vector<double>> il_db;
};

/// Throws ConfigError naming the first (t_s, delta) pair with t_s >= delta.
LossContour loss_contour(const std::vector<double>& t_s_values, const std::vector<double>& delta_values, double r_on,
                         double r_off, double z0);

/// Header row of delta values (ns), first column of t_s values (ns), IL in dB
/// with 4 decimals.
void write_contour_csv(const LossContour& c, std::ostream& os);

}  // namespace sdlnet
