#pragma once

#include <functional>
#include <vector>

#include "contstab/errors.hpp"

namespace contstab {

/// Least-squares line fit of ln(value) against ln(eps).
struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double residual_max = 0.0;
};

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Geometric grid of `points` values decreasing from hi to lo (endpoints
/// exact).
std::vector<double> geometric_grid(double lo, double hi, int points);

/// Geometric eps grid (decreasing from eps_hi to eps_lo), measured values,
/// and the fitted power law.  When the full-grid fit has R^2 < 0.999 the
/// largest eps decade is dropped once and the fit redone (pre-asymptotic
/// contamination); the grid and values always cover the full request.
struct SweepResult {
    std::vector<double> eps_grid;
    std::vector<double> values;
    double fitted_slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double residual_max = 0.0;
    bool dropped_top_decade = false;
};

/// Evaluate `quantity` on a geometric eps grid and fit the log-log slope.
/// Evaluator failures are rethrown with the offending eps in the message.
/// `threads` > 1 evaluates grid points concurrently; results are assembled
/// in grid order so output is deterministic regardless.
SweepResult sweep(const std::function<double(double)>& quantity, double eps_lo, double eps_hi,
                  int points, int threads = 1);

/// Scan of the two model sums
///   S1(eta) = sum_{n>=1} b_n/(a_n+eta),   S2(eta) = sum_{n>=1} b_n/(a_n+eta)^2,
/// with a_n = e^{-alpha n}, b_n = e^{-beta n}, 0 < beta < alpha, over a
/// geometric eta grid, together with the switchover indices
/// J(eta) = max{ n : a_n >= eta }.  The fitted slopes approach
/// beta/alpha - 1 and beta/alpha - 2.
struct SwitchoverSumReport {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> eta_grid;      // decreasing
    std::vector<double> sum_linear;    // S1
    std::vector<double> sum_squared;   // S2
    std::vector<long> switchover_index;
    double slope_linear = 0.0;
    double slope_squared = 0.0;
};

SwitchoverSumReport switchover_sum_scan(double alpha, double beta, double eta_lo, double eta_hi,
                                        int points);

/// J(eta) = max{ n >= 1 : e^{-alpha n} >= eta } (0 when no n qualifies),
/// by direct scan of the defining inequality.
long switchover_index(double alpha, double eta);

} // namespace contstab
