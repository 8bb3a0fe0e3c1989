#pragma once

#include <cstddef>
#include <vector>

#include "p2pbw/bandwidth.hpp"
#include "p2pbw/trace.hpp"

namespace p2pbw {

// Inputs of the closed-form overflow tail: utilization surrogate m,
// self-similarity index H, variance coefficient a.
struct QueueParams {
    double m = 0.0;
    double hurst = 0.0;
    double a = 0.0;

    void validate() const; // 0 < m < 1, 0.5 <= hurst < 1, a > 0
};

// Empirical tail alongside the closed-form values and the shape regression.
// empirical_tail fills thresholds/probabilities; the remaining fields are
// completed by norros_tail evaluation and tail_shape_check.
struct TailReport {
    std::vector<double> thresholds;
    std::vector<double> probabilities;
    std::vector<double> model_probabilities;
    double regression_slope = 0.0;
    double regression_intercept = 0.0;
    double regression_r2 = 0.0;
};

struct ShapeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// (m, H, a) from a bandwidth model instance: m = max(1/download, 1/upload),
// H from the traffic tail index, a = gamma (Var(B) + Var(S)) + sigma K'.
// Throws unstable_queue_error when m >= 1 (no service margin).
QueueParams queue_params_from_spec(const BandwidthSpec& spec, double download_rate,
                                   double upload_rate, double var_traffic, double var_ou);

// P(V > x) = exp(-theta x^(2-2H)) with theta > 0 determined by (m, H, a).
double norros_tail(const QueueParams& params, double x);

// Workload recursion V_{k+1} = max(0, V_k + arrivals_k - service_rate * dt),
// V_0 = 0. Output holds count+1 samples on the arrival grid.
Trace simulate_queue(const Trace& arrivals, double service_rate);

// Fraction of post-burn-in occupancy samples exceeding each threshold.
// Thresholds must be strictly increasing.
TailReport empirical_tail(const Trace& occupancy, const std::vector<double>& thresholds,
                          double burn_in_fraction = 0.1);

// 20 occupancy quantiles between the 50th and 99.9th percentile, deduplicated
// to a strictly increasing grid.
std::vector<double> default_thresholds(const Trace& occupancy, double burn_in_fraction = 0.1);

// Least-squares fit of ln P(V > x) against x^(2-2H) over thresholds with
// empirical probability strictly inside (0,1); a negative slope with high r2
// supports the closed-form tail shape. Needs at least 5 usable points.
ShapeFit tail_shape_check(const TailReport& report, double hurst);

} // namespace p2pbw
