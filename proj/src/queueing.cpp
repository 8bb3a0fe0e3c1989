#include "p2pbw/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "p2pbw/errors.hpp"
#include "p2pbw/statistics.hpp"

namespace p2pbw {

void QueueParams::validate() const {
    if (!(std::isfinite(m) && m > 0.0 && m < 1.0))
        throw std::invalid_argument("QueueParams: m must lie in (0,1)");
    if (!(std::isfinite(hurst) && hurst >= 0.5 && hurst < 1.0))
        throw std::invalid_argument("QueueParams: hurst must lie in [0.5,1)");
    if (!(std::isfinite(a) && a > 0.0))
        throw std::invalid_argument("QueueParams: a must be finite and > 0");
}

QueueParams queue_params_from_spec(const BandwidthSpec& spec, double download_rate,
                                   double upload_rate, double var_traffic, double var_ou) {
    spec.validate();
    if (!(std::isfinite(download_rate) && download_rate > 0.0))
        throw std::invalid_argument("queue_params_from_spec: download_rate must be > 0");
    if (!(std::isfinite(upload_rate) && upload_rate > 0.0))
        throw std::invalid_argument("queue_params_from_spec: upload_rate must be > 0");
    if (!(std::isfinite(var_traffic) && var_traffic >= 0.0) ||
        !(std::isfinite(var_ou) && var_ou >= 0.0))
        throw std::invalid_argument("queue_params_from_spec: variances must be finite and >= 0");

    QueueParams params;
    params.m = std::max(1.0 / download_rate, 1.0 / upload_rate);
    if (params.m >= 1.0)
        throw unstable_queue_error("queue_params_from_spec: m = " + std::to_string(params.m) +
                                   " leaves no service margin (need m < 1)");
    params.hurst =
        hurst_from_indices({spec.traffic.n, spec.traffic.n}, spec.epsilon);
    params.a = spec.ou.gamma * (var_traffic + var_ou) + spec.ou.sigma * spec.kprime;
    params.validate();
    return params;
}

double norros_tail(const QueueParams& params, double x) {
    params.validate();
    if (!(std::isfinite(x) && x >= 0.0))
        throw std::invalid_argument("norros_tail: x must be finite and >= 0");

    const double h = params.hurst;
    const double theta = 1.0 / (2.0 * params.m * params.a * (1.0 - h) * (1.0 - h)) *
                         std::pow((1.0 - params.m) * (1.0 - h) / h, 2.0 * h);
    return std::exp(-theta * std::pow(x, 2.0 - 2.0 * h));
}

Trace simulate_queue(const Trace& arrivals, double service_rate) {
    arrivals.validate();
    if (!(std::isfinite(service_rate) && service_rate > 0.0))
        throw std::invalid_argument("simulate_queue: service_rate must be finite and > 0");
    for (std::size_t i = 0; i < arrivals.size(); ++i)
        if (arrivals.values[i] < 0.0)
            throw std::invalid_argument("simulate_queue: negative arrival at index " +
                                        std::to_string(i));

    const double drain = service_rate * arrivals.dt;
    Trace occupancy;
    occupancy.dt = arrivals.dt;
    occupancy.values.resize(arrivals.size() + 1);
    occupancy.values[0] = 0.0;
    for (std::size_t k = 0; k < arrivals.size(); ++k)
        occupancy.values[k + 1] = std::max(0.0, occupancy.values[k] + arrivals.values[k] - drain);
    return occupancy;
}

namespace {

std::size_t burn_in_offset(const Trace& occupancy, double burn_in_fraction) {
    if (!(std::isfinite(burn_in_fraction) && burn_in_fraction >= 0.0 && burn_in_fraction < 1.0))
        throw std::invalid_argument("burn-in fraction must lie in [0,1)");
    return static_cast<std::size_t>(burn_in_fraction * static_cast<double>(occupancy.size()));
}

} // namespace

TailReport empirical_tail(const Trace& occupancy, const std::vector<double>& thresholds,
                          double burn_in_fraction) {
    occupancy.validate();
    const std::size_t start = burn_in_offset(occupancy, burn_in_fraction);
    if (start >= occupancy.size())
        throw std::invalid_argument("empirical_tail: burn-in leaves no samples");
    for (std::size_t i = 1; i < thresholds.size(); ++i)
        if (!(thresholds[i] > thresholds[i - 1]))
            throw std::invalid_argument("empirical_tail: thresholds must be strictly increasing");

    const std::size_t kept = occupancy.size() - start;
    TailReport report;
    report.thresholds = thresholds;
    report.probabilities.reserve(thresholds.size());
    for (double x : thresholds) {
        std::size_t exceed = 0;
        for (std::size_t i = start; i < occupancy.size(); ++i)
            if (occupancy.values[i] > x)
                ++exceed;
        report.probabilities.push_back(static_cast<double>(exceed) / static_cast<double>(kept));
    }
    return report;
}

std::vector<double> default_thresholds(const Trace& occupancy, double burn_in_fraction) {
    occupancy.validate();
    const std::size_t start = burn_in_offset(occupancy, burn_in_fraction);
    if (start >= occupancy.size())
        throw std::invalid_argument("default_thresholds: burn-in leaves no samples");

    std::vector<double> sorted(occupancy.values.begin() + static_cast<std::ptrdiff_t>(start),
                               occupancy.values.end());
    std::sort(sorted.begin(), sorted.end());

    constexpr int kCount = 20;
    std::vector<double> thresholds;
    thresholds.reserve(kCount);
    for (int i = 0; i < kCount; ++i) {
        const double q = 0.5 + (0.999 - 0.5) * i / (kCount - 1);
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        const double x = sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
        if (thresholds.empty() || x > thresholds.back())
            thresholds.push_back(x);
    }
    return thresholds;
}

ShapeFit tail_shape_check(const TailReport& report, double hurst) {
    if (!(std::isfinite(hurst) && hurst >= 0.5 && hurst < 1.0))
        throw std::invalid_argument("tail_shape_check: hurst must lie in [0.5,1)");
    if (report.thresholds.size() != report.probabilities.size())
        throw std::invalid_argument("tail_shape_check: report fields disagree in length");

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < report.thresholds.size(); ++i) {
        const double p = report.probabilities[i];
        if (p > 0.0 && p < 1.0) {
            xs.push_back(std::pow(report.thresholds[i], 2.0 - 2.0 * hurst));
            ys.push_back(std::log(p));
        }
    }
    if (xs.size() < 5)
        throw insufficient_data_error("tail_shape_check: need at least 5 thresholds with "
                                      "empirical probability strictly inside (0,1), have " +
                                      std::to_string(xs.size()));

    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    ShapeFit fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;

    double ss_res = 0.0, ss_tot = 0.0;
    const double y_mean = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double predicted = fit.intercept + fit.slope * xs[i];
        ss_res += (ys[i] - predicted) * (ys[i] - predicted);
        ss_tot += (ys[i] - y_mean) * (ys[i] - y_mean);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

} // namespace p2pbw
