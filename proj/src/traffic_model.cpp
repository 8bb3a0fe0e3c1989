#include "p2pbw/traffic_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace p2pbw {

void PowerLawParams::validate() const {
    if (!(std::isfinite(a) && a > 0.0))
        throw std::invalid_argument("PowerLawParams: cutoff a must be finite and > 0");
    if (!(std::isfinite(n) && n > 1.0))
        throw std::invalid_argument("PowerLawParams: tail index n must be finite and > 1");
}

double PowerLawParams::mean() const {
    validate();
    if (!finite_mean())
        return std::numeric_limits<double>::infinity();
    return a * (n - 1.0) / (n - 2.0);
}

double PowerLawParams::variance() const {
    validate();
    if (!finite_variance())
        return std::numeric_limits<double>::infinity();
    const double second_moment = a * a * (n - 1.0) / (n - 3.0);
    const double m = mean();
    return second_moment - m * m;
}

void TrafficIndices::validate() const {
    if (!(std::isfinite(n0) && n0 > 1.0))
        throw std::invalid_argument("TrafficIndices: n0 must be finite and > 1");
    if (!(std::isfinite(n1) && n1 > 1.0))
        throw std::invalid_argument("TrafficIndices: n1 must be finite and > 1");
}

double power_law_sample(const PowerLawParams& params, double u) {
    params.validate();
    if (!(u > 0.0 && u <= 1.0))
        throw std::invalid_argument("power_law_sample: u must lie in (0,1]");
    return params.a * std::pow(1.0 - u, -1.0 / (params.n - 1.0));
}

double power_law_pdf(const PowerLawParams& params, double x) {
    params.validate();
    if (x < params.a)
        return 0.0;
    return (params.n - 1.0) * std::pow(params.a, params.n - 1.0) * std::pow(x, -params.n);
}

double power_law_cdf(const PowerLawParams& params, double x) {
    params.validate();
    if (x <= params.a)
        return 0.0;
    return 1.0 - std::pow(params.a / x, params.n - 1.0);
}

std::vector<double> generate_traffic_series(const PowerLawParams& params,
                                            std::size_t count, RngStream& stream) {
    params.validate();
    if (count < 1)
        throw std::invalid_argument("generate_traffic_series: count must be >= 1");

    const double exponent = -1.0 / (params.n - 1.0);
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(params.a * std::pow(1.0 - stream.uniform01(), exponent));
    return out;
}

std::vector<double> generate_traffic_series(const PowerLawParams& params,
                                            std::size_t count, std::uint64_t seed) {
    RngStream stream(seed);
    return generate_traffic_series(params, count, stream);
}

} // namespace p2pbw
