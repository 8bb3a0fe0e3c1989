#include "p2pbw/ou_process.hpp"

#include <cmath>
#include <stdexcept>

namespace p2pbw {

void OuParams::validate() const {
    if (!(std::isfinite(gamma) && gamma > 0.0))
        throw std::invalid_argument("OuParams: gamma must be finite and > 0");
    if (!(std::isfinite(sigma) && sigma >= 0.0))
        throw std::invalid_argument("OuParams: sigma must be finite and >= 0");
    if (!std::isfinite(mu))
        throw std::invalid_argument("OuParams: mu must be finite");
    if (!std::isfinite(s0))
        throw std::invalid_argument("OuParams: s0 must be finite");
}

namespace {

// Conditional std of the transition over one step.
double transition_std(const OuParams& p, double dt) {
    return p.sigma * std::sqrt((1.0 - std::exp(-2.0 * p.gamma * dt)) / (2.0 * p.gamma));
}

} // namespace

double ou_exact_step(double current, const OuParams& params, double dt, double z) {
    params.validate();
    if (!std::isfinite(current))
        throw std::invalid_argument("ou_exact_step: current must be finite");
    if (!(std::isfinite(dt) && dt > 0.0))
        throw std::invalid_argument("ou_exact_step: dt must be finite and > 0");
    if (!std::isfinite(z))
        throw std::invalid_argument("ou_exact_step: z must be finite");

    const double decay = std::exp(-params.gamma * dt);
    return current * decay + params.mu * (1.0 - decay) + transition_std(params, dt) * z;
}

Trace ou_generate_path(const OuParams& params, const Grid& grid, RngStream& stream) {
    params.validate();
    grid.validate();

    const double decay = std::exp(-params.gamma * grid.dt);
    const double step_std = transition_std(params, grid.dt);
    const double drift = params.mu * (1.0 - decay);

    std::vector<double> values;
    values.reserve(grid.count + 1);
    double s = params.s0;
    values.push_back(s);
    for (std::size_t i = 0; i < grid.count; ++i) {
        s = s * decay + drift + step_std * stream.normal();
        values.push_back(s);
    }
    return Trace(grid.dt, std::move(values));
}

Trace ou_generate_path(const OuParams& params, const Grid& grid, std::uint64_t seed) {
    RngStream stream(seed);
    return ou_generate_path(params, grid, stream);
}

std::pair<double, double> ou_stationary_moments(const OuParams& params) {
    params.validate();
    return {params.mu, params.sigma * params.sigma / (2.0 * params.gamma)};
}

double ou_stationary_autocovariance(const OuParams& params, double lag) {
    params.validate();
    if (!std::isfinite(lag))
        throw std::invalid_argument("ou_stationary_autocovariance: lag must be finite");
    const double v = params.sigma * params.sigma / (2.0 * params.gamma);
    return v * std::exp(-params.gamma * std::fabs(lag));
}

} // namespace p2pbw
