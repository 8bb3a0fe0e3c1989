#pragma once

#include <cstdint>
#include <utility>

#include "p2pbw/rng.hpp"
#include "p2pbw/trace.hpp"

namespace p2pbw {

// Parameters of the mean-reverting diffusion dS = gamma*(mu - S)dt + sigma*dW.
struct OuParams {
    double gamma = 0.0; // mean-reversion rate, 1/time
    double mu = 0.0;    // long-run mean
    double sigma = 0.0; // volatility, value * time^(-1/2)
    double s0 = 0.0;    // initial value

    void validate() const;
};

// One step of the exact transition over horizon dt given a standard-normal
// variate z:
//   next = current*e^(-gamma*dt) + mu*(1 - e^(-gamma*dt))
//          + sigma*sqrt((1 - e^(-2*gamma*dt)) / (2*gamma)) * z
// Exact discretization: no step-size bias at any dt.
double ou_exact_step(double current, const OuParams& params, double dt, double z);

// Iterate the exact step over the grid. Result holds grid.count+1 samples
// starting at params.s0. Identical seed, identical trace.
Trace ou_generate_path(const OuParams& params, const Grid& grid, std::uint64_t seed);
Trace ou_generate_path(const OuParams& params, const Grid& grid, RngStream& stream);

// Long-run (stationary) mean and variance: (mu, sigma^2 / (2*gamma)).
std::pair<double, double> ou_stationary_moments(const OuParams& params);

// Stationary autocovariance (sigma^2 / (2*gamma)) * e^(-gamma*|lag|).
// Symmetric in the lag sign, monotone decreasing in |lag|.
double ou_stationary_autocovariance(const OuParams& params, double lag);

} // namespace p2pbw
