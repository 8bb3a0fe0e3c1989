#pragma once

#include <cstdint>
#include <vector>

#include "p2pbw/rng.hpp"

namespace p2pbw {

// Heavy-tailed traffic marginal: density f(x) = (n-1) a^(n-1) / x^n for
// x >= a, zero below the cutoff. n must exceed 1 for normalizability;
// the mean is finite only for n > 2 and the variance only for n > 3
// (the analytic helpers return +inf outside those ranges).
struct PowerLawParams {
    double a = 1.0; // lower cutoff, > 0
    double n = 3.0; // tail index of the density

    void validate() const;

    bool finite_mean() const { return n > 2.0; }
    bool finite_variance() const { return n > 3.0; }

    // a*(n-1)/(n-2); +inf when n <= 2.
    double mean() const;
    // a^2*(n-1)/(n-3) - mean^2; +inf when n <= 3.
    double variance() const;
};

// ON/OFF tail index pair; only min(n0, n1) enters the Hurst link
// H = (4 - min(n0, n1)) / 2.
struct TrafficIndices {
    double n0 = 2.5;
    double n1 = 2.5;

    void validate() const;
    double min_index() const { return n0 < n1 ? n0 : n1; }
};

// Inverse-transform draw: x = a * (1-u)^(-1/(n-1)) for u in (0,1].
// Strictly increasing in u; x >= a always. The CDF of the result is
// F(x) = 1 - (a/x)^(n-1). n = 3 gives the familiar a/sqrt(1-u) form.
double power_law_sample(const PowerLawParams& params, double u);

double power_law_pdf(const PowerLawParams& params, double x);
double power_law_cdf(const PowerLawParams& params, double x);

// count i.i.d. samples; deterministic per seed.
std::vector<double> generate_traffic_series(const PowerLawParams& params,
                                            std::size_t count, std::uint64_t seed);
std::vector<double> generate_traffic_series(const PowerLawParams& params,
                                            std::size_t count, RngStream& stream);

} // namespace p2pbw
