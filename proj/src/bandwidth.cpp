#include "p2pbw/bandwidth.hpp"

#include <cmath>
#include <stdexcept>

namespace p2pbw {

void BandwidthSpec::validate() const {
    traffic.validate();
    ou.validate();
    grid.validate();
    if (ou.mu != 0.0)
        throw std::invalid_argument("BandwidthSpec: the bandwidth model requires a zero-mean "
                                    "OU process (ou.mu must be 0)");
    if (!(std::isfinite(kprime)))
        throw std::invalid_argument("BandwidthSpec: kprime must be finite");
    if (!(std::isfinite(epsilon) && epsilon >= 0.0 && epsilon < 0.25))
        throw std::invalid_argument("BandwidthSpec: epsilon must lie in [0, 0.25)");
    // Single-index Hurst link H = (4 - n)/2; the slack must keep H + epsilon
    // inside (1/2, 1).
    if (traffic.n > 2.0 && traffic.n < 3.0) {
        const double hurst = (4.0 - traffic.n) / 2.0;
        const double bound = hurst < 1.0 - hurst ? hurst : 1.0 - hurst;
        if (!(epsilon < bound))
            throw std::invalid_argument("BandwidthSpec: epsilon must be < min(H, 1-H) so "
                                        "that H + epsilon stays in (1/2, 1)");
    }
}

void AggregateSpec::validate() const {
    if (components.empty())
        throw std::invalid_argument("AggregateSpec: at least one component required");
    for (const auto& c : components)
        c.validate();
    const Grid& g = components.front().grid;
    for (const auto& c : components) {
        if (!(c.grid == g))
            throw std::invalid_argument("AggregateSpec: all components must share one grid");
    }
}

void MultiserviceSpec::validate() const {
    if (services.empty())
        throw std::invalid_argument("MultiserviceSpec: at least one service required");
    for (const auto& [name, spec] : services) {
        if (name.empty())
            throw std::invalid_argument("MultiserviceSpec: service names must be non-empty");
        spec.validate();
    }
    const Grid& g = services.front().second.grid;
    for (const auto& [name, spec] : services) {
        (void)name;
        if (!(spec.grid == g))
            throw std::invalid_argument("MultiserviceSpec: all services must share one grid");
    }
}

BandwidthFactors synthesize_bandwidth_factors(const BandwidthSpec& spec, std::uint64_t seed) {
    spec.validate();

    RngStream root(seed);
    RngStream ou_stream = root.split(0);
    RngStream traffic_stream = root.split(1);

    BandwidthFactors out;
    out.ou_path = ou_generate_path(spec.ou, spec.grid, ou_stream);
    out.traffic = generate_traffic_series(spec.traffic, spec.grid.count, traffic_stream);

    std::vector<double> values;
    values.reserve(spec.grid.count);
    for (std::size_t i = 0; i < spec.grid.count; ++i) {
        const double ds = out.ou_path.values[i + 1] - out.ou_path.values[i];
        values.push_back(std::fabs(out.traffic[i] * ds));
    }
    out.bandwidth = Trace(spec.grid.dt, std::move(values));
    return out;
}

Trace synthesize_bandwidth(const BandwidthSpec& spec, std::uint64_t seed) {
    return synthesize_bandwidth_factors(spec, seed).bandwidth;
}

Trace synthesize_aggregate(const AggregateSpec& spec, std::uint64_t seed) {
    spec.validate();

    const Grid& grid = spec.components.front().grid;
    std::vector<double> sum(grid.count, 0.0);
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        const Trace t = synthesize_bandwidth(spec.components[i], derive_child_seed(seed, i));
        for (std::size_t j = 0; j < sum.size(); ++j)
            sum[j] += t.values[j];
    }
    return Trace(grid.dt, std::move(sum));
}

std::vector<std::pair<std::string, Trace>>
synthesize_multiservice(const MultiserviceSpec& spec, std::uint64_t seed) {
    spec.validate();

    std::vector<std::pair<std::string, Trace>> out;
    out.reserve(spec.services.size());
    for (std::size_t i = 0; i < spec.services.size(); ++i) {
        out.emplace_back(spec.services[i].first,
                         synthesize_bandwidth(spec.services[i].second,
                                              derive_child_seed(seed, i)));
    }
    return out;
}

} // namespace p2pbw
