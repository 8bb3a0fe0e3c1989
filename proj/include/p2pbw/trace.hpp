#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2pbw {

// Uniform sampling grid: step size and number of steps.
struct Grid {
    double dt = 0.0;
    std::size_t count = 0;

    void validate() const {
        if (!(std::isfinite(dt) && dt > 0.0))
            throw std::invalid_argument("Grid: dt must be finite and > 0");
        if (count < 1)
            throw std::invalid_argument("Grid: count must be >= 1");
    }

    double horizon() const { return dt * static_cast<double>(count); }

    bool operator==(const Grid&) const = default;
};

// Uniformly sampled time series. Carrier for peer paths, bandwidth and
// queue occupancy.
struct Trace {
    double dt = 0.0;
    std::vector<double> values;

    Trace() = default;
    Trace(double step, std::vector<double> v) : dt(step), values(std::move(v)) {}

    std::size_t size() const { return values.size(); }

    void validate() const {
        if (!(std::isfinite(dt) && dt > 0.0))
            throw std::invalid_argument("Trace: dt must be finite and > 0");
        if (values.empty())
            throw std::invalid_argument("Trace: must hold at least one sample");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!std::isfinite(values[i]))
                throw std::invalid_argument("Trace: non-finite sample at index " +
                                            std::to_string(i));
        }
    }
};

} // namespace p2pbw
