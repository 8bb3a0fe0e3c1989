#pragma once

#include <stdexcept>
#include <string>

namespace p2pbw {

// Input data is structurally valid but carries no usable signal
// (e.g. an all-zero trace handed to an estimator).
class degenerate_data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Queue configuration violates the positive-service-margin requirement (m >= 1).
class unstable_queue_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Too few usable points for the requested statistic.
class insufficient_data_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The Hill-type index estimator degenerates when every sample sits on the cutoff.
class divergent_estimate_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file; the message names the file and line.
class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem failure (missing input, unwritable output).
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace p2pbw
