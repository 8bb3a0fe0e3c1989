#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "p2pbw/ou_process.hpp"
#include "p2pbw/traffic_model.hpp"
#include "p2pbw/trace.hpp"

namespace p2pbw {

// Full individual-bandwidth model instance: heavy-tailed traffic marginal
// integrated against increments of a zero-mean OU path.
//
// kprime is the model constant K' of the closed-form moment expressions;
// it never enters the generator. epsilon is the Hurst slack: when the
// single-index configuration (n0 = n1 = traffic.n) puts H = (4-n)/2 in
// (1/2,1), epsilon must keep H + epsilon inside that interval.
struct BandwidthSpec {
    PowerLawParams traffic;
    OuParams ou;          // mu must be 0
    Grid grid;
    double kprime = 0.0;
    double epsilon = 0.0;

    void validate() const;
};

// Superposition of individual bandwidth processes on one shared grid.
struct AggregateSpec {
    std::vector<BandwidthSpec> components;

    void validate() const;
};

// One independent bandwidth process per named service (audio, video, ...).
struct MultiserviceSpec {
    std::vector<std::pair<std::string, BandwidthSpec>> services;

    void validate() const;
};

// Per-step increments bw_i = |B_i * (S_{i+1} - S_i)| where B_i is a fresh
// traffic sample and S one OU path over the grid. All values >= 0;
// deterministic per seed. The traffic cutoff scales the output linearly:
// scaling a by c scales every value by exactly c.
Trace synthesize_bandwidth(const BandwidthSpec& spec, std::uint64_t seed);

// Same draws, with the two driving factors exposed:
// bandwidth.values[i] == |traffic[i] * (ou_path.values[i+1] - ou_path.values[i])|.
struct BandwidthFactors {
    Trace ou_path;               // grid.count + 1 samples
    std::vector<double> traffic; // grid.count samples
    Trace bandwidth;
};

BandwidthFactors synthesize_bandwidth_factors(const BandwidthSpec& spec, std::uint64_t seed);

// Pointwise sum of the component traces, each synthesized with the child
// seed derive_child_seed(seed, index). Equals the sum of
// synthesize_bandwidth over components exactly.
Trace synthesize_aggregate(const AggregateSpec& spec, std::uint64_t seed);

// One independent trace per service, child-seeded by position.
std::vector<std::pair<std::string, Trace>>
synthesize_multiservice(const MultiserviceSpec& spec, std::uint64_t seed);

} // namespace p2pbw
