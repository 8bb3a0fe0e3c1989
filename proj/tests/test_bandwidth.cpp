#include "doctest.h"

#include <cmath>
#include <vector>

#include "p2pbw/bandwidth.hpp"
#include "p2pbw/rng.hpp"

using namespace p2pbw;

namespace {

BandwidthSpec basic_spec() {
    BandwidthSpec spec;
    spec.traffic = {1.0, 2.5};
    spec.ou = {1.0, 0.0, 0.8, 0.0};
    spec.grid = {0.05, 400};
    spec.kprime = 0.0;
    spec.epsilon = 0.0;
    return spec;
}

} // namespace

TEST_SUITE("bandwidth") {

TEST_CASE("spec validation") {
    CHECK_NOTHROW(basic_spec().validate());

    auto drifted = basic_spec();
    drifted.ou.mu = 0.5; // the integrand must be zero-mean
    CHECK_THROWS_AS(drifted.validate(), std::invalid_argument);

    auto slack = basic_spec();
    slack.epsilon = -0.01;
    CHECK_THROWS_AS(slack.validate(), std::invalid_argument);

    // traffic.n = 2.5 puts H = 0.75; epsilon = 0.3 would push H past 1.
    auto overflow = basic_spec();
    overflow.epsilon = 0.3;
    CHECK_THROWS_AS(overflow.validate(), std::invalid_argument);

    auto bad_grid = basic_spec();
    bad_grid.grid = {0.0, 10};
    CHECK_THROWS_AS(bad_grid.validate(), std::invalid_argument);

    CHECK_THROWS_AS(AggregateSpec{}.validate(), std::invalid_argument);
}

TEST_CASE("trace shape, sign, and determinism") {
    const auto spec = basic_spec();
    const Trace a = synthesize_bandwidth(spec, 42);
    REQUIRE(a.size() == spec.grid.count);
    CHECK(a.dt == spec.grid.dt);
    for (double v : a.values)
        CHECK(v >= 0.0);

    const Trace b = synthesize_bandwidth(spec, 42);
    REQUIRE(a.values == b.values);
    const Trace c = synthesize_bandwidth(spec, 43);
    CHECK(a.values != c.values);
}

TEST_CASE("factors reconstruct the trace exactly") {
    const auto spec = basic_spec();
    const BandwidthFactors f = synthesize_bandwidth_factors(spec, 9);
    REQUIRE(f.ou_path.size() == spec.grid.count + 1);
    REQUIRE(f.traffic.size() == spec.grid.count);
    REQUIRE(f.bandwidth.size() == spec.grid.count);
    for (std::size_t i = 0; i < spec.grid.count; ++i) {
        const double want =
            std::fabs(f.traffic[i] * (f.ou_path.values[i + 1] - f.ou_path.values[i]));
        REQUIRE(f.bandwidth.values[i] == want);
        CHECK(f.traffic[i] >= spec.traffic.a);
    }
    // The plain synthesizer is the same draw sequence.
    const Trace direct = synthesize_bandwidth(spec, 9);
    REQUIRE(direct.values == f.bandwidth.values);
}

TEST_CASE("cutoff scales the output linearly") {
    const auto spec = basic_spec();
    auto doubled = spec;
    doubled.traffic.a = 2.0 * spec.traffic.a;
    const Trace base = synthesize_bandwidth(spec, 1234);
    const Trace twice = synthesize_bandwidth(doubled, 1234);
    REQUIRE(base.size() == twice.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(twice.values[i] == doctest::Approx(2.0 * base.values[i]).epsilon(1e-13));
}

TEST_CASE("aggregate equals the sum of child-seeded components") {
    AggregateSpec agg;
    agg.components.push_back(basic_spec());
    auto second = basic_spec();
    second.traffic.n = 3.2;
    second.ou.sigma = 0.4;
    agg.components.push_back(second);
    auto third = basic_spec();
    third.traffic.a = 0.5;
    agg.components.push_back(third);

    const std::uint64_t seed = 777;
    const Trace total = synthesize_aggregate(agg, seed);
    REQUIRE(total.size() == basic_spec().grid.count);

    std::vector<double> manual(total.size(), 0.0);
    for (std::size_t c = 0; c < agg.components.size(); ++c) {
        const Trace part = synthesize_bandwidth(agg.components[c], derive_child_seed(seed, c));
        for (std::size_t i = 0; i < manual.size(); ++i)
            manual[i] += part.values[i];
    }
    REQUIRE(total.values == manual);
}

TEST_CASE("aggregate rejects mismatched grids") {
    AggregateSpec agg;
    agg.components.push_back(basic_spec());
    auto other = basic_spec();
    other.grid.count = 399;
    agg.components.push_back(other);
    CHECK_THROWS_AS(agg.validate(), std::invalid_argument);
}

TEST_CASE("multiservice: named, independent, position-seeded") {
    MultiserviceSpec ms;
    ms.services.emplace_back("audio", basic_spec());
    auto video = basic_spec();
    video.traffic.n = 2.2;
    ms.services.emplace_back("video", video);

    const std::uint64_t seed = 2024;
    const auto out = synthesize_multiservice(ms, seed);
    REQUIRE(out.size() == 2);
    CHECK(out[0].first == "audio");
    CHECK(out[1].first == "video");
    // Each service is the plain synthesis under its positional child seed.
    const Trace audio = synthesize_bandwidth(ms.services[0].second, derive_child_seed(seed, 0));
    const Trace vid = synthesize_bandwidth(ms.services[1].second, derive_child_seed(seed, 1));
    REQUIRE(out[0].second.values == audio.values);
    REQUIRE(out[1].second.values == vid.values);
    CHECK(out[0].second.values != out[1].second.values);
}

TEST_CASE("components with the same spec still decorrelate") {
    AggregateSpec agg;
    agg.components.push_back(basic_spec());
    agg.components.push_back(basic_spec());
    const std::uint64_t seed = 31337;
    const Trace a = synthesize_bandwidth(agg.components[0], derive_child_seed(seed, 0));
    const Trace b = synthesize_bandwidth(agg.components[1], derive_child_seed(seed, 1));
    CHECK(a.values != b.values);
    // Crude correlation check across the two streams.
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a.values[i];
        mb += b.values[i];
    }
    ma /= static_cast<double>(a.size());
    mb /= static_cast<double>(b.size());
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a.values[i] - ma) * (b.values[i] - mb);
        va += (a.values[i] - ma) * (a.values[i] - ma);
        vb += (b.values[i] - mb) * (b.values[i] - mb);
    }
    CHECK(std::fabs(cov / std::sqrt(va * vb)) < 0.15);
}

} // TEST_SUITE
