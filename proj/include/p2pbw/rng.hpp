#pragma once

#include <cstdint>
#include <random>

namespace p2pbw {

namespace detail {

// SplitMix64 finalizer. Used both for stream splitting and for seeding.
inline std::uint64_t splitmix64_step(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

} // namespace detail

// Quantile function of the standard normal (Wichura's AS241, double precision).
// p must lie strictly inside (0,1).
double inverse_normal_cdf(double p);

// Seedable, splittable pseudo-random stream.
//
// All output is fully determined by the seed: the engine is the
// standard-specified mt19937_64 and normal variates go through the
// inverse CDF (one uniform per normal), so identical seeds give
// identical streams on every platform.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    // Uniform draw strictly inside (0,1).
    double uniform01() {
        const std::uint64_t bits = engine_() >> 11; // top 53 bits
        return (static_cast<double>(bits) + 0.5) * (1.0 / 9007199254740992.0); // 2^53
    }

    // Standard normal variate.
    double normal() { return inverse_normal_cdf(uniform01()); }

    std::uint64_t next_u64() { return engine_(); }

    // Derive the seed of an independent child stream. Pure function of
    // (seed, index): splitting does not advance this stream.
    std::uint64_t child_seed(std::uint64_t index) const {
        return detail::splitmix64_step(detail::splitmix64_step(seed_) ^
                                       detail::splitmix64_step(index));
    }

    RngStream split(std::uint64_t index) const { return RngStream(child_seed(index)); }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

// Child-seed derivation without constructing a stream; synthesize_aggregate and
// synthesize_multiservice use this to hand each component an independent seed.
inline std::uint64_t derive_child_seed(std::uint64_t parent_seed, std::uint64_t index) {
    return detail::splitmix64_step(detail::splitmix64_step(parent_seed) ^
                                   detail::splitmix64_step(index));
}

} // namespace p2pbw
