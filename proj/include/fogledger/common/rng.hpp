#pragma once

#include <cstdint>
#include <random>

namespace fogledger {

/// Seeded generator with distribution helpers defined here rather than by
/// the standard library, so sequences match across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }
    // Uniform in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : gen_() % n; }
    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    bool chance(double p) { return uniform() < p; }
    // Child generator for an independent stream.
    Rng fork(std::uint64_t salt) { return Rng(gen_() ^ (salt * 0x9e3779b97f4a7c15ULL)); }

private:
    std::mt19937_64 gen_;
};

}  // namespace fogledger
