#pragma once

#include <cstdint>
#include <random>

namespace colav {

// Stream-splitting hash: maps (seed, purpose index) to an independent
// sub-seed so every random purpose gets its own generator.
std::uint64_t splitmix64(std::uint64_t x);

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t purpose) {
    return splitmix64(master + 0x9e3779b97f4a7c15ULL * (purpose + 1));
}

// Deterministic RNG. std::mt19937_64 output is pinned by the standard;
// the std:: distributions are not, so all variates are produced by
// hand-rolled transforms for cross-platform reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform();

    // Uniform in [lo, hi).
    double uniform(double lo, double hi);

    // Inverse-CDF exponential with the given rate (events per unit time).
    double exponential(double rate);

    // Box-Muller normal (second variate cached).
    double normal(double mean, double stddev);

    // Marsaglia-Tsang gamma with shape k and scale theta (mean k * theta).
    double gamma(double shape, double scale);

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace colav
