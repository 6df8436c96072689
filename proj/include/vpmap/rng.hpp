#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace vpmap {

// Deterministic random source. The engine (mt19937_64) and the uniform and
// normal transforms below are fully specified, so a (seed, stream) pair
// reproduces the same sequence on any platform. Discrete draws (binomial,
// poisson) go through the standard library distributions, which are
// deterministic for a given standard library.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) {
        std::seed_seq seq{seed, stream, std::uint64_t{0x9e3779b97f4a7c15ULL}};
        engine_.seed(seq);
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform01_open0() { return 1.0 - uniform01(); }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Standard normal via Box-Muller; the spare value is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01_open0();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    long long binomial(long long trials, double p) {
        std::binomial_distribution<long long> dist(trials, p);
        return dist(engine_);
    }

    long long poisson(double mean) {
        std::poisson_distribution<long long> dist(mean);
        return dist(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace vpmap
