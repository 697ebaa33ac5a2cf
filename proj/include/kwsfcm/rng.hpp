#ifndef KWSFCM_RNG_HPP
#define KWSFCM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace kwsfcm {

namespace detail {

// splitmix64 finalizer; full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Counter-based random stream: the n-th draw is a pure function of
/// (seed, stream, n), so per-pixel streams produce identical values no
/// matter how work is scheduled across threads.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : base_(detail::mix64(seed ^ detail::mix64(stream ^ 0xA0761D6478BD642Full))) {}

    std::uint64_t next_u64() { return detail::mix64(base_ + (counter_++) * 0x9E3779B97F4A7C15ull); }

    /// Uniform in [0, 1).
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1]; safe as a log argument.
    double next_uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double next_normal() {
        const double u1 = next_uniform_pos();
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Poisson draw; Knuth multiplication below lambda=10, Hormann's PTRS
    /// transformed rejection above.
    long next_poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        if (lambda < 10.0) {
            const double limit = std::exp(-lambda);
            long k = 0;
            double prod = next_uniform();
            while (prod > limit) {
                ++k;
                prod *= next_uniform();
            }
            return k;
        }
        const double slam = std::sqrt(lambda);
        const double loglam = std::log(lambda);
        const double b = 0.931 + 2.53 * slam;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        for (;;) {
            const double u = next_uniform() - 0.5;
            const double v = next_uniform_pos();
            const double us = 0.5 - std::abs(u);
            const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                kf * loglam - lambda - std::lgamma(kf + 1.0))
                return static_cast<long>(kf);
        }
    }

private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

}  // namespace kwsfcm

#endif
