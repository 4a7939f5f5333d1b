#ifndef THERMO_RNG_HPP
#define THERMO_RNG_HPP

#include <cmath>
#include <cstdint>

#include "special.hpp"

namespace thermo {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/** Derive an independent stream seed from (master, replicate, stream). */
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate,
                                 std::uint64_t stream)
{
    return splitmix64(splitmix64(splitmix64(master) ^ replicate) ^
                      (stream * 0x9e3779b97f4a7c15ULL + 1));
}

/**
 * xoshiro256++ with explicit variate transforms, so streams are identical
 * across standard libraries and thread schedules.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed)
    {
        std::uint64_t x = seed;
        for (auto& si : s_) {
            x = splitmix64(x);
            si = x;
        }
        has_cached_normal_ = false;
    }

    std::uint64_t next_u64()
    {
        auto rotl = [](std::uint64_t v, int k) {
            return (v << k) | (v >> (64 - k));
        };
        std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /** uniform in (0, 1) */
    double uniform()
    {
        return ((next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double normal()
    {
        if (has_cached_normal_) {
            has_cached_normal_ = false;
            return cached_normal_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2 * std::log(u1));
        cached_normal_ = r * std::sin(2 * pi * u2);
        has_cached_normal_ = true;
        return r * std::cos(2 * pi * u2);
    }

    double exponential() { return -std::log(uniform()); }

    /** Gamma(shape, scale 1), Marsaglia-Tsang. */
    double gamma(double shape)
    {
        if (shape < 1) {
            return gamma(shape + 1) * std::pow(uniform(), 1 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1 / std::sqrt(9 * d);
        for (;;) {
            double x = normal();
            double v = 1 + c * x;
            if (v <= 0) continue;
            v = v * v * v;
            double u = uniform();
            if (u < 1 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1 - v + std::log(v))) return d * v;
        }
    }

    double chi_squared(double df) { return 2 * gamma(df / 2); }

    /** Poisson(mean), inversion for small mean, PTRS-like rejection via gamma
     *  split for large mean. */
    long poisson(double mean)
    {
        long count = 0;
        // reduce large means through the gamma-interarrival identity
        while (mean > 30) {
            long m = static_cast<long>(std::floor(mean * 7.0 / 8.0));
            double g = gamma(static_cast<double>(m));
            if (g < mean) {
                count += m;
                mean -= g;
            } else {
                // remaining count is Binomial(m - 1, mean / g)
                double p = mean / g;
                for (long i = 0; i < m - 1; ++i) {
                    if (uniform() < p) ++count;
                }
                return count;
            }
        }
        double limit = std::exp(-mean), prod = uniform();
        while (prod > limit) {
            ++count;
            prod *= uniform();
        }
        return count;
    }

private:
    std::uint64_t s_[4];
    double cached_normal_;
    bool has_cached_normal_;
};

} // namespace thermo

#endif
