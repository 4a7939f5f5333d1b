#ifndef THERMO_THETA_HPP
#define THERMO_THETA_HPP

#include <cmath>
#include <stdexcept>

#include "special.hpp"

namespace thermo {

enum class SeriesBranch { direct, resummed, automatic };

/**
 * Lattice partition function of the discrete-mean normal statistic,
 *   z(t; n) = sqrt(n/2pi) sum_{m in Z} exp(-n (t - m)^2 / 2),
 * equal by Poisson summation to the theta series
 *   1 + 2 sum_{k>=1} r^{k^2} cos(2 pi k t),  r = e^{-2 pi^2 / n}.
 * t is the sample mean in lattice units, n the inverse temperature N/sigma^2.
 */
inline double theta_statistic_partition(double tstat, double n,
                                        SeriesBranch mode = SeriesBranch::automatic)
{
    if (!(n > 0)) throw std::invalid_argument("theta_statistic_partition: n <= 0");
    if (mode == SeriesBranch::automatic) {
        mode = n >= 8 ? SeriesBranch::direct : SeriesBranch::resummed;
    }
    if (mode == SeriesBranch::direct) {
        double m0 = std::round(tstat);
        double sum = std::exp(-n * (tstat - m0) * (tstat - m0) / 2);
        for (long j = 1; j < 100000; ++j) {
            double a = tstat - (m0 + j), b = tstat - (m0 - j);
            double term = std::exp(-n * a * a / 2) + std::exp(-n * b * b / 2);
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return std::sqrt(n / (2 * pi)) * sum;
    }
    double r = std::exp(-2 * pi * pi / n);
    double sum = 1;
    for (long k = 1; k < 100000; ++k) {
        double term = 2 * std::pow(r, static_cast<double>(k) * k) *
                      std::cos(2 * pi * k * tstat);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) && k > 2) break;
    }
    return sum;
}

namespace detail {

// cross term A(n) = sum_k ((-1)^k / k) r^{k^2 + k} / (r^{2k} - 1), r = e^{-2pi^2/n};
// identical to -(1/2) sum_k ((-1)^k / k) e^{-2 pi^2 k^2 / n} / sinh(2 pi^2 k / n)
inline double theta_cross_term_convergent(double n)
{
    double r = std::exp(-2 * pi * pi / n);
    double s = 0;
    for (long k = 1; k < 100000; ++k) {
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        double term = (sign / k) *
                      std::pow(r, static_cast<double>(k) * k + k) /
                      (std::pow(r, 2.0 * k) - 1);
        s += term;
        if (std::abs(term) < 1e-18 * std::max(std::abs(s), 1e-300)) break;
    }
    return s;
}

inline double theta_cross_term_resummed(double n)
{
    double s = 0;
    for (long k = 1; k < 100000; ++k) {
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        double x = 2 * pi * pi * k / n;
        double term = -0.5 * (sign / k) *
                      std::exp(-2 * pi * pi * k * k / n) / std::sinh(x);
        s += term;
        if (std::abs(term) < 1e-18 * std::max(std::abs(s), 1e-300) && k > 2) break;
    }
    return s;
}

// Euler factor B(n) = sum_{m>=1} log(1 - q^m), q = e^{-4 pi^2 / n},
// via the Lambert series sum_k -(1/k) q^k / (1 - q^k)
inline double theta_euler_term_convergent(double n)
{
    double q = std::exp(-4 * pi * pi / n);
    double s = 0;
    for (long k = 1; k < 1000000; ++k) {
        double qk = std::pow(q, static_cast<double>(k));
        double term = -(1.0 / k) * qk / (1 - qk);
        s += term;
        if (std::abs(term) < 1e-18 * std::max(std::abs(s), 1e-300)) break;
    }
    return s;
}

// Dedekind-eta modular transform: B(n) = -n/24 + pi^2/(6n) + (1/2) log(n/2pi)
//                                        + sum_{m>=1} log(1 - e^{-n m})
inline double theta_euler_term_resummed(double n)
{
    double s = -n / 24 + pi * pi / (6 * n) + 0.5 * std::log(n / (2 * pi));
    for (long m = 1; m < 1000; ++m) {
        double term = std::log1p(-std::exp(-n * m));
        s += term;
        if (std::abs(term) < 1e-18) break;
    }
    return s;
}

} // namespace detail

/** cross term A(n) by the selected branch */
inline double theta_cross_term(double n, SeriesBranch mode = SeriesBranch::automatic)
{
    if (mode == SeriesBranch::automatic) {
        mode = n > 100 ? SeriesBranch::resummed : SeriesBranch::direct;
    }
    return mode == SeriesBranch::direct ? detail::theta_cross_term_convergent(n)
                                        : detail::theta_cross_term_resummed(n);
}

/** Euler factor B(n) by the selected branch */
inline double theta_euler_term(double n, SeriesBranch mode = SeriesBranch::automatic)
{
    if (mode == SeriesBranch::automatic) {
        mode = n > 100 ? SeriesBranch::resummed : SeriesBranch::direct;
    }
    return mode == SeriesBranch::direct ? detail::theta_euler_term_convergent(n)
                                        : detail::theta_euler_term_resummed(n);
}

/**
 * Leading rational asymptote of the cross term for n >> 1. The constant is
 * -1/4 (verified against the convergent series and against the n -> infinity
 * limit E(n) -> (1/2) log(n/2pi) - 1/2 of the full disorder average).
 */
inline double theta_cross_term_asymptote(double n)
{
    return n / 48 - 0.25 - pi * pi / (12 * n);
}

/**
 * Disorder-averaged log statistic partition per lattice dimension,
 *   E(n) = E_{t ~ N(m0, 1/n)}[log z(t; n)] = B(n) + 2 A(n).
 * Convergent branch: nome power series; resummed branch: eta transform plus
 * sinh-resummed cross term (the large-n route).
 */
inline double discrete_mean_expected_log_z(double n,
                                           SeriesBranch mode = SeriesBranch::automatic)
{
    if (!(n > 0)) throw std::invalid_argument("discrete_mean_expected_log_z: n <= 0");
    if (mode == SeriesBranch::automatic) {
        mode = n > 100 ? SeriesBranch::resummed : SeriesBranch::direct;
    }
    if (mode == SeriesBranch::direct) {
        return detail::theta_euler_term_convergent(n) +
               2 * detail::theta_cross_term_convergent(n);
    }
    return detail::theta_euler_term_resummed(n) +
           2 * detail::theta_cross_term_resummed(n);
}

/**
 * Learning capacity per lattice dimension of the discrete-mean normal,
 *   c(n) = 1/2 + n^2 E''(n),  n = N/sigma^2,
 * with E'' by Richardson-extrapolated central differences of the series.
 */
inline double discrete_mean_capacity_per_dim(double n)
{
    auto second = [&](double h) {
        return (discrete_mean_expected_log_z(n + h) -
                2 * discrete_mean_expected_log_z(n) +
                discrete_mean_expected_log_z(n - h)) / (h * h);
    };
    double h = std::max(1e-3, 0.02 * n);
    double d1 = second(h), d2 = second(h / 2);
    double dd = (4 * d2 - d1) / 3;
    return 0.5 + n * n * dd;
}

} // namespace thermo

#endif
