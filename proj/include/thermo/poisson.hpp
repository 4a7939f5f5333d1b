#ifndef THERMO_POISSON_HPP
#define THERMO_POISSON_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "quadrature.hpp"
#include "special.hpp"

namespace thermo {

enum class PoissonStrategy { directSum, resummed, recursion, automatic };

namespace detail {

// normalized Eulerian rows in log space: logB(k, j) = log(A(k, j) / k!)
inline const std::vector<double>& eulerian_log_row(long k)
{
    thread_local std::vector<std::vector<double>> rows = {{0.0}};
    while (static_cast<long>(rows.size()) <= k) {
        long kk = static_cast<long>(rows.size());
        const std::vector<double>& prev = rows.back();
        std::vector<double> row(static_cast<std::size_t>(kk == 1 ? 1 : kk), neg_inf);
        for (long j = 0; j < static_cast<long>(row.size()); ++j) {
            double a = neg_inf, b = neg_inf;
            if (j < static_cast<long>(prev.size())) {
                a = std::log(static_cast<double>(j + 1)) + prev[j];
            }
            if (j - 1 >= 0 && j - 1 < static_cast<long>(prev.size())) {
                b = std::log(static_cast<double>(kk - j)) + prev[j - 1];
            }
            row[j] = log_sum_exp(a, b) - std::log(static_cast<double>(kk));
        }
        rows.push_back(std::move(row));
    }
    return rows[static_cast<std::size_t>(k)];
}

inline double poisson_log_z_direct(long k, double t, double b,
                                   double* truncation_bound)
{
    double bt = b + t;
    double lgk = log_gamma(k + 1.0);
    auto log_term = [&](double m) {
        return -m * bt + k * std::log(m * t) - lgk;
    };
    long m_peak = std::max<long>(1, static_cast<long>(std::llround(k / bt)));
    LogAccumulator acc;
    double peak = log_term(static_cast<double>(m_peak));
    // descend both directions from the peak
    for (long m = m_peak; m >= 1; --m) {
        double lt = log_term(static_cast<double>(m));
        acc.add(lt);
        if (lt < peak - 46) break;
    }
    double last = peak;
    long m_end = m_peak;
    for (long m = m_peak + 1; ; ++m) {
        last = log_term(static_cast<double>(m));
        acc.add(last);
        m_end = m;
        if (last < peak - 46 && m > m_peak + 4) break;
    }
    if (truncation_bound) {
        // remaining tail is dominated by a geometric series with ratio
        // exp(log_term(m+1) - log_term(m)) < 1 past the peak
        double ratio = std::exp(log_term(static_cast<double>(m_end + 1)) - last);
        *truncation_bound = std::exp(last + std::log(ratio / (1 - ratio)) -
                                     acc.log_total());
    }
    return acc.log_total();
}

inline double poisson_log_z_recursion(long k, double t, double b)
{
    double bt = b + t;
    double log_x = -bt;
    if (k == 0) {
        // z(0; t) = x / (1 - x) = 1 / (e^{b+t} - 1)
        return log_x - std::log1p(-std::exp(log_x));
    }
    const std::vector<double>& row = eulerian_log_row(k);
    LogAccumulator acc;
    for (long j = 0; j < static_cast<long>(row.size()); ++j) {
        acc.add(row[j] + (j + 1) * log_x);
    }
    return k * std::log(t) + acc.log_total() -
           (k + 1) * std::log1p(-std::exp(log_x));
}

inline double poisson_log_z_resummed(long k, double t, double b,
                                     long terms = 20000)
{
    double bt = b + t;
    if ((k + 1) * std::log(bt) > 600) {
        throw DivergenceError("poisson resummed series underflows: (b+t)^-(k+1) "
                              "is not representable at this (k, t)");
    }
    double s = std::pow(bt, -(k + 1.0));
    double scale = s; // largest summand magnitude: the cancellation floor
    for (long nu = 1; nu <= terms; ++nu) {
        double w = 2 * pi * nu;
        double amp = std::pow(bt * bt + w * w, -(k + 1.0) / 2);
        s += 2 * amp * std::cos((k + 1.0) * std::atan(w / bt));
        scale = std::max(scale, 2 * amp);
    }
    if (k > 0) {
        // closed-form tail: 2 (bt)^{-(k+1)} (bt/2pi) int_{u0}^inf Re (1+iu)^{-(k+1)} du
        double u0 = 2 * pi * (terms + 0.5) / bt;
        std::complex<double> w(1.0, u0);
        double integral = -(std::complex<double>(0, 1) * std::pow(w, -static_cast<double>(k)) /
                            static_cast<double>(k)).real();
        s += 2 * std::pow(bt, -(k + 1.0)) * (bt / (2 * pi)) * integral;
    }
    double z = std::pow(t, static_cast<double>(k)) * s;
    if (k == 0) z -= 0.5; // half weight of the half-line sum at m = 0
    // the alternating Fourier sum cancels to ~ exp(-k log(t^2/k)/2) of its
    // leading amplitude; below ~1e-11 of it only roundoff survives
    if (!(z > 0) || s <= scale * 1e-11) {
        throw DivergenceError("poisson resummed series lost all precision "
                              "(outside its validity region k/t^2 > 0.1)");
    }
    return std::log(z);
}

} // namespace detail

/**
 * Statistic partition function of the Poisson stoichiometry model,
 *   z(k; t) = sum_{m>=1} e^{-m(b+t)} (m t)^k / k!,
 * returned as log z. b is the exponential prior regularizer (b = 0: flat).
 */
inline double poisson_log_z(long k, double t, double b = 0,
                            PoissonStrategy mode = PoissonStrategy::automatic,
                            double* truncation_bound = nullptr)
{
    if (k < 0 || !(t > 0) || b < 0) {
        throw std::invalid_argument("poisson_log_z: need k >= 0, t > 0, b >= 0");
    }
    if (truncation_bound) *truncation_bound = 0;
    if (mode == PoissonStrategy::automatic) {
        if (k <= 30) {
            mode = PoissonStrategy::recursion;
        } else if (k / (t * t) > 0.1 && (k + 1) * std::log(b + t) <= 600) {
            mode = PoissonStrategy::resummed;
        } else {
            // the log-space direct sum stays representable everywhere
            mode = PoissonStrategy::directSum;
        }
    }
    switch (mode) {
        case PoissonStrategy::directSum:
            return detail::poisson_log_z_direct(k, t, b, truncation_bound);
        case PoissonStrategy::recursion:
            if (k > 1000) {
                throw NotSupportedError("eulerian recursion limited to k <= 1000");
            }
            return detail::poisson_log_z_recursion(k, t, b);
        case PoissonStrategy::resummed:
            return detail::poisson_log_z_resummed(k, t, b);
        default:
            throw std::logic_error("unreachable");
    }
}

/** log z for a tabulated prior over m = 1..M: log sum_m w_m e^{-mt} (mt)^k / k! */
inline double poisson_log_z_grid(long k, double t,
                                 const std::vector<double>& log_w)
{
    double lgk = log_gamma(k + 1.0);
    LogAccumulator acc;
    for (std::size_t i = 0; i < log_w.size(); ++i) {
        double m = static_cast<double>(i + 1);
        acc.add(log_w[i] - m * t + k * std::log(m * t) - lgk);
    }
    return acc.log_total();
}

namespace detail {

struct KRange {
    long lo, hi;
};

inline KRange poisson_k_range(double mu)
{
    double half = 10 * std::sqrt(mu) + 10;
    long lo = std::max<long>(0, static_cast<long>(std::floor(mu - half)));
    long hi = static_cast<long>(std::ceil(mu + half));
    return {lo, hi};
}

} // namespace detail

/** entropy of Poisson(mu) by summation */
inline double poisson_count_entropy(double mu)
{
    auto [lo, hi] = detail::poisson_k_range(mu);
    double s = 0;
    for (long k = lo; k <= hi; ++k) {
        double lp = -mu + k * std::log(mu) - log_gamma(k + 1.0);
        s -= std::exp(lp) * lp;
    }
    return s;
}

/** E_{k ~ Poisson(m0 t)}[log z(k; t)] under the e^{-bm} (or flat) prior */
inline double poisson_expected_log_z(double t, double m0, double b = 0)
{
    double mu = m0 * t;
    auto [lo, hi] = detail::poisson_k_range(mu);
    double s = 0;
    for (long k = lo; k <= hi; ++k) {
        double lp = -mu + k * std::log(mu) - log_gamma(k + 1.0);
        s += std::exp(lp) * poisson_log_z(k, t, b);
    }
    return s;
}

/** same expectation with a tabulated prior over m */
inline double poisson_expected_log_z_grid(double t, double m0,
                                          const std::vector<double>& log_w)
{
    double mu = m0 * t;
    auto [lo, hi] = detail::poisson_k_range(mu);
    double s = 0;
    for (long k = lo; k <= hi; ++k) {
        double lp = -mu + k * std::log(mu) - log_gamma(k + 1.0);
        s += std::exp(lp) * poisson_log_z_grid(k, t, log_w);
    }
    return s;
}

/**
 * Learning capacity of the stoichiometry model,
 *   C(t) = t^2 d^2/dt^2 [E(t) + H_k(t)],
 * Richardson-extrapolated central differences.
 */
inline double poisson_capacity(double t, double m0, double b = 0)
{
    auto f = [&](double tt) {
        return poisson_expected_log_z(tt, m0, b) + poisson_count_entropy(m0 * tt);
    };
    auto second = [&](double h) {
        return (f(t + h) - 2 * f(t) + f(t - h)) / (h * h);
    };
    double h = 0.02 * t;
    double d1 = second(h), d2 = second(h / 2);
    return t * t * (4 * d2 - d1) / 3;
}

/**
 * Gibbs entropy S(m0; t) = t g'(t) - g(t) with g = -E - H_k, the continuous-t
 * form of the forward difference N Gbar(N+1) - (N+1) Gbar(N).
 */
inline double poisson_sbar_grid(double m0, double t,
                                const std::vector<double>& log_w)
{
    auto g = [&](double tt) {
        return -poisson_expected_log_z_grid(tt, m0, log_w) -
               poisson_count_entropy(m0 * tt);
    };
    double h = 0.01 * t;
    double gp = (g(t + h) - g(t - h)) / (2 * h);
    double gp2 = (g(t + h / 2) - g(t - h / 2)) / h;
    return t * (4 * gp2 - gp) / 3 - g(t);
}

/** posterior over m given a count k, tabulated prior */
inline std::vector<double> poisson_posterior(long k, double t,
                                             const std::vector<double>& log_w)
{
    std::vector<double> lp(log_w.size());
    double lgk = log_gamma(k + 1.0);
    for (std::size_t i = 0; i < log_w.size(); ++i) {
        double m = static_cast<double>(i + 1);
        lp[i] = log_w[i] - m * t + k * std::log(m * t) - lgk;
    }
    double norm = log_sum_exp(lp);
    std::vector<double> p(lp.size());
    for (std::size_t i = 0; i < lp.size(); ++i) p[i] = std::exp(lp[i] - norm);
    return p;
}

} // namespace thermo

#endif
