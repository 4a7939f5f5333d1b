#ifndef THERMO_SPECIAL_HPP
#define THERMO_SPECIAL_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace thermo {

constexpr double pi = 3.141592653589793238462643383279502884;
constexpr double log_2pi = 1.837877066409345483560659472811235279;

namespace detail {

// Bernoulli numbers B_2 .. B_14
constexpr double bern2k[7] = {
    1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0};

} // namespace detail

/** log Gamma(x) for x > 0, Lanczos approximation (g = 7, 9 terms). */
inline double log_gamma(double x)
{
    static const double c[9] = {
        0.99999999999980993, 676.5203681218851, -1259.1392167224028,
        771.32342877765313, -176.61502916214059, 12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return std::log(pi / std::sin(pi * x)) - log_gamma(1 - x);
    }
    double z = x - 1;
    double sum = c[0];
    for (int i = 1; i < 9; ++i) {
        sum += c[i] / (z + i);
    }
    double t = z + 7.5;
    return 0.5 * log_2pi + (z + 0.5) * std::log(t) - t + std::log(sum);
}

/** digamma psi(x), x > 0 */
inline double digamma(double x)
{
    double result = 0;
    while (x < 10) {
        result -= 1 / x;
        x += 1;
    }
    double inv = 1 / x, inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv;
    double p = inv2;
    for (int k = 0; k < 7; ++k) {
        result -= detail::bern2k[k] / (2 * (k + 1)) * p;
        p *= inv2;
    }
    return result;
}

/** trigamma psi'(x), x > 0 */
inline double trigamma(double x)
{
    double result = 0;
    while (x < 10) {
        result += 1 / (x * x);
        x += 1;
    }
    double inv = 1 / x, inv2 = inv * inv;
    result += inv + 0.5 * inv2;
    double p = inv * inv2;
    for (int k = 0; k < 7; ++k) {
        result += detail::bern2k[k] * p;
        p *= inv2;
    }
    return result;
}

/** psi''(x), x > 0 */
inline double polygamma2(double x)
{
    double result = 0;
    while (x < 10) {
        result -= 2 / (x * x * x);
        x += 1;
    }
    double inv = 1 / x, inv2 = inv * inv;
    result += -inv2 - inv * inv2;
    double p = inv2 * inv2;
    for (int k = 0; k < 7; ++k) {
        result -= (2 * k + 3) * detail::bern2k[k] * p;
        p *= inv2;
    }
    return result;
}

/**
 * Binet's function J(x) = log Gamma(x) - (x - 1/2) log x + x - (1/2) log 2pi.
 * Evaluated by its Stirling series for large x; stable where the naive
 * difference of large terms cancels catastrophically.
 */
inline double binet(double x)
{
    double result = 0;
    while (x < 8) {
        // J(x) = J(x+1) + (x + 1/2) log(1 + 1/x) - 1
        result += (x + 0.5) * std::log1p(1 / x) - 1;
        x += 1;
    }
    double inv = 1 / x, inv2 = inv * inv;
    double p = inv;
    for (int k = 0; k < 7; ++k) {
        int two_k = 2 * (k + 1);
        result += detail::bern2k[k] / (two_k * (two_k - 1)) * p;
        p *= inv2;
    }
    return result;
}

inline double log_sum_exp(double a, double b)
{
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double m = a > b ? a : b;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double log_sum_exp(const std::vector<double>& v)
{
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (m == -std::numeric_limits<double>::infinity()) return m;
    double s = 0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

/** log(e^a - e^b), requires a >= b */
inline double log_diff_exp(double a, double b)
{
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(-std::exp(b - a));
}

} // namespace thermo

#endif
