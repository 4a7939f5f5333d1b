#ifndef THERMO_QUADRATURE_HPP
#define THERMO_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "special.hpp"
#include "types.hpp"

namespace thermo {

/** Streaming log-sum-exp accumulator. */
class LogAccumulator {
public:
    void add(double log_term)
    {
        if (log_term == neg_inf) return;
        if (log_term <= max_) {
            sum_ += std::exp(log_term - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - log_term) + 1;
            max_ = log_term;
        }
    }

    void add_scaled(double log_term, double factor)
    {
        if (factor > 0) add(log_term + std::log(factor));
    }

    double log_total() const
    {
        return sum_ > 0 ? max_ + std::log(sum_) : neg_inf;
    }

private:
    double max_ = neg_inf;
    double sum_ = 0;
};

struct GaussRule {
    std::vector<double> nodes;   // on (-1, 1)
    std::vector<double> weights;
};

/** Gauss-Legendre nodes and weights by Newton iteration. */
inline GaussRule gauss_legendre(int n)
{
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = 0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
            }
            pp = n * (x * p0 - p1) / (x * x - 1);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = rule.weights[n - 1 - i] = 2 / ((1 - x * x) * pp * pp);
    }
    return rule;
}

/** Map a Gauss rule to [a, b]. */
inline GaussRule gauss_legendre(int n, double a, double b)
{
    GaussRule rule = gauss_legendre(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[i];
        rule.weights[i] *= 0.5 * (b - a);
    }
    return rule;
}

/** log of the trapezoid integral of e^{f} over an increasing grid. */
inline double log_trapezoid(const std::vector<double>& x,
                            const std::vector<double>& log_f)
{
    LogAccumulator acc;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double w = 0;
        if (i > 0) w += 0.5 * (x[i] - x[i - 1]);
        if (i + 1 < x.size()) w += 0.5 * (x[i + 1] - x[i]);
        acc.add_scaled(log_f[i], w);
    }
    return acc.log_total();
}

struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const { return lo.size(); }
};

namespace detail {

inline double log_tensor_trapezoid(
    const std::function<double(const std::vector<double>&)>& log_f,
    const Box& box, int n_per_dim)
{
    std::size_t d = box.dim();
    std::vector<double> point(d);
    std::vector<int> idx(d, 0);
    LogAccumulator acc;
    for (;;) {
        double log_w = 0;
        for (std::size_t k = 0; k < d; ++k) {
            double h = (box.hi[k] - box.lo[k]) / (n_per_dim - 1);
            point[k] = box.lo[k] + idx[k] * h;
            double w = (idx[k] == 0 || idx[k] == n_per_dim - 1) ? 0.5 * h : h;
            log_w += std::log(w);
        }
        acc.add(log_f(point) + log_w);
        std::size_t k = 0;
        while (k < d && ++idx[k] == n_per_dim) {
            idx[k] = 0;
            ++k;
        }
        if (k == d) break;
    }
    return acc.log_total();
}

} // namespace detail

/**
 * Adaptive tensor-product trapezoid integration of e^{log_f} over a box,
 * log-space accumulation, error estimated by grid halving.
 */
inline EvidenceEstimate integrate_log(
    const std::function<double(const std::vector<double>&)>& log_f,
    const Box& box, double tol = 1e-9, int n0 = 33, int max_n = 4097)
{
    double prev = detail::log_tensor_trapezoid(log_f, box, n0);
    double err = pos_inf;
    for (int n = 2 * (n0 - 1) + 1; n <= max_n; n = 2 * (n - 1) + 1) {
        double cur = detail::log_tensor_trapezoid(log_f, box, n);
        err = std::abs(cur - prev);
        prev = cur;
        if (err < tol) break;
    }
    return {prev, EvidenceMethod::quadrature, err};
}

/**
 * Shrink an integration box to where the integrand carries mass: coarse scan,
 * keep the region above max - 46 (tail mass below 1e-10 of the peak cell),
 * one-cell margin.
 */
inline Box shrink_box(
    const std::function<double(const std::vector<double>&)>& log_f,
    const Box& box, int scan_n = 101)
{
    std::size_t d = box.dim();
    std::vector<std::vector<double>> profile(d,
        std::vector<double>(scan_n, neg_inf));
    std::vector<double> point(d);
    std::vector<int> idx(d, 0);
    for (;;) {
        for (std::size_t k = 0; k < d; ++k) {
            point[k] = box.lo[k] +
                       idx[k] * (box.hi[k] - box.lo[k]) / (scan_n - 1);
        }
        double v = log_f(point);
        for (std::size_t k = 0; k < d; ++k) {
            profile[k][idx[k]] = std::max(profile[k][idx[k]], v);
        }
        std::size_t k = 0;
        while (k < d && ++idx[k] == scan_n) {
            idx[k] = 0;
            ++k;
        }
        if (k == d) break;
    }
    Box out = box;
    for (std::size_t k = 0; k < d; ++k) {
        double peak = neg_inf;
        for (double v : profile[k]) peak = std::max(peak, v);
        int lo = 0, hi = scan_n - 1;
        while (lo < scan_n - 1 && profile[k][lo + 1] < peak - 46) ++lo;
        while (hi > 0 && profile[k][hi - 1] < peak - 46) --hi;
        double h = (box.hi[k] - box.lo[k]) / (scan_n - 1);
        out.lo[k] = box.lo[k] + lo * h;
        out.hi[k] = box.lo[k] + hi * h;
    }
    return out;
}

} // namespace thermo

#endif
