#ifndef THERMO_GPI_HPP
#define THERMO_GPI_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "core.hpp"
#include "models.hpp"
#include "oracles.hpp"

namespace thermo {

/** scaled-Jeffreys density rho(theta; N) = (N/2pi)^{K/2} sqrt(det I) */
inline double scaled_jeffreys(const ZooModel& zoo, const ParamPoint& theta,
                              double N)
{
    std::vector<double> fi = fisher_information(zoo, theta);
    std::size_t k = theta.continuous.size();
    double det = det_small(fi, k);
    if (!(det > 0)) throw NotDefinedError("singular Fisher information");
    return std::pow(N / (2 * pi), k / 2.0) * std::sqrt(det);
}

/** large-N GPI density rho e^{-K}, K = dim Theta */
inline double gpi_asymptotic(const ZooModel& zoo, const ParamPoint& theta,
                             double N)
{
    std::size_t k = theta.continuous.size();
    if (k == 0) return 1.0;
    return scaled_jeffreys(zoo, theta, N) * std::exp(-static_cast<double>(k));
}

struct GpiPrior {
    std::string base;
    long N = 0;
    double log_c = 0; // normalization of the symmetry-fixed shape
    std::function<double(const ParamPoint&)> log_density;
    // tabulated solution (recursive solver)
    std::vector<double> grid_theta;
    std::vector<double> log_w;
    std::vector<double> convergence_trace; // max |Sbar| per iteration
    double max_abs_s = 0;
    bool early_stopped = false;
};

enum class GpiKind { NormalMeanFlat, NormalMeanVar, Exponential, UniformSupport };

/**
 * Closed-form GPI prior: symmetry-fixed shape (sigma^{-D}, sigma^{-(D+1)},
 * lambda^{-1}, L^{-1}) with log c from the forward-difference entropy
 * condition (N+1) logZbar(N) = N logZbar(N+1).
 */
inline GpiPrior gpi_exact_symmetric(GpiKind kind, long N, long D = 1,
                                    double sigma = 1)
{
    GpiPrior out;
    out.N = N;
    double Nd = static_cast<double>(N);
    switch (kind) {
        case GpiKind::NormalMeanFlat: {
            out.base = "normal-meanflat";
            out.log_c = (D / 2.0) * std::log(Nd / (2 * pi * sigma * sigma)) -
                        effective_complexity_meanflat(Nd, D);
            double lc = out.log_c;
            out.log_density = [lc](const ParamPoint&) { return lc; };
            return out;
        }
        case GpiKind::NormalMeanVar: {
            out.base = "normal-meanvar";
            if (N < 2) {
                throw DivergenceError("mean+variance GPI prior improper at N = 1 "
                                      "(infinite effective complexity)");
            }
            out.log_c = meanvar_gpi_log_c(Nd, D);
            double lc = out.log_c;
            long DD = D;
            out.log_density = [lc, DD](const ParamPoint& th) {
                double sig = th.continuous[static_cast<std::size_t>(DD)];
                if (!(sig > 0)) return neg_inf;
                return lc - (DD + 1) * std::log(sig);
            };
            return out;
        }
        case GpiKind::Exponential: {
            out.base = "exponential";
            out.log_c = 0.5 * std::log(Nd / (2 * pi)) -
                        effective_complexity_exponential(Nd);
            double lc = out.log_c;
            out.log_density = [lc](const ParamPoint& th) {
                double lam = th.continuous[0];
                if (!(lam > 0)) return neg_inf;
                return lc - std::log(lam);
            };
            return out;
        }
        case GpiKind::UniformSupport: {
            out.base = "uniform";
            out.log_c = uniform_gpi_log_c(Nd);
            double lc = out.log_c;
            out.log_density = [lc](const ParamPoint& th) {
                double L = th.continuous[0];
                if (!(L > 0)) return neg_inf;
                return lc - std::log(L);
            };
            return out;
        }
    }
    throw std::logic_error("unreachable");
}

/**
 * Recursive entropy flattening on a tabulated prior:
 *   w <- w exp(-damping Sbar(theta; w, N))
 * sbar evaluates the forward-difference entropy at every grid point.
 * Stops at max|Sbar| < stop_tol, at max_iter, or after three iterations
 * without trace improvement (with damping halved on each regression).
 */
inline GpiPrior gpi_recursive(
    const std::function<std::vector<double>(const std::vector<double>&,
                                            const std::vector<double>&, long)>& sbar,
    const std::vector<double>& grid_theta, const std::vector<double>& log_w0,
    long N, int max_iter = 50, double stop_tol = 1e-3, double damping = 1.0)
{
    GpiPrior out;
    out.base = "recursive";
    out.N = N;
    out.grid_theta = grid_theta;
    out.log_w = log_w0;
    double best = pos_inf;
    int since_improvement = 0;
    for (int it = 0; it < max_iter; ++it) {
        std::vector<double> s = sbar(out.grid_theta, out.log_w, N);
        double worst = 0;
        for (double v : s) worst = std::max(worst, std::abs(v));
        out.convergence_trace.push_back(worst);
        out.max_abs_s = worst;
        if (worst < stop_tol) return out;
        if (worst < best - 1e-12) {
            best = worst;
            since_improvement = 0;
        } else {
            ++since_improvement;
            damping /= 2;
            if (since_improvement >= 3) {
                out.early_stopped = true;
                return out;
            }
        }
        for (std::size_t i = 0; i < out.log_w.size(); ++i) {
            out.log_w[i] -= damping * s[i];
        }
    }
    // report the residual under the final prior
    std::vector<double> s = sbar(out.grid_theta, out.log_w, N);
    double worst = 0;
    for (double v : s) worst = std::max(worst, std::abs(v));
    out.convergence_trace.push_back(worst);
    out.max_abs_s = worst;
    out.early_stopped = worst >= stop_tol;
    return out;
}

/** two-branch prior on a discrete manifold (lattice spacing vs resolution) */
struct DiscreteLimitPrior {
    PriorSpec prior;
    std::vector<bool> continuum_branch; // per discrete coordinate
    bool mixed = false;
};

inline DiscreteLimitPrior gpi_discrete_limits(const ZooModel& zoo,
                                              const ParamPoint& theta0, long N)
{
    if (zoo.model.param_space.discrete.empty()) {
        throw NotSupportedError("gpi_discrete_limits needs discrete parameters");
    }
    if (zoo.id != ZooId::NormalDiscreteMean) {
        throw NotSupportedError("continuum-limit Fisher information unavailable");
    }
    double sigma = zoo.sigma;
    double delta_res = sigma / std::sqrt(static_cast<double>(N));
    DiscreteLimitPrior out;
    double log_w_cont = 0;
    for (const DiscreteDim& dim : zoo.model.param_space.discrete) {
        bool continuum = dim.spacing < delta_res; // crossover at spacing = resolution
        out.continuum_branch.push_back(continuum);
        if (continuum) {
            // rho e^{-K} Delta per coordinate, continuum-limit FIM sigma^{-2}
            log_w_cont += 0.5 * std::log(static_cast<double>(N) /
                                         (2 * pi * sigma * sigma)) -
                          1 + std::log(dim.spacing);
        }
    }
    bool any_cont = false, any_frozen = false;
    for (bool b : out.continuum_branch) (b ? any_cont : any_frozen) = true;
    out.mixed = any_cont && any_frozen;
    double lw = log_w_cont;
    out.prior.log_density = [lw](const ParamPoint&) { return lw; };
    out.prior.sample_size_tag = N;
    (void)theta0;
    return out;
}

struct ModelCount {
    double M = 0;
    bool divergent = false;
    Box region;
};

/**
 * Number of distinguishable distributions M = int_region w dtheta; divergence
 * probed by doubling the window until growth stops or persists.
 */
inline ModelCount count_models(const std::function<double(const ParamPoint&)>& log_w,
                               const Box& region, bool probe_divergence = false)
{
    auto integrate = [&](const Box& box) {
        auto f = [&](const std::vector<double>& point) {
            ParamPoint th;
            th.continuous = point;
            return log_w(th);
        };
        return std::exp(integrate_log(f, box, 1e-10, 65).log_z);
    };
    ModelCount out;
    out.region = region;
    out.M = integrate(region);
    if (probe_divergence) {
        Box box = region;
        double prev = out.M;
        int growing = 0;
        for (int d = 0; d < 6; ++d) {
            for (std::size_t j = 0; j < box.dim(); ++j) {
                double mid = 0.5 * (box.lo[j] + box.hi[j]);
                double half = box.hi[j] - mid;
                box.lo[j] = mid - 2 * half;
                box.hi[j] = mid + 2 * half;
            }
            double cur = integrate(box);
            growing = (cur > prev * 1.5) ? growing + 1 : 0;
            prev = cur;
        }
        out.divergent = growing >= 3;
    }
    return out;
}

/** lattice count for tabulated priors */
inline ModelCount count_models_grid(const std::vector<double>& log_w)
{
    ModelCount out;
    LogAccumulator acc;
    for (double lw : log_w) acc.add(lw);
    out.M = std::exp(acc.log_total());
    return out;
}

struct ProperDecomposition {
    std::vector<double> model_probs;
};

/** a priori model probabilities from finite model counts */
inline ProperDecomposition proper_decomposition(const std::vector<ModelCount>& counts)
{
    double total = 0;
    for (const ModelCount& c : counts) {
        if (c.divergent) {
            throw NotSupportedError("divergent model count: use the unnormalized route");
        }
        total += c.M;
    }
    ProperDecomposition out;
    for (const ModelCount& c : counts) out.model_probs.push_back(c.M / total);
    return out;
}

} // namespace thermo

#endif
