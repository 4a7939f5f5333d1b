#ifndef THERMO_MIXTURE_HPP
#define THERMO_MIXTURE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "core.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace thermo {

/**
 * Two-component exponential mixture q(x|p, k1, k2) = p k1 e^{-k1 x} +
 * (1-p) k2 e^{-k2 x}, improper flat prior over p in [0,1] and a declared
 * log-spaced k window (the flat prior over the unbounded k plane needs one).
 */
struct MixtureGrid {
    int np = 201;            // linear p nodes on [0, 1]
    int nk = 201;            // log-spaced k nodes
    double kmin = 0.1;
    double kmax = 100;
    std::optional<double> p_fixed;
};

namespace detail {

struct KAxis {
    std::vector<double> k;
    std::vector<double> w; // trapezoid weight in k (log-spaced nodes)
};

inline KAxis make_k_axis(int nk, double kmin, double kmax)
{
    // composite Gauss-Legendre in u = log k, panels of up to 8 nodes;
    // trapezoid's O(h^2) error couples to the sample size and biases the
    // capacity slope at singular points, Gauss panels do not
    KAxis ax;
    int panel = std::min(8, nk);
    int npanels = (nk + panel - 1) / panel;
    double u0 = std::log(kmin), u1 = std::log(kmax);
    double du = (u1 - u0) / npanels;
    for (int s = 0; s < npanels; ++s) {
        GaussRule rule = gauss_legendre(panel, u0 + s * du, u0 + (s + 1) * du);
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            double k = std::exp(rule.nodes[j]);
            ax.k.push_back(k);
            ax.w.push_back(rule.weights[j] * k); // du -> dk measure
        }
    }
    return ax;
}

struct PAxis {
    std::vector<double> p;
    std::vector<double> w;
};

inline PAxis make_p_axis(const MixtureGrid& grid)
{
    PAxis ax;
    if (grid.p_fixed) {
        ax.p = {*grid.p_fixed};
        ax.w = {1.0};
        return ax;
    }
    int np = grid.np;
    ax.p.resize(static_cast<std::size_t>(np));
    ax.w.resize(static_cast<std::size_t>(np));
    double h = 1.0 / (np - 1);
    for (int i = 0; i < np; ++i) {
        ax.p[static_cast<std::size_t>(i)] = i * h;
        ax.w[static_cast<std::size_t>(i)] = (i == 0 || i == np - 1) ? h / 2 : h;
    }
    return ax;
}

// the ordered-wedge shortcut relies on the k1 <-> k2 relabeling symmetry,
// which holds only when the p axis is invariant under p <-> 1 - p
inline bool p_axis_symmetric(const PAxis& px)
{
    std::size_t np = px.p.size();
    for (std::size_t i = 0; i < np; ++i) {
        std::size_t j = np - 1 - i;
        if (std::abs(px.p[i] + px.p[j] - 1) > 1e-12 ||
            std::abs(px.w[i] - px.w[j]) > 1e-12 * px.w[i]) {
            return false;
        }
    }
    return true;
}

inline double mixture_log_evidence_on(const Dataset& data, const KAxis& kx,
                                      const PAxis& px)
{
    std::size_t n = data.size();
    std::size_t nk = kx.k.size();
    bool wedge = p_axis_symmetric(px);
    // e^{-k x_i} table
    std::vector<std::vector<double>> ek(nk, std::vector<double>(n));
    for (std::size_t a = 0; a < nk; ++a) {
        for (std::size_t i = 0; i < n; ++i) {
            ek[a][i] = std::exp(-kx.k[a] * data.samples[i][0]);
        }
    }
    LogAccumulator acc;
    for (std::size_t a = 0; a < nk; ++a) {
        for (std::size_t b = wedge ? a : 0; b < nk; ++b) {
            double mult = (!wedge || a == b) ? 1.0 : 2.0; // ordered wedge, doubled
            double wk = mult * kx.w[a] * kx.w[b];
            double k1 = kx.k[a], k2 = kx.k[b];
            for (std::size_t ip = 0; ip < px.p.size(); ++ip) {
                double p = px.p[ip], q = 1 - p;
                double cum = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    cum += std::log(p * k1 * ek[a][i] + q * k2 * ek[b][i]);
                }
                acc.add(cum + std::log(wk * px.w[ip]));
            }
        }
    }
    return acc.log_total();
}

} // namespace detail

/** 3D quadrature evidence for the mixture; error bound by grid halving */
inline EvidenceEstimate mixture_log_evidence(const Dataset& data,
                                             const MixtureGrid& grid = {})
{
    if (data.size() == 0) throw InvalidInputError("empty dataset");
    for (const Sample& x : data.samples) {
        if (!(x[0] >= 0)) throw InvalidInputError("mixture data must be positive");
    }
    detail::KAxis kx = detail::make_k_axis(grid.nk, grid.kmin, grid.kmax);
    detail::PAxis px = detail::make_p_axis(grid);
    double full = detail::mixture_log_evidence_on(data, kx, px);

    MixtureGrid half = grid;
    half.nk = (grid.nk + 1) / 2;
    half.np = (grid.np + 1) / 2;
    detail::KAxis kx2 = detail::make_k_axis(half.nk, half.kmin, half.kmax);
    detail::PAxis px2 = detail::make_p_axis(half);
    double coarse = detail::mixture_log_evidence_on(data, kx2, px2);
    return {full, EvidenceMethod::quadrature, std::abs(full - coarse)};
}

/** importance-sampling cross-check of the mixture evidence */
inline EvidenceEstimate mixture_log_evidence_mc(const Dataset& data,
                                                const MixtureGrid& grid,
                                                long draws, std::uint64_t seed)
{
    // proposal: categorical over coarse grid cells weighted by the posterior
    // mass, uniform jitter within the cell
    MixtureGrid coarse = grid;
    coarse.nk = 41;
    coarse.np = 41;
    detail::KAxis kx = detail::make_k_axis(coarse.nk, coarse.kmin, coarse.kmax);
    detail::PAxis px = detail::make_p_axis(coarse);
    std::size_t n = data.size();

    auto log_lik = [&](double p, double k1, double k2) {
        double cum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double x = data.samples[i][0];
            cum += std::log(p * k1 * std::exp(-k1 * x) +
                            (1 - p) * k2 * std::exp(-k2 * x));
        }
        return cum;
    };

    struct Cell {
        std::size_t a, b, ip;
        double log_mass;
    };
    std::vector<Cell> cells;
    LogAccumulator total;
    for (std::size_t a = 0; a < kx.k.size(); ++a) {
        for (std::size_t b = 0; b < kx.k.size(); ++b) {
            for (std::size_t ip = 0; ip < px.p.size(); ++ip) {
                double lm = log_lik(px.p[ip], kx.k[a], kx.k[b]) +
                            std::log(kx.w[a] * kx.w[b] * px.w[ip]);
                cells.push_back({a, b, ip, lm});
                total.add(lm);
            }
        }
    }
    double log_total = total.log_total();
    std::vector<double> cdf(cells.size());
    double run = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        run += std::exp(cells[c].log_mass - log_total);
        cdf[c] = run;
    }

    Rng rng(derive_seed(seed, 0, 7));
    auto cell_bounds = [&](const std::vector<double>& nodes, std::size_t i,
                           double lo_lim, double hi_lim) {
        double lo = (i == 0) ? lo_lim : 0.5 * (nodes[i - 1] + nodes[i]);
        double hi = (i + 1 == nodes.size()) ? hi_lim : 0.5 * (nodes[i] + nodes[i + 1]);
        return std::pair<double, double>{lo, hi};
    };
    std::vector<double> log_weights;
    log_weights.reserve(static_cast<std::size_t>(draws));
    LogAccumulator acc;
    for (long d = 0; d < draws; ++d) {
        double u = rng.uniform();
        std::size_t c = static_cast<std::size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        if (c >= cells.size()) c = cells.size() - 1;
        auto [alo, ahi] = cell_bounds(kx.k, cells[c].a, grid.kmin, grid.kmax);
        auto [blo, bhi] = cell_bounds(kx.k, cells[c].b, grid.kmin, grid.kmax);
        auto [plo, phi] = cell_bounds(px.p, cells[c].ip, 0.0, 1.0);
        double k1 = rng.uniform(alo, ahi);
        double k2 = rng.uniform(blo, bhi);
        double p = rng.uniform(plo, phi);
        // proposal density: cell prob / cell volume
        double log_q = cells[c].log_mass - log_total -
                       std::log((ahi - alo) * (bhi - blo) * (phi - plo));
        double lw = log_lik(p, k1, k2) - log_q;
        log_weights.push_back(lw);
        acc.add(lw);
    }
    double log_mean = acc.log_total() - std::log(static_cast<double>(draws));
    double var = 0;
    for (double lw : log_weights) {
        double w = std::exp(lw - log_mean);
        var += (w - 1) * (w - 1);
    }
    var /= static_cast<double>(draws - 1);
    double err = std::sqrt(var / static_cast<double>(draws));
    return {log_mean, EvidenceMethod::monteCarlo, err};
}

struct MixtureTheta {
    double p = 1;
    double k1 = 1;
    double k2 = 1;
};

inline MixtureTheta mixture_theta_singular() { return {1.0, 1.0, 1.0}; }
inline MixtureTheta mixture_theta_regular() { return {0.5, 1.0, 10.0}; }

inline double mixture_density(const MixtureTheta& th, double x)
{
    return th.p * th.k1 * std::exp(-th.k1 * x) +
           (1 - th.p) * th.k2 * std::exp(-th.k2 * x);
}

inline double mixture_draw(const MixtureTheta& th, Rng& rng)
{
    double k = (rng.uniform() < th.p) ? th.k1 : th.k2;
    return rng.exponential() / k;
}

struct MixtureCapacityConfig {
    long N = 100;
    long replicates = 500;
    std::uint64_t seed = 1;
    int jobs = 0;
    int nk = 161;
    int ns = 45;         // logit-transformed p nodes
    double s_max = 15;
    // marginalization window for the improper flat rate prior; the window's
    // log volume only shifts the evidence by a constant, so the capacity is
    // window-insensitive. [0.1, 10] is the standard scale window used for
    // the other rate/scale parameters.
    double kmin = 0.1;
    double kmax = 10;
    long window_lo = 90; // regression window for the LOOCV energy slope
    long window_hi = 110;
};

struct MixtureCapacityResult {
    double Cbar = 0;
    double Cse = 0;
    std::vector<double> Ubar; // mean LOOCV energy over the window
};

/**
 * Learning capacity of the mixture at N via the slope of the predictive
 * (LOOCV) energy U(N) over a sample-size window:
 *   C = -N^2 dU/dN,  U(N) = E[-log q_pred(X | x^N)].
 * Per replicate, posterior moment accumulators on the (p, k1, k2) grid give
 * the exact predictive density under the quadrature measure; the p axis is
 * logit-transformed to resolve the boundary layers at p = 0, 1 and the
 * ordered wedge k1 <= k2 is doubled.
 */
inline MixtureCapacityResult mixture_capacity(const MixtureTheta& theta0,
                                              const MixtureCapacityConfig& cfg)
{
    long W = cfg.window_hi - cfg.window_lo + 1;
    long n_draws = cfg.window_hi + 1;
    detail::KAxis kx = detail::make_k_axis(cfg.nk, cfg.kmin, cfg.kmax);
    std::size_t nk = kx.k.size();

    // logit p grid: p = sigmoid(s), measure dp = p (1-p) ds, trapezoid in s
    std::vector<double> pg(static_cast<std::size_t>(cfg.ns)), pw(static_cast<std::size_t>(cfg.ns));
    {
        double h = 2 * cfg.s_max / (cfg.ns - 1);
        for (int i = 0; i < cfg.ns; ++i) {
            double s = -cfg.s_max + i * h;
            double p = 1 / (1 + std::exp(-s));
            double w = (i == 0 || i == cfg.ns - 1) ? h / 2 : h;
            pg[static_cast<std::size_t>(i)] = p;
            pw[static_cast<std::size_t>(i)] = w * p * (1 - p);
        }
    }

    // quadrature for E_{T ~ q0}[.]: composite Gauss-Legendre on split intervals
    std::vector<double> tq, tw;
    {
        double edges[5] = {0, 0.1, 1, 5, 40};
        for (int seg = 0; seg < 4; ++seg) {
            GaussRule rule = gauss_legendre(24, edges[seg], edges[seg + 1]);
            for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
                tq.push_back(rule.nodes[j]);
                tw.push_back(rule.weights[j] * mixture_density(theta0, rule.nodes[j]));
            }
        }
    }
    // k e^{-k t_j} table for the predictive evaluation
    std::vector<std::vector<double>> kt(nk, std::vector<double>(tq.size()));
    for (std::size_t a = 0; a < nk; ++a) {
        for (std::size_t j = 0; j < tq.size(); ++j) {
            kt[a][j] = kx.k[a] * std::exp(-kx.k[a] * tq[j]);
        }
    }

    std::vector<double> slopes(static_cast<std::size_t>(cfg.replicates));
    std::vector<std::vector<double>> u_all(static_cast<std::size_t>(cfg.replicates));

    parallel_for(cfg.replicates, resolve_jobs(cfg.jobs), [&](long r) {
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(r), 0));
        std::vector<double> x(static_cast<std::size_t>(n_draws));
        for (double& xi : x) xi = mixture_draw(theta0, rng);

        // reference log-likelihood prefix under theta0 keeps exp() in range
        std::vector<double> ref(static_cast<std::size_t>(n_draws + 1), 0.0);
        for (long i = 0; i < n_draws; ++i) {
            ref[static_cast<std::size_t>(i + 1)] =
                ref[static_cast<std::size_t>(i)] +
                std::log(mixture_density(theta0, x[static_cast<std::size_t>(i)]));
        }

        std::vector<std::vector<double>> ek(nk, std::vector<double>(x.size()));
        for (std::size_t a = 0; a < nk; ++a) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                ek[a][i] = std::exp(-kx.k[a] * x[i]);
            }
        }

        std::vector<double> z(static_cast<std::size_t>(W), 0.0);
        std::vector<std::vector<double>> coef(
            nk, std::vector<double>(static_cast<std::size_t>(W), 0.0));
        for (std::size_t a = 0; a < nk; ++a) {
            for (std::size_t b = a; b < nk; ++b) {
                double mult = (a == b) ? 1.0 : 2.0;
                double wk = mult * kx.w[a] * kx.w[b];
                double k1 = kx.k[a], k2 = kx.k[b];
                const double* ea = ek[a].data();
                const double* eb = ek[b].data();
                for (std::size_t ip = 0; ip < pg.size(); ++ip) {
                    double p = pg[ip], q = 1 - p;
                    double wq = wk * pw[ip];
                    double pk1 = p * k1, qk2 = q * k2;
                    double cum = 0;
                    long wi = 0;
                    for (long i = 0; i < n_draws; ++i) {
                        cum += std::log(pk1 * ea[i] + qk2 * eb[i]);
                        long sz = i + 1;
                        if (sz >= cfg.window_lo && sz <= cfg.window_hi) {
                            double wgt = wq * std::exp(cum - ref[static_cast<std::size_t>(sz)]);
                            z[static_cast<std::size_t>(wi)] += wgt;
                            coef[a][static_cast<std::size_t>(wi)] += wgt * p;
                            coef[b][static_cast<std::size_t>(wi)] += wgt * q;
                            ++wi;
                        }
                    }
                }
            }
        }

        // LOOCV energy u(sz) = -E_T[log pred_sz(T)] per window size
        std::vector<double> u(static_cast<std::size_t>(W));
        double tw_total = 0;
        for (double w : tw) tw_total += w;
        for (long wi = 0; wi < W; ++wi) {
            double s = 0;
            for (std::size_t j = 0; j < tq.size(); ++j) {
                double pred = 0;
                for (std::size_t a = 0; a < nk; ++a) {
                    pred += coef[a][static_cast<std::size_t>(wi)] * kt[a][j];
                }
                s -= tw[j] * std::log(pred / z[static_cast<std::size_t>(wi)]);
            }
            u[static_cast<std::size_t>(wi)] = s / tw_total;
        }

        // OLS slope of u against the window size
        double nbar = 0.5 * (cfg.window_lo + cfg.window_hi);
        double sxy = 0, sxx = 0;
        for (long wi = 0; wi < W; ++wi) {
            double dx = (cfg.window_lo + wi) - nbar;
            sxy += dx * u[static_cast<std::size_t>(wi)];
            sxx += dx * dx;
        }
        slopes[static_cast<std::size_t>(r)] = sxy / sxx;
        u_all[static_cast<std::size_t>(r)] = u;
    });

    MixtureCapacityResult out;
    double mean = 0;
    for (double s : slopes) mean += s;
    mean /= static_cast<double>(cfg.replicates);
    double var = 0;
    for (double s : slopes) var += (s - mean) * (s - mean);
    var /= static_cast<double>(cfg.replicates - 1);
    double n2 = static_cast<double>(cfg.N) * cfg.N;
    out.Cbar = -n2 * mean;
    out.Cse = n2 * std::sqrt(var / static_cast<double>(cfg.replicates));
    out.Ubar.assign(static_cast<std::size_t>(W), 0.0);
    for (const auto& u : u_all) {
        for (std::size_t wi = 0; wi < u.size(); ++wi) out.Ubar[wi] += u[wi];
    }
    for (double& v : out.Ubar) v /= static_cast<double>(cfg.replicates);
    return out;
}

/** zoo wrapper so the generic engine can address the mixture */
inline ZooModel make_expmix2(const MixtureGrid& grid = {})
{
    ZooModel zoo;
    zoo.id = ZooId::ExpMixture2;
    zoo.K = 3;
    zoo.D = 1;
    zoo.name = "expmix2";

    ModelSpec& m = zoo.model;
    m.obs_dim = 1;
    m.param_space.continuous.push_back({"p", 0, 1});
    m.param_space.continuous.push_back({"k1", grid.kmin, grid.kmax});
    m.param_space.continuous.push_back({"k2", grid.kmin, grid.kmax});
    m.log_likelihood = [](const Sample& x, const ParamPoint& th) {
        if (x[0] < 0) return neg_inf;
        MixtureTheta t{th.continuous[0], th.continuous[1], th.continuous[2]};
        return std::log(mixture_density(t, x[0]));
    };
    m.sampler = [](const ParamPoint& th, Rng& rng) {
        MixtureTheta t{th.continuous[0], th.continuous[1], th.continuous[2]};
        return Sample{mixture_draw(t, rng)};
    };
    MixtureGrid g = grid;
    m.exact_log_evidence = [g](const Dataset& data) {
        return mixture_log_evidence(data, g).log_z;
    };
    zoo.prior.proper = false;
    zoo.prior.log_density = [g](const ParamPoint& th) {
        double p = th.continuous[0], k1 = th.continuous[1], k2 = th.continuous[2];
        if (p < 0 || p > 1 || k1 < g.kmin || k1 > g.kmax || k2 < g.kmin ||
            k2 > g.kmax) {
            return neg_inf;
        }
        return 0.0;
    };
    return zoo;
}

} // namespace thermo

#endif
