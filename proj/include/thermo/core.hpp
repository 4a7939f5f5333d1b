#ifndef THERMO_CORE_HPP
#define THERMO_CORE_HPP

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

#include "models.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace thermo {

/** jobs cap: explicit argument, else THERMO_JOBS, else hardware concurrency */
inline int resolve_jobs(int requested = 0)
{
    if (requested > 0) return requested;
    if (const char* env = std::getenv("THERMO_JOBS")) {
        int j = std::atoi(env);
        if (j > 0) return j;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

/** deterministic parallel map: results land in index order regardless of schedule */
template <typename Fn>
inline void parallel_for(long n, int jobs, Fn&& fn)
{
    jobs = std::min<long>(std::max(jobs, 1), n);
    if (jobs <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                long i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

/** -(1/N) sum_i log q(x_i | theta); +inf when any likelihood vanishes */
inline double cross_entropy_hat(const ModelSpec& model, const ParamPoint& theta,
                                const Dataset& data)
{
    if (data.size() == 0) throw InvalidInputError("empty dataset");
    if (data.dim() != model.obs_dim) {
        throw InvalidInputError("sample dimension does not match model");
    }
    double s = 0;
    for (const Sample& x : data.samples) {
        double ll = model.log_likelihood(x, theta);
        if (ll == neg_inf) return pos_inf;
        s += ll;
    }
    return -s / static_cast<double>(data.size());
}

struct QuadratureParams {
    std::optional<Box> box;
    double tol = 1e-9;
    int n0 = 33;
    int max_n = 4097;
    long mc_draws = 200000;
    std::uint64_t mc_seed = 1;
};

namespace detail {

inline double log_posterior_integrand(const ModelSpec& model,
                                      const PriorSpec& prior,
                                      const Dataset& data,
                                      const std::vector<double>& point)
{
    ParamPoint th;
    th.continuous = point;
    double g = prior.log_density(th);
    if (g == neg_inf) return neg_inf;
    for (const Sample& x : data.samples) {
        double ll = model.log_likelihood(x, th);
        if (ll == neg_inf) return neg_inf;
        g += ll;
    }
    return g;
}

} // namespace detail

/** log evidence log int dtheta prior e^{-N Hhat} by the selected method */
inline EvidenceEstimate log_evidence(const ModelSpec& model,
                                     const PriorSpec& prior,
                                     const Dataset& data,
                                     EvidenceMethod method,
                                     const QuadratureParams& params = {},
                                     const std::function<Box(const Dataset&)>&
                                         default_box = nullptr)
{
    if (data.size() == 0) throw InvalidInputError("empty dataset");
    if (method == EvidenceMethod::closedForm) {
        if (!model.exact_log_evidence) {
            throw NotSupportedError("model has no closed-form evidence");
        }
        return {model.exact_log_evidence(data), EvidenceMethod::closedForm, 0};
    }
    if (method == EvidenceMethod::discreteSum) {
        if (model.param_space.discrete.empty()) {
            throw NotSupportedError("discreteSum requires discrete parameters");
        }
        if (!model.exact_log_evidence) {
            throw NotSupportedError("no lattice summation route available");
        }
        return {model.exact_log_evidence(data), EvidenceMethod::discreteSum, 1e-12};
    }
    std::size_t k = model.param_space.continuous.size();
    if (k == 0 || k > 3) {
        throw NotSupportedError("quadrature limited to 1..3 continuous dims");
    }
    auto g = [&](const std::vector<double>& point) {
        return detail::log_posterior_integrand(model, prior, data, point);
    };
    Box box;
    if (params.box) {
        box = *params.box;
    } else if (default_box) {
        box = default_box(data);
    } else {
        throw InvalidInputError("no integration box available");
    }
    box = shrink_box(g, box);
    if (method == EvidenceMethod::quadrature) {
        EvidenceEstimate est = integrate_log(g, box, params.tol, params.n0,
                                             params.max_n);
        if (!std::isfinite(est.log_z)) {
            throw DivergenceError("evidence quadrature diverged along " +
                                  model.param_space.continuous[0].name);
        }
        return est;
    }
    // monteCarlo: uniform importance proposal over the shrunk box
    double log_vol = 0;
    for (std::size_t j = 0; j < box.dim(); ++j) {
        log_vol += std::log(box.hi[j] - box.lo[j]);
    }
    Rng rng(derive_seed(params.mc_seed, 0, 99));
    std::vector<double> point(box.dim());
    LogAccumulator acc;
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(params.mc_draws));
    for (long i = 0; i < params.mc_draws; ++i) {
        for (std::size_t j = 0; j < box.dim(); ++j) {
            point[j] = rng.uniform(box.lo[j], box.hi[j]);
        }
        double lg = g(point);
        logs.push_back(lg);
        acc.add(lg);
    }
    double log_mean = acc.log_total() - std::log(static_cast<double>(params.mc_draws));
    // delta-method error on the log: sd(weights) / (mean * sqrt(M))
    double var = 0;
    for (double lg : logs) {
        double w = std::exp(lg - log_mean);
        var += (w - 1) * (w - 1);
    }
    var /= std::max<double>(1, static_cast<double>(params.mc_draws - 1));
    double err = std::sqrt(var / static_cast<double>(params.mc_draws));
    return {log_mean + log_vol, EvidenceMethod::monteCarlo, err};
}

/** convenience: evidence for a zoo model with its bundled prior */
inline EvidenceEstimate log_evidence(const ZooModel& zoo, const Dataset& data,
                                     EvidenceMethod method = EvidenceMethod::closedForm,
                                     const QuadratureParams& params = {})
{
    return log_evidence(zoo.model, zoo.prior, data, method, params,
                        zoo.default_box);
}

/** LOOCV energy -(1/N) sum_i [log Z(x^N) - log Z(x^{without i})] */
inline double avg_energy_loocv(const ModelSpec& model, const PriorSpec& prior,
                               const Dataset& data,
                               EvidenceMethod method = EvidenceMethod::closedForm,
                               const QuadratureParams& params = {},
                               const std::function<Box(const Dataset&)>& box_fn = nullptr)
{
    if (data.size() < 2) throw InvalidInputError("LOOCV needs N >= 2");
    double full = log_evidence(model, prior, data, method, params, box_fn).log_z;
    double s = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        Dataset loo;
        loo.samples.reserve(data.size() - 1);
        for (std::size_t j = 0; j < data.size(); ++j) {
            if (j != i) loo.samples.push_back(data.samples[j]);
        }
        double lz = log_evidence(model, prior, loo, method, params, box_fn).log_z;
        if (!std::isfinite(lz)) {
            throw DivergenceError("leave-one-out evidence diverged (improper posterior)");
        }
        s += full - lz;
    }
    return -s / static_cast<double>(data.size());
}

/** Gibbs entropy N (U - F) for one dataset */
inline double gibbs_entropy_sample(const ModelSpec& model, const PriorSpec& prior,
                                   const Dataset& data,
                                   EvidenceMethod method = EvidenceMethod::closedForm,
                                   const QuadratureParams& params = {},
                                   const std::function<Box(const Dataset&)>& box_fn = nullptr)
{
    double n = static_cast<double>(data.size());
    double u = avg_energy_loocv(model, prior, data, method, params, box_fn);
    double f = -log_evidence(model, prior, data, method, params, box_fn).log_z / n;
    return n * (u - f);
}

struct DisorderConfig {
    long replicates = 1000;
    std::uint64_t seed = 1;
    bool theta0_from_prior = false;
    int jobs = 0;
    EvidenceMethod fallback_method = EvidenceMethod::closedForm;
    QuadratureParams params;
};

/**
 * Disorder-averaged thermodynamics at size N from the coupled Gbar triple:
 * F = Gbar(N)/N, U = Gbar(N+1) - Gbar(N) (forward),
 * C = -N^2 [Gbar(N+1) - 2 Gbar(N) + Gbar(N-1)],
 * S = N Gbar(N+1) - (N+1) Gbar(N).
 */
inline ThermoReport disorder_average(const ZooModel& zoo, const ParamPoint& theta0,
                                     long N, const DisorderConfig& cfg)
{
    if (N < 2) throw InvalidInputError("disorder_average needs N >= 2");
    if (cfg.replicates < 2) throw InvalidInputError("need replicates >= 2 for stderr");
    if (cfg.theta0_from_prior && !zoo.prior.sampler) {
        throw NotSupportedError("prior has no sampler for theta0 draws");
    }
    long R = cfg.replicates;
    std::vector<double> f(static_cast<std::size_t>(R)), u(static_cast<std::size_t>(R)),
        c(static_cast<std::size_t>(R)), s(static_cast<std::size_t>(R));
    std::vector<char> bad(static_cast<std::size_t>(R), 0);

    parallel_for(R, resolve_jobs(cfg.jobs), [&](long r) {
        Rng data_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(r), 0));
        ParamPoint th = theta0;
        if (cfg.theta0_from_prior) {
            if (!zoo.prior.sampler) {
                throw NotSupportedError("prior has no sampler for theta0 draws");
            }
            Rng prior_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(r), 1));
            th = zoo.prior.sampler(prior_rng);
        }
        LogZTriple t{};
        try {
            if (zoo.model.log_evidence_triple) {
                t = zoo.model.log_evidence_triple(th, N, data_rng);
            } else {
                Dataset data;
                data.samples.reserve(static_cast<std::size_t>(N + 1));
                for (long i = 0; i < N + 1; ++i) {
                    data.samples.push_back(zoo.model.sampler(th, data_rng));
                }
                auto prefix_log_z = [&](long m) {
                    Dataset d;
                    d.samples.assign(data.samples.begin(),
                                     data.samples.begin() + m);
                    return log_evidence(zoo, d, cfg.fallback_method, cfg.params)
                        .log_z;
                };
                t.minus = prefix_log_z(N - 1);
                t.center = prefix_log_z(N);
                t.plus = prefix_log_z(N + 1);
            }
        } catch (const DivergenceError&) {
            bad[static_cast<std::size_t>(r)] = 1;
            return;
        }
        if (!std::isfinite(t.minus) || !std::isfinite(t.center) ||
            !std::isfinite(t.plus)) {
            bad[static_cast<std::size_t>(r)] = 1;
            return;
        }
        double gm = -t.minus, g0 = -t.center, gp = -t.plus;
        f[static_cast<std::size_t>(r)] = g0 / static_cast<double>(N);
        u[static_cast<std::size_t>(r)] = gp - g0;
        c[static_cast<std::size_t>(r)] =
            -static_cast<double>(N) * N * (gp - 2 * g0 + gm);
        s[static_cast<std::size_t>(r)] = N * gp - (N + 1) * g0;
    });

    long divergent = 0;
    for (char x : bad) divergent += x;
    if (divergent * 100 > R) {
        throw DivergenceError("divergent replicate fraction above 1%: " +
                              std::to_string(divergent) + " of " +
                              std::to_string(R));
    }
    auto mean_se = [&](const std::vector<double>& v, double& mean, double& se) {
        double sum = 0;
        long n = 0;
        for (long r = 0; r < R; ++r) {
            if (!bad[static_cast<std::size_t>(r)]) {
                sum += v[static_cast<std::size_t>(r)];
                ++n;
            }
        }
        mean = sum / n;
        double var = 0;
        for (long r = 0; r < R; ++r) {
            if (!bad[static_cast<std::size_t>(r)]) {
                double d = v[static_cast<std::size_t>(r)] - mean;
                var += d * d;
            }
        }
        se = n > 1 ? std::sqrt(var / (static_cast<double>(n) * (n - 1))) : 0;
    };
    ThermoReport rep;
    rep.N = N;
    rep.replicates = R;
    rep.seed = cfg.seed;
    rep.divergent = divergent;
    mean_se(f, rep.Fbar, rep.Fse);
    mean_se(u, rep.Ubar, rep.Use);
    mean_se(c, rep.Cbar, rep.Cse);
    mean_se(s, rep.Sbar, rep.Sse);
    return rep;
}

/** Fisher information matrix at theta0 (row-major K x K) */
inline std::vector<double> fisher_information(const ZooModel& zoo,
                                              const ParamPoint& theta0)
{
    if (!zoo.model.regular) {
        throw NotDefinedError("Fisher information undefined: non-regular model");
    }
    if (zoo.model.fisher) return zoo.model.fisher(theta0);
    if (!zoo.model.cross_entropy) {
        throw NotSupportedError("no cross-entropy route for Fisher information");
    }
    // central second differences of H(theta; theta0) in theta around theta0,
    // Richardson step-halving as stability control
    std::size_t k = theta0.continuous.size();
    std::vector<double> fi(k * k, 0.0);
    auto h_at = [&](const std::vector<double>& delta) {
        ParamPoint th = theta0;
        for (std::size_t j = 0; j < k; ++j) th.continuous[j] += delta[j];
        return zoo.model.cross_entropy(th, theta0);
    };
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a; b < k; ++b) {
            auto second = [&](double h) {
                std::vector<double> d(k, 0.0);
                if (a == b) {
                    d[a] = h;
                    double plus = h_at(d);
                    d[a] = -h;
                    double minus = h_at(d);
                    d[a] = 0;
                    return (plus - 2 * h_at(d) + minus) / (h * h);
                }
                double s = 0;
                for (int sa : {1, -1}) {
                    for (int sb : {1, -1}) {
                        d[a] = sa * h;
                        d[b] = sb * h;
                        s += sa * sb * h_at(d);
                    }
                }
                return s / (4 * h * h);
            };
            double scale = std::max(1.0, std::abs(theta0.continuous[a]));
            double h = 1e-3 * scale;
            double d1 = second(h), d2 = second(h / 2);
            double val = (4 * d2 - d1) / 3;
            if (!std::isfinite(val) || std::abs(d1 - d2) > 1e-3 * std::max(1.0, std::abs(val))) {
                throw NotDefinedError("Fisher information unstable under step halving");
            }
            fi[a * k + b] = fi[b * k + a] = val;
        }
    }
    return fi;
}

inline double det_small(const std::vector<double>& m, std::size_t k)
{
    if (k == 1) return m[0];
    if (k == 2) return m[0] * m[3] - m[1] * m[2];
    if (k == 3) {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) -
               m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }
    throw NotSupportedError("determinant only for K <= 3");
}

/** statistical resolution per coordinate: N^{-1/2} sqrt([I^{-1}]^{ii}) */
inline std::vector<double> statistical_resolution(const ZooModel& zoo,
                                                  const ParamPoint& theta0,
                                                  double N)
{
    std::vector<double> fi = fisher_information(zoo, theta0);
    std::size_t k = theta0.continuous.size();
    double det = det_small(fi, k);
    if (!(det > 0)) throw NotDefinedError("singular Fisher information");
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) {
        // cofactor / det = [I^{-1}]_{ii}
        double inv_ii;
        if (k == 1) {
            inv_ii = 1 / fi[0];
        } else if (k == 2) {
            inv_ii = fi[(1 - i) * 2 + (1 - i)] / det;
        } else {
            std::size_t a = (i + 1) % 3, b = (i + 2) % 3;
            inv_ii = (fi[a * 3 + a] * fi[b * 3 + b] - fi[a * 3 + b] * fi[b * 3 + a]) / det;
        }
        out[i] = std::sqrt(inv_ii / N);
    }
    return out;
}

} // namespace thermo

#endif
