#ifndef THERMO_MODELS_HPP
#define THERMO_MODELS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

#include "poisson.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "special.hpp"
#include "theta.hpp"
#include "types.hpp"

namespace thermo {

enum class ZooId {
    NormalConjugate,
    NormalMeanFlat,
    NormalDiscreteMean,
    NormalMeanVar,
    Exponential,
    UniformSupport,
    PoissonStoich,
    ExpMixture2
};

/** effective complexity of the flat-mean normal: (D/2)[1 + N log(1 + 1/N)] */
inline double effective_complexity_meanflat(double N, long D = 1)
{
    return (D / 2.0) * (1 + N * std::log1p(1 / N));
}

/** effective complexity of the exponential model; exactly 1 + Binet(N) */
inline double effective_complexity_exponential(double N)
{
    return 1 + binet(N);
}

/** uniform-support GPI normalization: log c = log N - N log(1 + 1/N) - 1 */
inline double uniform_gpi_log_c(double N)
{
    return std::log(N) - N * std::log1p(1 / N) - 1;
}

namespace detail {

// N-dependent part of E[log Z] for the mean+variance model with prior
// sigma^{-(D+1)}, evaluated at sigma0 = 1 (the sigma0 terms cancel in the
// normalization condition)
inline double meanvar_expected_log_z_part(double N, long D)
{
    return -(D * (N - 1) / 2.0) * log_2pi - (D / 2.0) * std::log(N) -
           std::log(2.0) - (D * N / 2.0) * digamma(D * (N - 1) / 2) +
           log_gamma(D * N / 2);
}

/** psi(z) - log z, evaluated without cancellation */
inline double psi_minus_log(double z)
{
    double result = 0;
    while (z < 10) {
        // psi(z) = psi(z+1) - 1/z
        result += std::log1p(1 / z) - 1 / z;
        z += 1;
    }
    double inv = 1 / z, inv2 = inv * inv;
    result += -0.5 * inv;
    double p = inv2;
    for (int k = 0; k < 7; ++k) {
        result -= bern2k[k] / (2 * (k + 1)) * p;
        p *= inv2;
    }
    return result;
}

/** log Gamma(x + h) - log Gamma(x) via Stirling differences, h > 0 */
inline double log_gamma_ratio(double x, double h)
{
    return h * std::log(x) + (x + h - 0.5) * std::log1p(h / x) - h +
           binet(x + h) - binet(x);
}

} // namespace detail

/**
 * GPI normalization of the mean+variance model prior c sigma^{-(D+1)}, solved
 * from (N+1) logZbar(N) = N logZbar(N+1). Infinite at N = 1. The forward
 * difference N part(N+1) - (N+1) part(N) is expanded term by term so the
 * O(N log Gamma(N)) magnitudes never appear; the naive difference loses all
 * significant digits past N ~ 1e5.
 */
inline double meanvar_gpi_log_c(double N, long D = 1)
{
    if (N <= 1) return neg_inf;
    double h = D / 2.0;
    double x0 = D * (N - 1) / 2.0; // digamma argument
    double x1 = D * N / 2.0;       // log-gamma argument
    double dpsi = std::log1p(h / x0) + detail::psi_minus_log(x0 + h) -
                  detail::psi_minus_log(x0);
    return std::log(2.0) - h * log_2pi                       // linear piece
           + h * std::log(N) - h * N * std::log1p(1 / N)     // -(D/2) log N piece
           - h * N * (N + 1) * dpsi                          // digamma piece
           + N * detail::log_gamma_ratio(x1, h) - log_gamma(x1);
}

/** effective complexity of the mean+variance model via w = rho e^{-K} */
inline double effective_complexity_meanvar(double N, long D = 1)
{
    if (N <= 1) return pos_inf;
    // rho = sqrt(det I) (N/2pi)^{(D+1)/2} with det I = 2D sigma^{-2(D+1)}
    // (the shared-sigma Fisher block is 2D/sigma^2); K = log(rho sigma^{D+1}/c)
    double log_rho_shape =
        0.5 * std::log(2.0 * static_cast<double>(D)) +
        ((D + 1) / 2.0) * std::log(N / (2 * pi));
    return log_rho_shape - meanvar_gpi_log_c(N, D);
}

/** mean+variance learning capacity, real-N analytic form (section IV.A.2) */
inline double meanvar_learning_capacity(long D, double N)
{
    if (N <= 1) return pos_inf;
    double d2 = D / 2.0;
    return d2 + N * N * d2 * d2 * trigamma(D * N / 2) -
           2 * N * N * d2 * d2 * trigamma(D * (N - 1) / 2) -
           N * N * N * d2 * d2 * d2 * polygamma2(D * (N - 1) / 2);
}

/** conjugate-normal learning capacity K / (2 (1 + N0/N)^2) */
inline double conjugate_learning_capacity(long K, double N, double N0)
{
    double r = 1 + N0 / N;
    return K / (2 * r * r);
}

/** exponential-model learning capacity -N^2 [psi'(N) + N psi''(N)] -> 1/2 */
inline double exponential_learning_capacity(double N)
{
    return -N * N * (trigamma(N) + N * polygamma2(N));
}

/**
 * A zoo entry: the ModelSpec plus its bundled prior and bookkeeping the
 * generic operations need (dimension count, closed-form machinery).
 */
struct ZooModel {
    ZooId id;
    std::string name;
    ModelSpec model;
    PriorSpec prior;
    long K = 0;       // continuous parameter count
    long D = 1;       // observation dimension
    double sigma = 1; // fixed scale where applicable
    double N0 = 1;    // conjugate prior weight sigma^2/sigma_p^2
    double t = 1;     // Poisson duration
    double b = 0;     // Poisson prior regularizer
    std::vector<double> mu_p; // conjugate prior mean

    // default integration box for quadrature evidence, from the data
    std::function<Box(const Dataset&)> default_box;
    // deterministic Sbar over a tabulated prior grid (Poisson, discrete mean);
    // N is the sample size (ignored by Poisson, whose duration t plays N's role)
    std::function<std::vector<double>(const std::vector<double>& grid_theta,
                                      const std::vector<double>& log_w, long N)>
        sbar_on_grid;
};

namespace detail {

inline double sq_norm(const Sample& x)
{
    double s = 0;
    for (double v : x) s += v * v;
    return s;
}

inline void dataset_moments(const Dataset& data, std::vector<double>& mean,
                            double& sum_sq_dev)
{
    std::size_t d = data.dim();
    mean.assign(d, 0.0);
    for (const Sample& s : data.samples) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += s[j];
    }
    for (double& m : mean) m /= static_cast<double>(data.size());
    sum_sq_dev = 0;
    for (const Sample& s : data.samples) {
        for (std::size_t j = 0; j < d; ++j) {
            double dev = s[j] - mean[j];
            sum_sq_dev += dev * dev;
        }
    }
}

} // namespace detail

/**
 * Conjugate normal: x ~ N(mu, sigma^2 I_K), prior mu ~ N(mu_p, sigma_p^2 I_K).
 * N0 = sigma^2 / sigma_p^2.
 */
inline ZooModel make_normal_conjugate(long K, double sigma, double sigma_p,
                                      std::vector<double> mu_p = {})
{
    if (mu_p.empty()) mu_p.assign(static_cast<std::size_t>(K), 0.0);
    ZooModel zoo;
    zoo.id = ZooId::NormalConjugate;
    zoo.K = K;
    zoo.D = K;
    zoo.sigma = sigma;
    zoo.N0 = sigma * sigma / (sigma_p * sigma_p);
    zoo.mu_p = mu_p;
    {
        std::ostringstream os;
        os << "normal-conj:K=" << K << ",sigma=" << sigma
           << ",sigma_p=" << sigma_p;
        zoo.name = os.str();
    }

    ModelSpec& m = zoo.model;
    m.obs_dim = static_cast<std::size_t>(K);
    for (long j = 0; j < K; ++j) {
        m.param_space.continuous.push_back({"mu" + std::to_string(j), neg_inf, pos_inf});
    }
    double sig = sigma;
    m.log_likelihood = [K, sig](const Sample& x, const ParamPoint& th) {
        double s = 0;
        for (long j = 0; j < K; ++j) {
            double d = x[j] - th.continuous[j];
            s += d * d;
        }
        return -(K / 2.0) * std::log(2 * pi * sig * sig) - s / (2 * sig * sig);
    };
    m.sampler = [K, sig](const ParamPoint& th, Rng& rng) {
        Sample x(static_cast<std::size_t>(K));
        for (long j = 0; j < K; ++j) x[j] = th.continuous[j] + sig * rng.normal();
        return x;
    };
    m.sufficient_stat = [](const Dataset& data) {
        std::vector<double> mean;
        double ssd;
        detail::dataset_moments(data, mean, ssd);
        mean.push_back(ssd);
        return mean;
    };
    double N0 = zoo.N0;
    std::vector<double> mp = mu_p;
    m.exact_log_evidence = [K, sig, N0, mp](const Dataset& data) {
        if (data.size() == 0) throw InvalidInputError("empty dataset");
        double N = static_cast<double>(data.size());
        std::vector<double> mean;
        double ssd;
        detail::dataset_moments(data, mean, ssd);
        double dev = 0;
        for (long j = 0; j < K; ++j) {
            double d = mean[j] - mp[j];
            dev += d * d;
        }
        return -(K * N / 2) * std::log(2 * pi * sig * sig) -
               (K / 2.0) * std::log((N + N0) / N0) -
               (ssd + (N * N0 / (N + N0)) * dev) / (2 * sig * sig);
    };
    m.log_evidence_triple = [K, sig, N0, mp](const ParamPoint& th, long N, Rng& rng) {
        // logZ(m) = -(Km/2) log 2 pi sigma^2 - (K/2) log((m+N0)/N0)
        //           - (1/2 sigma^2)[sigma^2 chi^2_{K(m-1)} (mean substituted)
        //                            + (m N0/(m+N0)) |xbar_m - mu_p|^2]
        // xbar coupled across sizes through the partial sums of the data.
        std::vector<double> w(static_cast<std::size_t>(K));
        double root = std::sqrt(static_cast<double>(N - 1));
        for (long j = 0; j < K; ++j) w[j] = root * rng.normal();
        std::vector<double> z1(static_cast<std::size_t>(K)), z2(static_cast<std::size_t>(K));
        for (long j = 0; j < K; ++j) z1[j] = rng.normal();
        for (long j = 0; j < K; ++j) z2[j] = rng.normal();
        auto log_z = [&](long m, const std::vector<double>& wsum) {
            double dev = 0;
            for (long j = 0; j < K; ++j) {
                double xbar = th.continuous[j] + sig * wsum[j] / m;
                double d = xbar - mp[j];
                dev += d * d;
            }
            return -(K * m / 2.0) * std::log(2 * pi * sig * sig) -
                   (K / 2.0) * std::log((m + N0) / N0) -
                   (K * (m - 1)) / 2.0 -
                   (m * N0 / (m + N0)) * dev / (2 * sig * sig);
        };
        LogZTriple out{};
        std::vector<double> wsum = w;
        out.minus = log_z(N - 1, wsum);
        for (long j = 0; j < K; ++j) wsum[j] += z1[j];
        out.center = log_z(N, wsum);
        for (long j = 0; j < K; ++j) wsum[j] += z2[j];
        out.plus = log_z(N + 1, wsum);
        return out;
    };
    m.fisher = [K, sig](const ParamPoint&) {
        std::vector<double> fi(static_cast<std::size_t>(K * K), 0.0);
        for (long j = 0; j < K; ++j) fi[static_cast<std::size_t>(j * K + j)] = 1 / (sig * sig);
        return fi;
    };
    m.cross_entropy = [K, sig](const ParamPoint& th, const ParamPoint& th0) {
        double dev = 0;
        for (long j = 0; j < K; ++j) {
            double d = th.continuous[j] - th0.continuous[j];
            dev += d * d;
        }
        return (K / 2.0) * std::log(2 * pi * sig * sig) + K / 2.0 +
               dev / (2 * sig * sig);
    };

    PriorSpec& p = zoo.prior;
    p.proper = true;
    double sp = sigma_p;
    p.log_density = [K, sp, mp](const ParamPoint& th) {
        double dev = 0;
        for (long j = 0; j < K; ++j) {
            double d = th.continuous[j] - mp[j];
            dev += d * d;
        }
        return -(K / 2.0) * std::log(2 * pi * sp * sp) - dev / (2 * sp * sp);
    };
    p.sampler = [K, sp, mp](Rng& rng) {
        ParamPoint th;
        th.continuous.resize(static_cast<std::size_t>(K));
        for (long j = 0; j < K; ++j) th.continuous[j] = mp[j] + sp * rng.normal();
        return th;
    };

    zoo.default_box = [K, sig, sp, mp](const Dataset& data) {
        std::vector<double> mean;
        double ssd;
        detail::dataset_moments(data, mean, ssd);
        double half = 10 * (sig / std::sqrt(static_cast<double>(data.size())) + sp);
        Box box;
        for (long j = 0; j < K; ++j) {
            box.lo.push_back(std::min(mean[j], mp[j]) - half);
            box.hi.push_back(std::max(mean[j], mp[j]) + half);
        }
        return box;
    };
    return zoo;
}

/**
 * Flat-mean normal: x ~ N(mu, sigma^2 I_D), improper prior w = c on mu.
 * gpi_n > 0 selects the GPI normalization at that sample size; gpi_n = 0
 * leaves c = 1.
 */
inline ZooModel make_normal_meanflat(long D, double sigma, long gpi_n = 0)
{
    ZooModel zoo;
    zoo.id = ZooId::NormalMeanFlat;
    zoo.K = D;
    zoo.D = D;
    zoo.sigma = sigma;
    {
        std::ostringstream os;
        os << "normal-meanflat:D=" << D << ",sigma=" << sigma;
        zoo.name = os.str();
    }
    double log_c = 0;
    if (gpi_n > 0) {
        double N = static_cast<double>(gpi_n);
        log_c = (D / 2.0) * std::log(N / (2 * pi * sigma * sigma)) -
                effective_complexity_meanflat(N, D);
    }

    ModelSpec& m = zoo.model;
    m.obs_dim = static_cast<std::size_t>(D);
    for (long j = 0; j < D; ++j) {
        m.param_space.continuous.push_back({"mu" + std::to_string(j), neg_inf, pos_inf});
    }
    double sig = sigma;
    m.log_likelihood = [D, sig](const Sample& x, const ParamPoint& th) {
        double s = 0;
        for (long j = 0; j < D; ++j) {
            double d = x[j] - th.continuous[j];
            s += d * d;
        }
        return -(D / 2.0) * std::log(2 * pi * sig * sig) - s / (2 * sig * sig);
    };
    m.sampler = [D, sig](const ParamPoint& th, Rng& rng) {
        Sample x(static_cast<std::size_t>(D));
        for (long j = 0; j < D; ++j) x[j] = th.continuous[j] + sig * rng.normal();
        return x;
    };
    m.sufficient_stat = [](const Dataset& data) {
        std::vector<double> mean;
        double ssd;
        detail::dataset_moments(data, mean, ssd);
        mean.push_back(ssd);
        return mean;
    };
    m.exact_log_evidence = [D, sig, log_c](const Dataset& data) {
        if (data.size() == 0) throw InvalidInputError("empty dataset");
        double N = static_cast<double>(data.size());
        std::vector<double> mean;
        double ssd;
        detail::dataset_moments(data, mean, ssd);
        return log_c - (D * N / 2) * std::log(2 * pi * sig * sig) +
               (D / 2.0) * std::log(2 * pi * sig * sig / N) -
               ssd / (2 * sig * sig);
    };
    m.log_evidence_triple = [D, sig, log_c](const ParamPoint&, long N, Rng& rng) {
        // only the chi^2_{D(m-1)} deviance is stochastic; prefix-coupled
        double base = (N >= 3) ? rng.chi_squared(static_cast<double>(D * (N - 2))) : 0.0;
        double v1 = rng.chi_squared(static_cast<double>(D));
        double v2 = rng.chi_squared(static_cast<double>(D));
        auto log_z = [&](long m, double chi2) {
            return log_c - (D * m / 2.0) * std::log(2 * pi * sig * sig) +
                   (D / 2.0) * std::log(2 * pi * sig * sig / m) - chi2 / 2;
        };
        return LogZTriple{log_z(N - 1, base), log_z(N, base + v1),
                          log_z(N + 1, base + v1 + v2)};
    };
    m.fisher = [D, sig](const ParamPoint&) {
        std::vector<double> fi(static_cast<std::size_t>(D * D), 0.0);
        for (long j = 0; j < D; ++j) fi[static_cast<std::size_t>(j * D + j)] = 1 / (sig * sig);
        return fi;
    };
    m.cross_entropy = [D, sig](const ParamPoint& th, const ParamPoint& th0) {
        double dev = 0;
        for (long j = 0; j < D; ++j) {
            double d = th.continuous[j] - th0.continuous[j];
            dev += d * d;
        }
        return (D / 2.0) * std::log(2 * pi * sig * sig) + D / 2.0 +
               dev / (2 * sig * sig);
    };

    zoo.prior.proper = false;
    if (gpi_n > 0) zoo.prior.sample_size_tag = gpi_n;
    zoo.prior.log_density = [log_c](const ParamPoint&) { return log_c; };

    zoo.default_box = [D, sig](const Dataset& data) {
        std::vector<double> mean;
        double ssd;
        detail::dataset_moments(data, mean, ssd);
        double half = 10 * sig / std::sqrt(static_cast<double>(data.size()));
        Box box;
        for (long j = 0; j < D; ++j) {
            box.lo.push_back(mean[j] - half);
            box.hi.push_back(mean[j] + half);
        }
        return box;
    };
    return zoo;
}

/**
 * Mean+variance normal: x ~ N(mu, sigma^2 I_D) with (mu, sigma) unknown,
 * prior w = c sigma^{-(D+1)}. gpi_n selects the GPI normalization.
 */
inline ZooModel make_normal_meanvar(long D, long gpi_n = 0)
{
    ZooModel zoo;
    zoo.id = ZooId::NormalMeanVar;
    zoo.K = D + 1;
    zoo.D = D;
    {
        std::ostringstream os;
        os << "normal-meanvar:D=" << D;
        zoo.name = os.str();
    }
    double log_c = (gpi_n > 0) ? meanvar_gpi_log_c(static_cast<double>(gpi_n), D) : 0.0;

    ModelSpec& m = zoo.model;
    m.obs_dim = static_cast<std::size_t>(D);
    for (long j = 0; j < D; ++j) {
        m.param_space.continuous.push_back({"mu" + std::to_string(j), neg_inf, pos_inf});
    }
    m.param_space.continuous.push_back({"sigma", 0, pos_inf});
    m.log_likelihood = [D](const Sample& x, const ParamPoint& th) {
        double s = 0;
        for (long j = 0; j < D; ++j) {
            double d = x[j] - th.continuous[j];
            s += d * d;
        }
        double sig = th.continuous[static_cast<std::size_t>(D)];
        if (!(sig > 0)) return neg_inf;
        return -(D / 2.0) * std::log(2 * pi * sig * sig) - s / (2 * sig * sig);
    };
    m.sampler = [D](const ParamPoint& th, Rng& rng) {
        double sig = th.continuous[static_cast<std::size_t>(D)];
        Sample x(static_cast<std::size_t>(D));
        for (long j = 0; j < D; ++j) x[j] = th.continuous[j] + sig * rng.normal();
        return x;
    };
    m.sufficient_stat = [](const Dataset& data) {
        std::vector<double> mean;
        double ssd;
        detail::dataset_moments(data, mean, ssd);
        mean.push_back(ssd);
        return mean;
    };
    m.exact_log_evidence = [D, log_c](const Dataset& data) {
        if (data.size() == 0) throw InvalidInputError("empty dataset");
        double N = static_cast<double>(data.size());
        std::vector<double> mean;
        double ssd;
        detail::dataset_moments(data, mean, ssd);
        if (!(ssd > 0)) {
            throw DivergenceError("mean+variance evidence diverges: zero deviance "
                                  "(N = 1 or degenerate data), sigma -> 0 direction");
        }
        return log_c - (D * (N - 1) / 2) * log_2pi - (D / 2.0) * std::log(N) -
               std::log(2.0) + (D * N / 2) * std::log(2 / ssd) +
               log_gamma(D * N / 2);
    };
    m.log_evidence_triple = [D, log_c](const ParamPoint& th, long N, Rng& rng) {
        if (N - 1 < 2) throw DivergenceError("mean+variance needs N - 1 >= 2");
        double sig0 = th.continuous[static_cast<std::size_t>(D)];
        double base = (N >= 3) ? rng.chi_squared(static_cast<double>(D * (N - 2))) : 0.0;
        double v1 = rng.chi_squared(static_cast<double>(D));
        double v2 = rng.chi_squared(static_cast<double>(D));
        auto log_z = [&](long m, double chi2) {
            double ssd = sig0 * sig0 * chi2;
            return log_c - (D * (m - 1) / 2.0) * log_2pi - (D / 2.0) * std::log(static_cast<double>(m)) -
                   std::log(2.0) + (D * m / 2.0) * std::log(2 / ssd) +
                   log_gamma(D * m / 2.0);
        };
        return LogZTriple{log_z(N - 1, base), log_z(N, base + v1),
                          log_z(N + 1, base + v1 + v2)};
    };
    m.fisher = [D](const ParamPoint& th) {
        double sig = th.continuous[static_cast<std::size_t>(D)];
        long K = D + 1;
        std::vector<double> fi(static_cast<std::size_t>(K * K), 0.0);
        for (long j = 0; j < D; ++j) fi[static_cast<std::size_t>(j * K + j)] = 1 / (sig * sig);
        fi[static_cast<std::size_t>(D * K + D)] = 2.0 * D / (sig * sig);
        return fi;
    };
    m.cross_entropy = [D](const ParamPoint& th, const ParamPoint& th0) {
        double dev = 0;
        for (long j = 0; j < D; ++j) {
            double d = th.continuous[j] - th0.continuous[j];
            dev += d * d;
        }
        double sig = th.continuous[static_cast<std::size_t>(D)];
        double sig0 = th0.continuous[static_cast<std::size_t>(D)];
        return (D / 2.0) * std::log(2 * pi * sig * sig) +
               (D * sig0 * sig0 + dev) / (2 * sig * sig);
    };

    zoo.prior.proper = false;
    if (gpi_n > 0) zoo.prior.sample_size_tag = gpi_n;
    zoo.prior.log_density = [D, log_c](const ParamPoint& th) {
        double sig = th.continuous[static_cast<std::size_t>(D)];
        if (!(sig > 0)) return neg_inf;
        return log_c - (D + 1) * std::log(sig);
    };

    zoo.default_box = [D](const Dataset& data) {
        std::vector<double> mean;
        double ssd;
        detail::dataset_moments(data, mean, ssd);
        double N = static_cast<double>(data.size());
        double sig_hat = std::sqrt(std::max(ssd / (D * N), 1e-12));
        double half = 10 * sig_hat / std::sqrt(N);
        Box box;
        for (long j = 0; j < D; ++j) {
            box.lo.push_back(mean[j] - half);
            box.hi.push_back(mean[j] + half);
        }
        box.lo.push_back(sig_hat / 10);
        box.hi.push_back(sig_hat * 10);
        return box;
    };
    return zoo;
}

/** Exponential: x ~ lambda e^{-lambda x}, prior w = c / lambda. */
inline ZooModel make_exponential(long gpi_n = 0)
{
    ZooModel zoo;
    zoo.id = ZooId::Exponential;
    zoo.K = 1;
    zoo.D = 1;
    zoo.name = "exponential";
    double log_c = 0;
    if (gpi_n > 0) {
        double N = static_cast<double>(gpi_n);
        log_c = 0.5 * std::log(N / (2 * pi)) - effective_complexity_exponential(N);
    }

    ModelSpec& m = zoo.model;
    m.obs_dim = 1;
    m.param_space.continuous.push_back({"lambda", 0, pos_inf});
    m.log_likelihood = [](const Sample& x, const ParamPoint& th) {
        double lam = th.continuous[0];
        if (!(lam > 0) || x[0] < 0) return neg_inf;
        return std::log(lam) - lam * x[0];
    };
    m.sampler = [](const ParamPoint& th, Rng& rng) {
        return Sample{rng.exponential() / th.continuous[0]};
    };
    m.sufficient_stat = [](const Dataset& data) {
        double s = 0;
        for (const Sample& x : data.samples) s += x[0];
        return std::vector<double>{s};
    };
    m.exact_log_evidence = [log_c](const Dataset& data) {
        if (data.size() == 0) throw InvalidInputError("empty dataset");
        double N = static_cast<double>(data.size());
        double s = 0;
        for (const Sample& x : data.samples) s += x[0];
        return log_c + log_gamma(N) - N * std::log(s);
    };
    m.log_evidence_triple = [log_c](const ParamPoint& th, long N, Rng& rng) {
        double lam0 = th.continuous[0];
        // S_m ~ Gamma(m)/lambda0, prefix-coupled through gamma increments
        double base = (N >= 2) ? rng.gamma(static_cast<double>(N - 1)) : 0.0;
        double v1 = rng.gamma(1.0), v2 = rng.gamma(1.0);
        auto log_z = [&](long m, double y) {
            return log_c + log_gamma(static_cast<double>(m)) -
                   m * std::log(y / lam0);
        };
        return LogZTriple{log_z(N - 1, base), log_z(N, base + v1),
                          log_z(N + 1, base + v1 + v2)};
    };
    m.fisher = [](const ParamPoint& th) {
        double lam = th.continuous[0];
        return std::vector<double>{1 / (lam * lam)};
    };
    m.cross_entropy = [](const ParamPoint& th, const ParamPoint& th0) {
        double lam = th.continuous[0], lam0 = th0.continuous[0];
        return -std::log(lam) + lam / lam0;
    };

    zoo.prior.proper = false;
    if (gpi_n > 0) zoo.prior.sample_size_tag = gpi_n;
    zoo.prior.log_density = [log_c](const ParamPoint& th) {
        double lam = th.continuous[0];
        if (!(lam > 0)) return neg_inf;
        return log_c - std::log(lam);
    };

    zoo.default_box = [](const Dataset& data) {
        double s = 0;
        for (const Sample& x : data.samples) s += x[0];
        double lam_hat = data.size() / s;
        double N = static_cast<double>(data.size());
        double half = 12 * lam_hat / std::sqrt(N);
        return Box{{std::max(lam_hat - half, lam_hat / 50)}, {lam_hat + half}};
    };
    return zoo;
}

/** Uniform support: x ~ U(0, L), prior w = c / L. */
inline ZooModel make_uniform(double L0 = 1, long gpi_n = 0)
{
    ZooModel zoo;
    zoo.id = ZooId::UniformSupport;
    zoo.K = 1;
    zoo.D = 1;
    {
        std::ostringstream os;
        os << "uniform:L0=" << L0;
        zoo.name = os.str();
    }
    double log_c = (gpi_n > 0) ? uniform_gpi_log_c(static_cast<double>(gpi_n)) : 0.0;

    ModelSpec& m = zoo.model;
    m.obs_dim = 1;
    m.regular = false;
    m.param_space.continuous.push_back({"L", 0, pos_inf});
    m.log_likelihood = [](const Sample& x, const ParamPoint& th) {
        double L = th.continuous[0];
        if (!(L > 0) || x[0] < 0 || x[0] > L) return neg_inf;
        return -std::log(L);
    };
    m.sampler = [](const ParamPoint& th, Rng& rng) {
        return Sample{th.continuous[0] * rng.uniform()};
    };
    m.sufficient_stat = [](const Dataset& data) {
        double mx = 0;
        for (const Sample& x : data.samples) mx = std::max(mx, x[0]);
        return std::vector<double>{mx};
    };
    m.exact_log_evidence = [log_c](const Dataset& data) {
        if (data.size() == 0) throw InvalidInputError("empty dataset");
        double N = static_cast<double>(data.size());
        double mx = 0;
        for (const Sample& x : data.samples) mx = std::max(mx, x[0]);
        return log_c - N * std::log(mx) - std::log(N);
    };
    m.log_evidence_triple = [log_c](const ParamPoint& th, long N, Rng& rng) {
        double L0 = th.continuous[0];
        double mx = 0;
        LogZTriple out{};
        auto log_z = [&](long m, double top) {
            return log_c - m * std::log(top) - std::log(static_cast<double>(m));
        };
        for (long i = 0; i < N + 1; ++i) {
            mx = std::max(mx, L0 * rng.uniform());
            if (i == N - 2) out.minus = log_z(N - 1, mx);
            if (i == N - 1) out.center = log_z(N, mx);
        }
        out.plus = log_z(N + 1, mx);
        return out;
    };
    m.cross_entropy = [](const ParamPoint& th, const ParamPoint& th0) {
        double L = th.continuous[0], L0 = th0.continuous[0];
        if (L < L0) return pos_inf;
        return std::log(L);
    };

    zoo.prior.proper = false;
    if (gpi_n > 0) zoo.prior.sample_size_tag = gpi_n;
    zoo.prior.log_density = [log_c](const ParamPoint& th) {
        double L = th.continuous[0];
        if (!(L > 0)) return neg_inf;
        return log_c - std::log(L);
    };

    zoo.default_box = [](const Dataset& data) {
        double mx = 0;
        for (const Sample& x : data.samples) mx = std::max(mx, x[0]);
        double N = static_cast<double>(data.size());
        return Box{{mx}, {mx * std::exp(46 / N)}};
    };
    return zoo;
}

/**
 * Discrete-mean normal: x ~ N(m, sigma^2 I_D) with m on the integer lattice,
 * unit prior weight per lattice point.
 */
inline ZooModel make_normal_discrete(long D, double sigma)
{
    ZooModel zoo;
    zoo.id = ZooId::NormalDiscreteMean;
    zoo.K = 0;
    zoo.D = D;
    zoo.sigma = sigma;
    {
        std::ostringstream os;
        os << "normal-discrete:D=" << D << ",sigma=" << sigma;
        zoo.name = os.str();
    }

    ModelSpec& m = zoo.model;
    m.obs_dim = static_cast<std::size_t>(D);
    for (long j = 0; j < D; ++j) {
        m.param_space.discrete.push_back({"m" + std::to_string(j), 1.0});
    }
    double sig = sigma;
    m.log_likelihood = [D, sig](const Sample& x, const ParamPoint& th) {
        double s = 0;
        for (long j = 0; j < D; ++j) {
            double d = x[j] - static_cast<double>(th.discrete[j]);
            s += d * d;
        }
        return -(D / 2.0) * std::log(2 * pi * sig * sig) - s / (2 * sig * sig);
    };
    m.sampler = [D, sig](const ParamPoint& th, Rng& rng) {
        Sample x(static_cast<std::size_t>(D));
        for (long j = 0; j < D; ++j) {
            x[j] = static_cast<double>(th.discrete[j]) + sig * rng.normal();
        }
        return x;
    };
    m.sufficient_stat = [](const Dataset& data) {
        std::vector<double> mean;
        double ssd;
        detail::dataset_moments(data, mean, ssd);
        mean.push_back(ssd);
        return mean;
    };
    m.exact_log_evidence = [D, sig](const Dataset& data) {
        if (data.size() == 0) throw InvalidInputError("empty dataset");
        double N = static_cast<double>(data.size());
        std::vector<double> mean;
        double ssd;
        detail::dataset_moments(data, mean, ssd);
        double n = N / (sig * sig);
        double lz = -(D * N / 2) * std::log(2 * pi * sig * sig) - ssd / (2 * sig * sig);
        for (long j = 0; j < D; ++j) {
            lz += 0.5 * std::log(2 * pi / n) +
                  std::log(theta_statistic_partition(mean[j], n));
        }
        return lz;
    };
    // E[log Z](N): dimensions factorize, each contributes the theta series
    m.expected_log_z = [D, sig](const ParamPoint&, double N) {
        double n = N / (sig * sig);
        double per_dim = -(N / 2) * std::log(2 * pi * sig * sig) - (N - 1) / 2 +
                         0.5 * std::log(2 * pi / n) +
                         discrete_mean_expected_log_z(n);
        return D * per_dim;
    };

    zoo.prior.proper = false;
    zoo.prior.log_density = [](const ParamPoint&) { return 0.0; };

    zoo.sbar_on_grid = [D, sig](const std::vector<double>& grid_theta,
                                const std::vector<double>& log_w, long N) {
        // Sbar(m0; N) = D/2 + D[(N+1) E_N - N E_{N+1}],
        // E_N = E_{t ~ N(m0, 1/n)}[log S_w(t; n)], n = N/sigma^2,
        // S_w(t; n) = sum_m w_m e^{-n (t - m)^2 / 2} over the tabulated window
        GaussRule rule = gauss_legendre(80, -8.0, 8.0);
        std::vector<double> wq(rule.nodes.size());
        double wt_sum = 0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            wq[q] = rule.weights[q] * std::exp(-rule.nodes[q] * rule.nodes[q] / 2);
            wt_sum += wq[q];
        }
        std::vector<double> out(grid_theta.size());
        for (std::size_t gi = 0; gi < grid_theta.size(); ++gi) {
            double m0 = grid_theta[gi];
            auto expect = [&](long NN) {
                double n = NN / (sig * sig);
                double e = 0;
                for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                    double tval = m0 + rule.nodes[q] / std::sqrt(n);
                    LogAccumulator acc;
                    for (std::size_t i = 0; i < grid_theta.size(); ++i) {
                        double d = tval - grid_theta[i];
                        acc.add(log_w[i] - n * d * d / 2);
                    }
                    e += wq[q] * acc.log_total();
                }
                return e / wt_sum;
            };
            out[gi] = D * (0.5 + (N + 1) * expect(N) - N * expect(N + 1));
        }
        return out;
    };

    return zoo;
}

/** Poisson stoichiometry in sufficient-statistic form (count k, duration t). */
inline ZooModel make_poisson_stoich(double t, double b = 0)
{
    ZooModel zoo;
    zoo.id = ZooId::PoissonStoich;
    zoo.K = 0;
    zoo.D = 1;
    zoo.t = t;
    zoo.b = b;
    {
        std::ostringstream os;
        os << "poisson:t=" << t;
        if (b > 0) os << ",b=" << b;
        zoo.name = os.str();
    }

    ModelSpec& m = zoo.model;
    m.obs_dim = 1;
    m.param_space.discrete.push_back({"m", 1.0, 1});
    m.log_likelihood = [t](const Sample& x, const ParamPoint& th) {
        long k = static_cast<long>(std::llround(x[0]));
        double mu = static_cast<double>(th.discrete[0]) * t;
        return -mu + k * std::log(mu) - log_gamma(k + 1.0);
    };
    m.sampler = [t](const ParamPoint& th, Rng& rng) {
        return Sample{static_cast<double>(
            rng.poisson(static_cast<double>(th.discrete[0]) * t))};
    };
    m.sufficient_stat = [](const Dataset& data) {
        double s = 0;
        for (const Sample& x : data.samples) s += x[0];
        return std::vector<double>{s};
    };
    double bb = b;
    m.exact_log_evidence = [t, bb](const Dataset& data) {
        if (data.size() != 1) {
            throw InvalidInputError("poisson stoichiometry consumes one count");
        }
        long k = static_cast<long>(std::llround(data.samples[0][0]));
        return poisson_log_z(k, t, bb);
    };
    m.expected_log_z = [bb](const ParamPoint& th, double tt) {
        return poisson_expected_log_z(tt, static_cast<double>(th.discrete[0]), bb);
    };

    zoo.prior.proper = false;
    zoo.prior.log_density = [bb](const ParamPoint& th) {
        return -bb * static_cast<double>(th.discrete[0]);
    };

    zoo.sbar_on_grid = [t](const std::vector<double>& grid_theta,
                           const std::vector<double>& log_w, long) {
        std::vector<double> out(grid_theta.size());
        for (std::size_t i = 0; i < grid_theta.size(); ++i) {
            out[i] = poisson_sbar_grid(grid_theta[i], t, log_w);
        }
        return out;
    };
    return zoo;
}

/** Parse "name:key=val,key=val" registry strings. */
inline ZooModel parse_registry(const std::string& spec)
{
    std::string name = spec;
    std::map<std::string, double> kv;
    auto colon = spec.find(':');
    if (colon != std::string::npos) {
        name = spec.substr(0, colon);
        std::stringstream ss(spec.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto eq = item.find('=');
            if (eq == std::string::npos) {
                throw InvalidInputError("bad registry parameter: " + item);
            }
            kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        }
    }
    auto get = [&](const std::string& key, double fallback) {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    };
    if (name == "normal-conj") {
        return make_normal_conjugate(static_cast<long>(get("K", 1)),
                                     get("sigma", 1), get("sigma_p", 1),
                                     kv.count("mu_p")
                                         ? std::vector<double>(static_cast<std::size_t>(get("K", 1)), get("mu_p", 0))
                                         : std::vector<double>{});
    }
    if (name == "normal-meanflat") {
        return make_normal_meanflat(static_cast<long>(get("D", 1)),
                                    get("sigma", 1),
                                    static_cast<long>(get("gpi_n", 0)));
    }
    if (name == "normal-meanvar") {
        return make_normal_meanvar(static_cast<long>(get("D", 1)),
                                   static_cast<long>(get("gpi_n", 0)));
    }
    if (name == "normal-discrete") {
        double sigma = kv.count("sigma2") ? std::sqrt(get("sigma2", 1))
                                          : get("sigma", 1);
        return make_normal_discrete(static_cast<long>(get("D", 1)), sigma);
    }
    if (name == "exponential") {
        return make_exponential(static_cast<long>(get("gpi_n", 0)));
    }
    if (name == "uniform") {
        return make_uniform(get("L0", 1), static_cast<long>(get("gpi_n", 0)));
    }
    if (name == "poisson") {
        return make_poisson_stoich(get("t", 1), get("b", 0));
    }
    throw InvalidInputError("unknown model: " + name);
}

} // namespace thermo

#endif
