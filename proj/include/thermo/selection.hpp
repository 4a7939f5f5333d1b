#ifndef THERMO_SELECTION_HPP
#define THERMO_SELECTION_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "core.hpp"
#include "gpi.hpp"
#include "models.hpp"
#include "special.hpp"

namespace thermo {

enum class PriorMode { gpi, normalizedJeffreys, informativeFixedSupport };

inline std::string prior_mode_name(PriorMode mode)
{
    switch (mode) {
        case PriorMode::gpi: return "gpi";
        case PriorMode::normalizedJeffreys: return "normalized";
        case PriorMode::informativeFixedSupport: return "informative";
    }
    return "?";
}

/**
 * The five scalar families of the model-identity experiment:
 * a fixed N(5,1), the unknown-mean normal, the unknown-mean-and-variance
 * normal, the exponential, and the uniform. Each carries its generative
 * truth and, for the informative mode, a declared parameter box.
 */
enum class SelectId { PointNormal, NormalMu, NormalMuSigma, Exponential, Uniform };

struct SelectModel {
    SelectId id;
    std::string name;
    long K;
};

inline std::vector<SelectModel> selection_models()
{
    return {{SelectId::PointNormal, "N", 0},
            {SelectId::NormalMu, "N(mu)", 1},
            {SelectId::NormalMuSigma, "N(mu,sigma)", 2},
            {SelectId::Exponential, "Exp", 1},
            {SelectId::Uniform, "U", 1}};
}

inline Dataset simulate_dataset(SelectId id, long N, Rng& rng)
{
    Dataset data;
    data.samples.reserve(static_cast<std::size_t>(N));
    for (long i = 0; i < N; ++i) {
        double x = 0;
        switch (id) {
            case SelectId::PointNormal: x = 5 + rng.normal(); break;
            case SelectId::NormalMu: x = 6 + rng.normal(); break;
            case SelectId::NormalMuSigma: x = 5 + 0.75 * rng.normal(); break;
            case SelectId::Exponential: x = rng.exponential() / 2; break;
            case SelectId::Uniform: x = 10 * rng.uniform(); break;
        }
        data.samples.push_back({x});
    }
    return data;
}

namespace detail {

inline void scalar_moments(const Dataset& data, double& mean, double& ssd,
                           double& sum, double& mx, double& mn)
{
    mean = 0;
    sum = 0;
    mx = neg_inf;
    mn = pos_inf;
    for (const Sample& x : data.samples) {
        sum += x[0];
        mx = std::max(mx, x[0]);
        mn = std::min(mn, x[0]);
    }
    mean = sum / static_cast<double>(data.size());
    ssd = 0;
    for (const Sample& x : data.samples) {
        double d = x[0] - mean;
        ssd += d * d;
    }
}

inline double point_normal_log_lik(const Dataset& data)
{
    double s = 0;
    for (const Sample& x : data.samples) {
        double d = x[0] - 5;
        s += d * d;
    }
    double N = static_cast<double>(data.size());
    return -(N / 2) * log_2pi - s / 2;
}

} // namespace detail

/** log Z of one family under one prior mode; -inf encodes Z = 0 */
inline double selection_log_evidence(SelectId id, PriorMode mode,
                                     const Dataset& data)
{
    long N = static_cast<long>(data.size());
    double Nd = static_cast<double>(N);
    double mean, ssd, sum, mx, mn;
    detail::scalar_moments(data, mean, ssd, sum, mx, mn);

    if (id == SelectId::PointNormal) return detail::point_normal_log_lik(data);

    if (mode == PriorMode::normalizedJeffreys) {
        // the scaled-Jeffreys shapes are improper on the full support:
        // normalization diverges, so these families get zero weight
        return neg_inf;
    }

    if (mode == PriorMode::gpi) {
        switch (id) {
            case SelectId::NormalMu: {
                double log_c = 0.5 * std::log(Nd / (2 * pi)) -
                               effective_complexity_meanflat(Nd, 1);
                return log_c - (Nd / 2) * log_2pi + 0.5 * std::log(2 * pi / Nd) -
                       ssd / 2;
            }
            case SelectId::NormalMuSigma: {
                if (!(ssd > 0)) return neg_inf;
                return meanvar_gpi_log_c(Nd, 1) - ((Nd - 1) / 2) * log_2pi -
                       0.5 * std::log(Nd) - std::log(2.0) +
                       (Nd / 2) * std::log(2 / ssd) + log_gamma(Nd / 2);
            }
            case SelectId::Exponential: {
                if (mn < 0) return neg_inf;
                double log_c = 0.5 * std::log(Nd / (2 * pi)) -
                               effective_complexity_exponential(Nd);
                return log_c + log_gamma(Nd) - Nd * std::log(sum);
            }
            case SelectId::Uniform: {
                if (mn < 0) return neg_inf;
                return uniform_gpi_log_c(Nd) - Nd * std::log(mx) - std::log(Nd);
            }
            default: break;
        }
    }

    // informative mode: normalized priors on the declared boxes
    // (flat over location coordinates, log-flat over scales)
    switch (id) {
        case SelectId::NormalMu: {
            auto g = [&](const std::vector<double>& p) {
                double mu = p[0];
                return -std::log(10.0) - (Nd / 2) * log_2pi -
                       (ssd + Nd * (mean - mu) * (mean - mu)) / 2;
            };
            return integrate_log(g, Box{{0}, {10}}, 1e-10, 129).log_z;
        }
        case SelectId::NormalMuSigma: {
            double log_p = -std::log(10.0) - std::log(std::log(100.0));
            auto g = [&](const std::vector<double>& p) {
                double mu = p[0], sig = p[1];
                return log_p - std::log(sig) - Nd * std::log(2 * pi * sig * sig) / 2 -
                       (ssd + Nd * (mean - mu) * (mean - mu)) / (2 * sig * sig);
            };
            return integrate_log(g, Box{{0, 0.1}, {10, 10}}, 1e-10, 129).log_z;
        }
        case SelectId::Exponential: {
            if (mn < 0) return neg_inf;
            double log_p = -std::log(std::log(100.0));
            auto g = [&](const std::vector<double>& p) {
                double lam = p[0];
                return log_p - std::log(lam) + Nd * std::log(lam) - lam * sum;
            };
            return integrate_log(g, Box{{0.1}, {10}}, 1e-10, 257).log_z;
        }
        case SelectId::Uniform: {
            if (mn < 0 || mx > 10) return neg_inf;
            // int_max^10 (1/10) L^-N dL, closed form
            double a = std::pow(mx, 1 - Nd) - std::pow(10.0, 1 - Nd);
            return -std::log(10.0) + std::log(a / (Nd - 1));
        }
        default: break;
    }
    throw std::logic_error("unreachable");
}

/** posterior over the five families, Z_I / sum_J Z_J */
inline std::vector<double> model_posteriors(const Dataset& data, PriorMode mode)
{
    std::vector<SelectModel> models = selection_models();
    std::vector<double> lz(models.size());
    for (std::size_t i = 0; i < models.size(); ++i) {
        lz[i] = selection_log_evidence(models[i].id, mode, data);
    }
    double total = log_sum_exp(lz);
    if (total == neg_inf) {
        throw DivergenceError("all model evidences vanished: posterior undefined");
    }
    std::vector<double> post(models.size());
    for (std::size_t i = 0; i < models.size(); ++i) {
        post[i] = std::exp(lz[i] - total);
    }
    return post;
}

struct PosteriorMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<double>> mean;   // [generator][inferencer]
    std::vector<std::vector<double>> stderr_; // matching standard errors
    long N = 0;
    long replicates = 0;
    std::uint64_t seed = 0;
    PriorMode mode = PriorMode::gpi;
};

/** replicate-averaged posterior matrix over the five generators */
inline PosteriorMatrix run_fig6(PriorMode mode, long N, long replicates,
                                std::uint64_t seed, int jobs = 0)
{
    std::vector<SelectModel> models = selection_models();
    std::size_t M = models.size();
    PosteriorMatrix out;
    for (const SelectModel& m : models) out.names.push_back(m.name);
    out.N = N;
    out.replicates = replicates;
    out.seed = seed;
    out.mode = mode;
    out.mean.assign(M, std::vector<double>(M, 0.0));
    out.stderr_.assign(M, std::vector<double>(M, 0.0));

    for (std::size_t g = 0; g < M; ++g) {
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(replicates));
        parallel_for(replicates, resolve_jobs(jobs), [&](long r) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r),
                                static_cast<std::uint64_t>(g)));
            Dataset data = simulate_dataset(models[g].id, N, rng);
            std::vector<double> post = model_posteriors(data, mode);
            double s = 0;
            for (double p : post) s += p;
            if (std::abs(s - 1) > 1e-9) {
                throw DivergenceError("posterior row does not normalize");
            }
            rows[static_cast<std::size_t>(r)] = post;
        });
        for (std::size_t j = 0; j < M; ++j) {
            double m1 = 0;
            for (const auto& row : rows) m1 += row[j];
            m1 /= static_cast<double>(replicates);
            double var = 0;
            for (const auto& row : rows) var += (row[j] - m1) * (row[j] - m1);
            var /= static_cast<double>(replicates - 1);
            out.mean[g][j] = m1;
            out.stderr_[g][j] = std::sqrt(var / static_cast<double>(replicates));
        }
    }
    return out;
}

struct AicResult {
    double value = 0;
    bool boundary = false; // MLE pinned to the support boundary
};

/** AIC in nats: -log q(x^N | theta_hat) + K */
inline AicResult aic(SelectId id, const Dataset& data)
{
    double N = static_cast<double>(data.size());
    double mean, ssd, sum, mx, mn;
    detail::scalar_moments(data, mean, ssd, sum, mx, mn);
    AicResult out;
    switch (id) {
        case SelectId::PointNormal:
            out.value = -detail::point_normal_log_lik(data);
            return out;
        case SelectId::NormalMu:
            out.value = (N / 2) * log_2pi + ssd / 2 + 1;
            return out;
        case SelectId::NormalMuSigma: {
            double s2 = ssd / N;
            out.value = (N / 2) * std::log(2 * pi * s2) + N / 2 + 2;
            return out;
        }
        case SelectId::Exponential: {
            if (mn < 0) throw InvalidInputError("exponential MLE needs x >= 0");
            double lam = N / sum;
            out.value = -N * std::log(lam) + N + 1;
            return out;
        }
        case SelectId::Uniform: {
            if (mn < 0) throw InvalidInputError("uniform MLE needs x >= 0");
            out.value = N * std::log(mx) + 1;
            out.boundary = true; // MLE sits on the order statistic
            return out;
        }
    }
    throw std::logic_error("unreachable");
}

struct LindleyThreshold {
    double factor = 0;    // threshold in units of delta mu
    double threshold = 0; // absolute |mu hat|
    bool defined = true;
    double log_m = 0;
};

enum class LindleyMode { gpi, normalized };

/**
 * Detection threshold for mu != 0 against mu = 0 on a window of length L:
 * sqrt(2) delta-mu under the GPI prior, sqrt(2 log M) delta-mu under the
 * normalized flat prior with log M = log[(L/delta-mu) (2 pi)^{-1/2}].
 */
inline LindleyThreshold lindley_threshold(double L, double sigma, double N,
                                          LindleyMode mode)
{
    if (!(L > 0) || !(sigma > 0) || !(N > 0)) {
        throw InvalidInputError("lindley_threshold: L, sigma, N must be > 0");
    }
    double dmu = sigma / std::sqrt(N);
    LindleyThreshold out;
    if (mode == LindleyMode::gpi) {
        out.factor = std::sqrt(2.0);
        out.threshold = out.factor * dmu;
        out.log_m = std::log(L / dmu) - 0.5 * log_2pi;
        return out;
    }
    out.log_m = std::log(L / dmu) - 0.5 * log_2pi;
    if (out.log_m <= 0) {
        out.defined = false;
        return out;
    }
    out.factor = std::sqrt(2 * out.log_m);
    out.threshold = out.factor * dmu;
    return out;
}

/**
 * Brute-force crossing point: smallest |mu hat| where the evidence of the
 * unknown-mean model exceeds the mu = 0 model, scanned on a grid in units
 * of delta-mu. Only the sufficient statistic mu hat enters the ratio.
 */
inline double lindley_crossing_scan(double L, double sigma, double N,
                                    LindleyMode mode, double step = 0.002,
                                    double lo = 0.5, double hi = 8.0)
{
    double dmu = sigma / std::sqrt(N);
    auto log_ratio = [&](double mu_hat) {
        // log Z1 - log Z0 = log int prior(mu) exp(-N (mu - mu_hat)^2 / 2 s^2
        //                                         + N mu_hat^2 / 2 s^2) dmu
        auto g = [&](const std::vector<double>& p) {
            double mu = p[0];
            double lp;
            if (mode == LindleyMode::gpi) {
                lp = 0.5 * std::log(N / (2 * pi * sigma * sigma)) -
                     effective_complexity_meanflat(N, 1);
            } else {
                lp = -std::log(L);
            }
            return lp - N * (mu - mu_hat) * (mu - mu_hat) / (2 * sigma * sigma) +
                   N * mu_hat * mu_hat / (2 * sigma * sigma);
        };
        Box box{{-L / 2}, {L / 2}};
        box = shrink_box(g, box);
        return integrate_log(g, box, 1e-11, 129).log_z;
    };
    double prev = log_ratio(lo * dmu);
    for (double f = lo + step; f <= hi; f += step) {
        double cur = log_ratio(f * dmu);
        if (prev <= 0 && cur > 0) {
            // linear interpolation inside the bracketing cell
            double frac = -prev / (cur - prev);
            return (f - step + frac * step) * dmu;
        }
        prev = cur;
    }
    throw DivergenceError("no evidence crossing found in scan window");
}

} // namespace thermo

#endif
