#ifndef THERMO_TYPES_HPP
#define THERMO_TYPES_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"

namespace thermo {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double pos_inf = std::numeric_limits<double>::infinity();

using Sample = std::vector<double>;

struct Dataset {
    std::vector<Sample> samples;

    std::size_t size() const { return samples.size(); }
    std::size_t dim() const { return samples.empty() ? 0 : samples[0].size(); }
};

struct ParamPoint {
    std::vector<double> continuous;
    std::vector<long> discrete;
};

struct ContinuousDim {
    std::string name;
    double lo = neg_inf;
    double hi = pos_inf;
};

struct DiscreteDim {
    std::string name;
    double spacing = 1;
    long lo = std::numeric_limits<long>::min();
    long hi = std::numeric_limits<long>::max();
};

struct ParamSpace {
    std::vector<ContinuousDim> continuous;
    std::vector<DiscreteDim> discrete;

    std::size_t dim() const { return continuous.size() + discrete.size(); }
};

struct InvalidInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotDefinedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotSupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** One coupled draw of log Z at sizes N-1, N, N+1 (common random numbers). */
struct LogZTriple {
    double minus;
    double center;
    double plus;
};

struct ModelSpec {
    ParamSpace param_space;
    std::size_t obs_dim = 1;
    bool regular = true;

    std::function<double(const Sample&, const ParamPoint&)> log_likelihood;
    std::function<Sample(const ParamPoint&, Rng&)> sampler;

    std::function<std::vector<double>(const Dataset&)> sufficient_stat;
    // closed-form log evidence under the model's bundled prior
    std::function<double(const Dataset&)> exact_log_evidence;
    // distributional draw of the log-evidence triple, no dataset materialized
    std::function<LogZTriple(const ParamPoint&, long, Rng&)> log_evidence_triple;
    // deterministic E[log Z](theta0, N) when a series/statistic route exists
    std::function<double(const ParamPoint&, double)> expected_log_z;
    // closed-form Fisher information (row-major K x K), optional
    std::function<std::vector<double>(const ParamPoint&)> fisher;
    // closed-form cross entropy H(theta; theta0) = E_theta0[-log q(X|theta)]
    std::function<double(const ParamPoint&, const ParamPoint&)> cross_entropy;
};

struct PriorSpec {
    std::function<double(const ParamPoint&)> log_density;
    bool proper = false;
    std::optional<long> sample_size_tag;
    // draw theta ~ prior, available for proper conjugate priors
    std::function<ParamPoint(Rng&)> sampler;

    struct Grid {
        std::vector<double> points;      // 1-D grid over the (single) axis
        std::vector<double> log_weights; // log w at each point
    };
    std::optional<Grid> grid;
};

enum class EvidenceMethod { closedForm, quadrature, discreteSum, monteCarlo };

struct EvidenceEstimate {
    double log_z = neg_inf;
    EvidenceMethod method = EvidenceMethod::closedForm;
    double error_bound = 0;
};

struct ThermoReport {
    long N = 0;
    double Fbar = 0, Ubar = 0, Cbar = 0, Sbar = 0;
    double Fse = 0, Use = 0, Cse = 0, Sse = 0;
    long replicates = 0;
    std::uint64_t seed = 0;
    long divergent = 0;
};

} // namespace thermo

#endif
