#ifndef THERMO_IO_HPP
#define THERMO_IO_HPP

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gpi.hpp"
#include "selection.hpp"
#include "types.hpp"

namespace thermo {

inline constexpr const char* tool_version = "0.1.0";

namespace detail {

inline std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline void write_header(std::ostream& os, const std::string& config)
{
    os << "# config: " << config << " version=" << tool_version << "\n";
}

} // namespace detail

/** model,theta0,N,replicates,seed,Fbar,Fse,Ubar,Use,Cbar,Cse,Sbar,Sse */
inline void write_thermo_csv(std::ostream& os, const std::string& config,
                             const std::string& model,
                             const std::string& theta0,
                             const std::vector<ThermoReport>& rows)
{
    detail::write_header(os, config);
    os << "model,theta0,N,replicates,seed,Fbar,Fse,Ubar,Use,Cbar,Cse,Sbar,Sse\n";
    for (const ThermoReport& r : rows) {
        os << model << ',' << theta0 << ',' << r.N << ',' << r.replicates << ','
           << r.seed << ',' << detail::fmt(r.Fbar) << ',' << detail::fmt(r.Fse)
           << ',' << detail::fmt(r.Ubar) << ',' << detail::fmt(r.Use) << ','
           << detail::fmt(r.Cbar) << ',' << detail::fmt(r.Cse) << ','
           << detail::fmt(r.Sbar) << ',' << detail::fmt(r.Sse) << "\n";
    }
}

inline nlohmann::json thermo_json(const std::string& config,
                                  const std::string& model,
                                  const std::string& theta0,
                                  const std::vector<ThermoReport>& rows)
{
    nlohmann::json out;
    out["config"] = config;
    out["version"] = tool_version;
    out["model"] = model;
    out["theta0"] = theta0;
    out["rows"] = nlohmann::json::array();
    for (const ThermoReport& r : rows) {
        out["rows"].push_back({{"N", r.N},
                               {"replicates", r.replicates},
                               {"seed", r.seed},
                               {"Fbar", r.Fbar},
                               {"Fse", r.Fse},
                               {"Ubar", r.Ubar},
                               {"Use", r.Use},
                               {"Cbar", r.Cbar},
                               {"Cse", r.Cse},
                               {"Sbar", r.Sbar},
                               {"Sse", r.Sse}});
    }
    return out;
}

/** theta,logw,iteration,maxAbsS — lossless round trip */
inline void write_prior_csv(std::ostream& os, const std::string& config,
                            const GpiPrior& prior)
{
    detail::write_header(os, config);
    os << "theta,logw,iteration,maxAbsS\n";
    long iters = static_cast<long>(prior.convergence_trace.size());
    for (std::size_t i = 0; i < prior.grid_theta.size(); ++i) {
        os << detail::fmt(prior.grid_theta[i]) << ','
           << detail::fmt(prior.log_w[i]) << ',' << iters << ','
           << detail::fmt(prior.max_abs_s) << "\n";
    }
}

inline GpiPrior read_prior_csv(std::istream& is)
{
    GpiPrior out;
    out.base = "file";
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 4) throw InvalidInputError("bad prior CSV row: " + line);
        out.grid_theta.push_back(std::stod(cells[0]));
        out.log_w.push_back(std::stod(cells[1]));
        out.max_abs_s = std::stod(cells[3]);
    }
    if (out.grid_theta.empty()) throw InvalidInputError("empty prior CSV");
    return out;
}

/** generator,inferencer,meanPosterior,stderr,replicates,N,seed,priorMode */
inline void write_matrix_csv(std::ostream& os, const std::string& config,
                             const PosteriorMatrix& matrix)
{
    detail::write_header(os, config);
    os << "generator,inferencer,meanPosterior,stderr,replicates,N,seed,priorMode\n";
    for (std::size_t g = 0; g < matrix.names.size(); ++g) {
        for (std::size_t j = 0; j < matrix.names.size(); ++j) {
            os << matrix.names[g] << ',' << matrix.names[j] << ','
               << detail::fmt(matrix.mean[g][j]) << ','
               << detail::fmt(matrix.stderr_[g][j]) << ',' << matrix.replicates
               << ',' << matrix.N << ',' << matrix.seed << ','
               << prior_mode_name(matrix.mode) << "\n";
        }
    }
}

struct OracleSweepRow {
    std::string kind;
    double N = 0;
    double Fbar = 0, Ubar = 0, Cbar = 0, Sbar = 0;
    double Keff = 0;
};

/** kind,N,Fbar,Ubar,Cbar,Sbar,Keff */
inline void write_oracle_csv(std::ostream& os, const std::string& config,
                             const std::vector<OracleSweepRow>& rows)
{
    detail::write_header(os, config);
    os << "kind,N,Fbar,Ubar,Cbar,Sbar,Keff\n";
    for (const OracleSweepRow& r : rows) {
        os << r.kind << ',' << detail::fmt(r.N) << ',' << detail::fmt(r.Fbar)
           << ',' << detail::fmt(r.Ubar) << ',' << detail::fmt(r.Cbar) << ','
           << detail::fmt(r.Sbar) << ',' << detail::fmt(r.Keff) << "\n";
    }
}

inline void write_file(const std::string& path, const std::string& content)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidInputError("cannot open output file: " + path);
    os << content;
}

} // namespace thermo

#endif
