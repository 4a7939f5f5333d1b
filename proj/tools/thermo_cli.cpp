#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thermo/core.hpp"
#include "thermo/gpi.hpp"
#include "thermo/io.hpp"
#include "thermo/mixture.hpp"
#include "thermo/models.hpp"
#include "thermo/oracles.hpp"
#include "thermo/selection.hpp"

namespace {

using namespace thermo;

std::vector<long> parse_n_list(const std::string& text)
{
    std::vector<long> out;
    auto dots = text.find("..");
    if (dots != std::string::npos) {
        long a = std::stol(text.substr(0, dots));
        long b = std::stol(text.substr(dots + 2));
        if (b < a) throw InvalidInputError("bad range: " + text);
        for (long n = a; n <= b; ++n) out.push_back(n);
    } else {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(std::stol(item));
    }
    if (out.empty()) throw InvalidInputError("empty N list");
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i] <= out[i - 1]) {
            throw InvalidInputError("N list must be strictly increasing");
        }
    }
    return out;
}

std::map<std::string, double> registry_params(const std::string& spec)
{
    std::map<std::string, double> kv;
    auto colon = spec.find(':');
    if (colon == std::string::npos) return kv;
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq != std::string::npos) {
            kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        }
    }
    return kv;
}

ParamPoint default_theta0(const ZooModel& zoo, const std::string& theta0_text,
                          const std::map<std::string, double>& kv)
{
    ParamPoint th;
    std::vector<double> vals;
    if (!theta0_text.empty()) {
        std::stringstream ss(theta0_text);
        std::string item;
        while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
    }
    std::size_t nc = zoo.model.param_space.continuous.size();
    std::size_t nd = zoo.model.param_space.discrete.size();
    if (!vals.empty() && vals.size() != nc + nd) {
        throw InvalidInputError("theta0 length does not match parameter count");
    }
    for (std::size_t j = 0; j < nc; ++j) {
        double v;
        if (!vals.empty()) {
            v = vals[j];
        } else if (zoo.id == ZooId::NormalConjugate) {
            v = zoo.mu_p[j];
        } else if (zoo.model.param_space.continuous[j].lo == 0) {
            v = 1; // scale coordinate
        } else {
            v = 0;
        }
        th.continuous.push_back(v);
    }
    for (std::size_t j = 0; j < nd; ++j) {
        long v = 1;
        if (!vals.empty()) {
            v = static_cast<long>(std::llround(vals[nc + j]));
        } else if (kv.count("m0")) {
            v = static_cast<long>(std::llround(kv.at("m0")));
        }
        th.discrete.push_back(v);
    }
    return th;
}

std::string theta0_text_of(const ParamPoint& th)
{
    std::ostringstream os;
    bool first = true;
    for (double v : th.continuous) {
        if (!first) os << ';';
        os << v;
        first = false;
    }
    for (long v : th.discrete) {
        if (!first) os << ';';
        os << v;
        first = false;
    }
    return os.str();
}

void emit(const std::string& output, const std::string& content)
{
    if (output.empty() || output == "-") {
        std::cout << content;
    } else {
        write_file(output, content);
    }
}

// deterministic thermodynamics of the Poisson problem: t plays the role of N
ThermoReport poisson_report(const ZooModel& zoo, long m0, double t)
{
    auto g = [&](double tt) {
        double mu = m0 * tt;
        return -poisson_expected_log_z(tt, static_cast<double>(m0), zoo.b) -
               poisson_count_entropy(mu);
    };
    double h = 0.01 * t;
    double d1 = (g(t + h) - g(t - h)) / (2 * h);
    double d2 = (g(t + h / 2) - g(t - h / 2)) / h;
    double gp = (4 * d2 - d1) / 3;
    ThermoReport rep;
    rep.N = static_cast<long>(std::llround(t));
    rep.Fbar = g(t) / t;
    rep.Ubar = gp;
    rep.Cbar = poisson_capacity(t, static_cast<double>(m0), zoo.b);
    rep.Sbar = t * gp - g(t);
    return rep;
}

int cmd_thermo(const std::string& model_spec, const std::string& theta0_text,
               const std::string& n_text, long replicates, std::uint64_t seed,
               int jobs, bool theta0_from_prior, const std::string& output,
               const std::string& format)
{
    ZooModel zoo = parse_registry(model_spec);
    std::map<std::string, double> kv = registry_params(model_spec);
    ParamPoint th = default_theta0(zoo, theta0_text, kv);
    std::vector<long> ns = parse_n_list(n_text);
    std::vector<ThermoReport> rows;
    for (long n : ns) {
        if (zoo.id == ZooId::PoissonStoich) {
            double t = ns.size() == 1 && kv.count("t") ? zoo.t
                                                       : static_cast<double>(n);
            ThermoReport rep = poisson_report(zoo, th.discrete[0], t);
            rep.seed = seed;
            rows.push_back(rep);
        } else if (zoo.id == ZooId::NormalDiscreteMean) {
            AnalyticThermo at = analytic_thermo_discrete(zoo, th, n);
            ThermoReport rep;
            rep.N = n;
            rep.seed = seed;
            rep.Fbar = at.Fbar;
            rep.Ubar = at.Ubar;
            rep.Cbar = at.Cbar;
            rep.Sbar = at.Sbar;
            rows.push_back(rep);
        } else {
            DisorderConfig cfg;
            cfg.replicates = replicates;
            cfg.seed = seed;
            cfg.jobs = jobs;
            cfg.theta0_from_prior = theta0_from_prior;
            rows.push_back(disorder_average(zoo, th, n, cfg));
        }
    }
    std::ostringstream config;
    config << "thermo model=" << model_spec << " N=" << n_text
           << " replicates=" << replicates << " seed=" << seed;
    std::string t0 = theta0_text_of(th);
    if (format == "json") {
        emit(output, thermo_json(config.str(), zoo.name, t0, rows).dump(2) + "\n");
    } else {
        std::ostringstream os;
        write_thermo_csv(os, config.str(), zoo.name, t0, rows);
        emit(output, os.str());
    }
    return 0;
}

int cmd_gpi(const std::string& model_spec, const std::string& n_text,
            const std::string& grid_text, bool recursive,
            const std::string& output)
{
    ZooModel zoo = parse_registry(model_spec);
    std::ostringstream config;
    config << "gpi model=" << model_spec << " N=" << n_text;
    if (recursive) {
        if (grid_text.empty()) throw InvalidInputError("--recursive needs --grid");
        auto eq = grid_text.find('=');
        std::string range = eq == std::string::npos ? grid_text
                                                    : grid_text.substr(eq + 1);
        std::vector<long> pts = parse_n_list(range);
        std::vector<double> grid, log_w0;
        for (long p : pts) {
            grid.push_back(static_cast<double>(p));
            log_w0.push_back(0.0);
        }
        if (!zoo.sbar_on_grid) {
            throw NotSupportedError("model has no grid entropy route");
        }
        long n = parse_n_list(n_text)[0];
        GpiPrior prior = gpi_recursive(zoo.sbar_on_grid, grid, log_w0, n);
        config << " grid=" << grid_text << " recursive=1"
               << " earlyStopped=" << (prior.early_stopped ? 1 : 0);
        std::ostringstream os;
        write_prior_csv(os, config.str(), prior);
        emit(output, os.str());
        return 0;
    }
    ComplexityKind kind;
    switch (zoo.id) {
        case ZooId::NormalMeanFlat: kind = ComplexityKind::NormalMeanFlat; break;
        case ZooId::NormalMeanVar: kind = ComplexityKind::NormalMeanVar; break;
        case ZooId::Exponential: kind = ComplexityKind::Exponential; break;
        case ZooId::UniformSupport: kind = ComplexityKind::UniformSupport; break;
        default:
            throw NotSupportedError("no closed-form GPI route for " + zoo.name);
    }
    std::vector<OracleSweepRow> rows;
    for (long n : parse_n_list(n_text)) {
        OracleSweepRow row;
        row.kind = zoo.name;
        row.N = static_cast<double>(n);
        row.Keff = effective_complexity(kind, static_cast<double>(n), zoo.D);
        rows.push_back(row);
    }
    std::ostringstream os;
    write_oracle_csv(os, config.str(), rows);
    emit(output, os.str());
    return 0;
}

int cmd_select(const std::string& mode_text, long n, long replicates,
               std::uint64_t seed, int jobs, bool lindley, double L,
               double sigma, const std::string& output)
{
    std::ostringstream config;
    if (lindley) {
        config << "select lindley L=" << L << " sigma=" << sigma << " N=" << n;
        LindleyThreshold g = lindley_threshold(L, sigma, static_cast<double>(n),
                                               LindleyMode::gpi);
        LindleyThreshold nm = lindley_threshold(L, sigma, static_cast<double>(n),
                                                LindleyMode::normalized);
        std::ostringstream os;
        os << "# config: " << config.str() << " version=" << tool_version << "\n";
        os << "mode,factor,threshold,logM,defined\n";
        os << "gpi," << g.factor << ',' << g.threshold << ',' << g.log_m << ",1\n";
        os << "normalized," << nm.factor << ',' << nm.threshold << ','
           << nm.log_m << ',' << (nm.defined ? 1 : 0) << "\n";
        emit(output, os.str());
        return 0;
    }
    PriorMode mode;
    if (mode_text == "gpi") {
        mode = PriorMode::gpi;
    } else if (mode_text == "normalized") {
        mode = PriorMode::normalizedJeffreys;
    } else if (mode_text == "informative") {
        mode = PriorMode::informativeFixedSupport;
    } else {
        throw InvalidInputError("unknown prior mode: " + mode_text);
    }
    config << "select mode=" << mode_text << " N=" << n
           << " replicates=" << replicates << " seed=" << seed;
    PosteriorMatrix matrix = run_fig6(mode, n, replicates, seed, jobs);
    std::ostringstream os;
    write_matrix_csv(os, config.str(), matrix);
    emit(output, os.str());
    return 0;
}

int cmd_oracle_check(const std::string& model_spec,
                     const std::string& theta0_text, const std::string& n_text,
                     long replicates, std::uint64_t seed, int jobs,
                     double sigma_override, const std::string& output)
{
    ZooModel zoo = parse_registry(model_spec);
    std::map<std::string, double> kv = registry_params(model_spec);
    ParamPoint th = default_theta0(zoo, theta0_text, kv);
    std::ostringstream os;
    os << "# config: oracle-check model=" << model_spec << " N=" << n_text
       << " replicates=" << replicates << " seed=" << seed
       << " version=" << tool_version << "\n";
    os << "quantity,N,mc,analytic,stderr,z\n";
    bool failed = false;
    for (long n : parse_n_list(n_text)) {
        DisorderConfig cfg;
        cfg.replicates = replicates;
        cfg.seed = seed;
        cfg.jobs = jobs;
        ThermoReport mc = disorder_average(zoo, th, n, cfg);
        ZooModel oracle_zoo = zoo;
        if (sigma_override > 0) oracle_zoo.sigma = sigma_override;
        AnalyticThermo exact = analytic_thermo_discrete(oracle_zoo, th, n);
        struct Row {
            const char* name;
            double mc, exact, se;
        } entries[4] = {{"Fbar", mc.Fbar, exact.Fbar, mc.Fse},
                        {"Ubar", mc.Ubar, exact.Ubar, mc.Use},
                        {"Cbar", mc.Cbar, exact.Cbar, mc.Cse},
                        {"Sbar", mc.Sbar, exact.Sbar, mc.Sse}};
        for (const Row& e : entries) {
            double z = e.se > 0 ? (e.mc - e.exact) / e.se : 0;
            if (std::abs(z) > 4) failed = true;
            os << e.name << ',' << n << ',' << e.mc << ',' << e.exact << ','
               << e.se << ',' << z << "\n";
        }
    }
    emit(output, os.str());
    return failed ? 1 : 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"thermodynamic inference toolkit"};
    app.require_subcommand(1);

    std::string model, theta0_text, n_text = "100", output, format = "csv";
    std::string grid_text, mode_text = "gpi";
    long replicates = 1000, n_select = 20;
    std::uint64_t seed = 1;
    int jobs = 0;
    bool theta0_from_prior = false, recursive = false, lindley = false;
    double L = 100, sigma = 1, sigma_override = 0;

    CLI::App* thermo_cmd = app.add_subcommand("thermo", "disorder-averaged sweep");
    thermo_cmd->add_option("--model", model, "registry string")->required();
    thermo_cmd->add_option("--theta0", theta0_text, "comma-separated truth");
    thermo_cmd->add_option("--N", n_text, "range a..b or list");
    thermo_cmd->add_option("--replicates", replicates);
    thermo_cmd->add_option("--seed", seed);
    thermo_cmd->add_option("--jobs", jobs);
    thermo_cmd->add_flag("--theta0-from-prior", theta0_from_prior);
    thermo_cmd->add_option("--output,-o", output);
    thermo_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

    CLI::App* gpi_cmd = app.add_subcommand("gpi", "GPI prior solving");
    gpi_cmd->add_option("--model", model)->required();
    gpi_cmd->add_option("--N", n_text);
    gpi_cmd->add_option("--grid", grid_text, "axis=a..b for the recursive solver");
    gpi_cmd->add_flag("--recursive", recursive);
    gpi_cmd->add_option("--output,-o", output);

    CLI::App* select_cmd = app.add_subcommand("select", "model-identity experiment");
    select_cmd->add_option("--mode", mode_text, "gpi|normalized|informative");
    select_cmd->add_option("--N", n_select);
    select_cmd->add_option("--replicates", replicates);
    select_cmd->add_option("--seed", seed);
    select_cmd->add_option("--jobs", jobs);
    select_cmd->add_flag("--lindley", lindley);
    select_cmd->add_option("--L", L);
    select_cmd->add_option("--sigma", sigma);
    select_cmd->add_option("--output,-o", output);

    CLI::App* oracle_cmd = app.add_subcommand("oracle-check", "MC vs analytic");
    oracle_cmd->add_option("--model", model)->required();
    oracle_cmd->add_option("--theta0", theta0_text);
    oracle_cmd->add_option("--N", n_text);
    oracle_cmd->add_option("--replicates", replicates);
    oracle_cmd->add_option("--seed", seed);
    oracle_cmd->add_option("--jobs", jobs);
    oracle_cmd->add_option("--oracle-sigma", sigma_override,
                           "override oracle sigma (negative control)");
    oracle_cmd->add_option("--output,-o", output);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // usage problems exit 2, help exits 0
    }

    try {
        if (thermo_cmd->parsed()) {
            return cmd_thermo(model, theta0_text, n_text, replicates, seed, jobs,
                              theta0_from_prior, output, format);
        }
        if (gpi_cmd->parsed()) {
            return cmd_gpi(model, n_text, grid_text, recursive, output);
        }
        if (select_cmd->parsed()) {
            return cmd_select(mode_text, n_select, replicates, seed, jobs,
                              lindley, L, sigma, output);
        }
        if (oracle_cmd->parsed()) {
            return cmd_oracle_check(model, theta0_text, n_text, replicates, seed,
                                    jobs, sigma_override, output);
        }
    } catch (const thermo::InvalidInputError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
