#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>

#include "thermo/core.hpp"
#include "thermo/models.hpp"

using namespace thermo;

TEST_CASE("resolve_jobs precedence", "[core]")
{
    setenv("THERMO_JOBS", "3", 1);
    CHECK(resolve_jobs(0) == 3);
    CHECK(resolve_jobs(2) == 2);
    unsetenv("THERMO_JOBS");
    CHECK(resolve_jobs(0) >= 1);
}

TEST_CASE("parallel_for propagates exceptions and covers the range", "[core]")
{
    std::vector<int> hit(100, 0);
    parallel_for(100, 4, [&](long i) { hit[static_cast<std::size_t>(i)] = 1; });
    for (int h : hit) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, 4,
                                 [&](long i) {
                                     if (i == 7) throw DivergenceError("x");
                                 }),
                    DivergenceError);
}

TEST_CASE("evidence chain rule: log Z(x^N) - log Z(x^{N-1}) is predictive",
          "[core]")
{
    ZooModel zoo = make_normal_conjugate(1, 1.0, 2.0, {0.5});
    Rng rng(derive_seed(11, 0, 0));
    ParamPoint th{{1.2}, {}};
    Dataset data;
    for (long i = 0; i < 12; ++i) data.samples.push_back(zoo.model.sampler(th, rng));
    double n0 = zoo.N0;
    for (std::size_t n = 2; n <= data.size(); ++n) {
        Dataset head, tail;
        head.samples.assign(data.samples.begin(), data.samples.begin() + (n - 1));
        tail.samples.assign(data.samples.begin(), data.samples.begin() + n);
        double diff = zoo.model.exact_log_evidence(tail) -
                      zoo.model.exact_log_evidence(head);
        // conjugate predictive: N(mean_post, 1 + var_post)
        double s = 0;
        for (const Sample& x : head.samples) s += x[0];
        double m = (n0 * 0.5 + s) / (n0 + (n - 1));
        double v = 1 + 1 / (n0 + (n - 1));
        double x_new = data.samples[n - 1][0];
        double lp = -0.5 * std::log(2 * pi * v) - (x_new - m) * (x_new - m) / (2 * v);
        CHECK(diff == Catch::Approx(lp).epsilon(1e-10).margin(1e-10));
    }
}

TEST_CASE("quadrature evidence is reparametrization invariant", "[core]")
{
    ZooModel zoo = make_exponential();
    Rng rng(derive_seed(5, 0, 0));
    ParamPoint th{{2.0}, {}};
    Dataset data;
    for (long i = 0; i < 20; ++i) data.samples.push_back(zoo.model.sampler(th, rng));

    EvidenceEstimate direct = log_evidence(zoo, data, EvidenceMethod::quadrature);
    double closed = zoo.model.exact_log_evidence(data);
    CHECK(direct.log_z == Catch::Approx(closed).margin(1e-8 + direct.error_bound));

    // substitute u = log lambda; the prior c/lambda becomes flat in u
    ModelSpec log_model;
    log_model.obs_dim = 1;
    log_model.param_space.continuous.push_back({"u", neg_inf, pos_inf});
    log_model.log_likelihood = [](const Sample& x, const ParamPoint& p) {
        return p.continuous[0] - std::exp(p.continuous[0]) * x[0];
    };
    PriorSpec flat;
    flat.log_density = [](const ParamPoint&) { return 0.0; };
    QuadratureParams params;
    params.box = Box{{std::log(0.05)}, {std::log(50.0)}};
    EvidenceEstimate reparam = log_evidence(log_model, flat, data,
                                            EvidenceMethod::quadrature, params);
    CHECK(reparam.log_z == Catch::Approx(closed).margin(1e-7));
}

TEST_CASE("monte carlo evidence agrees with closed form", "[core]")
{
    ZooModel zoo = make_normal_conjugate(1, 1.0, 1.0);
    Rng rng(derive_seed(9, 0, 0));
    ParamPoint th{{0.3}, {}};
    Dataset data;
    for (long i = 0; i < 15; ++i) data.samples.push_back(zoo.model.sampler(th, rng));
    double closed = zoo.model.exact_log_evidence(data);
    QuadratureParams params;
    params.mc_draws = 400000;
    params.mc_seed = 77;
    EvidenceEstimate mc = log_evidence(zoo, data, EvidenceMethod::monteCarlo, params);
    CHECK(mc.log_z == Catch::Approx(closed).margin(5 * mc.error_bound));
    CHECK(mc.error_bound < 0.05);
}

TEST_CASE("disorder_average is deterministic and schedule independent", "[core]")
{
    ZooModel zoo = make_normal_conjugate(2, 1.0, 1.0);
    ParamPoint th{{0.0, 0.0}, {}};
    DisorderConfig cfg;
    cfg.replicates = 500;
    cfg.seed = 42;
    cfg.jobs = 1;
    ThermoReport a = disorder_average(zoo, th, 30, cfg);
    cfg.jobs = 4;
    ThermoReport b = disorder_average(zoo, th, 30, cfg);
    CHECK(a.Fbar == b.Fbar);
    CHECK(a.Cbar == b.Cbar);
    CHECK(a.Sse == b.Sse);
}

TEST_CASE("disorder_average input checks and divergence accounting", "[core]")
{
    ZooModel zoo = make_normal_conjugate(1, 1.0, 1.0);
    ParamPoint th{{0.0}, {}};
    DisorderConfig cfg;
    cfg.replicates = 1;
    CHECK_THROWS_AS(disorder_average(zoo, th, 10, cfg), InvalidInputError);
    cfg.replicates = 100;
    CHECK_THROWS_AS(disorder_average(zoo, th, 1, cfg), InvalidInputError);

    // every mean+variance replicate at N = 2 is divergent (needs N - 1 >= 2)
    ZooModel mv = make_normal_meanvar(1);
    ParamPoint thmv{{0.0, 1.0}, {}};
    CHECK_THROWS_AS(disorder_average(mv, thmv, 2, cfg), DivergenceError);
}

TEST_CASE("LOOCV energy and Gibbs entropy on one dataset", "[core]")
{
    ZooModel zoo = make_normal_conjugate(1, 1.0, 1.0);
    Rng rng(derive_seed(3, 0, 0));
    ParamPoint th{{0.0}, {}};
    Dataset data;
    for (long i = 0; i < 10; ++i) data.samples.push_back(zoo.model.sampler(th, rng));
    double u = avg_energy_loocv(zoo.model, zoo.prior, data);
    double f = -zoo.model.exact_log_evidence(data) / 10;
    double s = gibbs_entropy_sample(zoo.model, zoo.prior, data);
    CHECK(s == Catch::Approx(10 * (u - f)).epsilon(1e-12));
    CHECK(std::isfinite(u));
}

TEST_CASE("fisher information: closed form and numeric route agree", "[core]")
{
    ZooModel zoo = make_exponential();
    ParamPoint th{{2.5}, {}};
    std::vector<double> closed = fisher_information(zoo, th);
    ZooModel numeric = zoo;
    numeric.model.fisher = nullptr;
    std::vector<double> fd = fisher_information(numeric, th);
    CHECK(closed[0] == Catch::Approx(1 / (2.5 * 2.5)).epsilon(1e-12));
    CHECK(fd[0] == Catch::Approx(closed[0]).epsilon(1e-6));

    ZooModel uni = make_uniform(1.0);
    CHECK_THROWS_AS(fisher_information(uni, ParamPoint{{1.0}, {}}), NotDefinedError);
}

TEST_CASE("statistical resolution of the conjugate normal", "[core]")
{
    ZooModel zoo = make_normal_conjugate(2, 2.0, 1.0);
    std::vector<double> res = statistical_resolution(zoo, ParamPoint{{0.0, 0.0}, {}}, 25);
    CHECK(res[0] == Catch::Approx(2.0 / 5).epsilon(1e-12));
    CHECK(res[1] == Catch::Approx(2.0 / 5).epsilon(1e-12));
}
