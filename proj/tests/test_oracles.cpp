#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "thermo/core.hpp"
#include "thermo/oracles.hpp"

using namespace thermo;

TEST_CASE("correspondence table closed forms", "[oracles]")
{
    // free particle and normal prior share one formula under the dictionary
    for (double x : {5.0, 40.0, 1000.0}) {
        AnalyticThermo fp = table2_thermo(Table2Kind::FreeParticle, 3, 0.7, 2.0, x);
        AnalyticThermo np = table2_thermo(Table2Kind::NormalPrior, 3, 0.7, 2.0, x);
        CHECK(fp.Fbar == Catch::Approx(np.Fbar).epsilon(1e-12));
        CHECK(fp.Ubar == Catch::Approx(np.Ubar).epsilon(1e-12));
        CHECK(fp.Cbar == np.Cbar);
        CHECK(fp.Sbar == Catch::Approx(np.Sbar).epsilon(1e-12));
        // heat capacity is K/2 independent of x
        CHECK(np.Cbar == Catch::Approx(1.5).epsilon(1e-14));
        // thermodynamic identity S = x (U - F)
        CHECK(np.Sbar == Catch::Approx(x * (np.Ubar - np.Fbar)).epsilon(1e-10));
    }
    AnalyticThermo sing = table2_thermo(Table2Kind::SingularAsym, 0.8, 0.0, 1.0, 50.0);
    CHECK(sing.Cbar == Catch::Approx(0.4).epsilon(1e-14));
    CHECK(sing.Sbar == Catch::Approx(-0.4 * std::log(50.0)).epsilon(1e-12));
    CHECK_THROWS_AS(table2_thermo(Table2Kind::NormalPrior, 1, 0, 1, 0.0),
                    std::invalid_argument);
}

TEST_CASE("learning capacities: frozen references", "[oracles]")
{
    CHECK(conjugate_learning_capacity(1, 100, 1) ==
          Catch::Approx(0.49014802470346045).epsilon(1e-12));
    // K/2 limit at large N
    CHECK(conjugate_learning_capacity(4, 1e7, 1) == Catch::Approx(2.0).epsilon(1e-6));
    CHECK(exponential_learning_capacity(7) ==
          Catch::Approx(0.54723851414080662).epsilon(1e-12));
    CHECK(exponential_learning_capacity(1e6) == Catch::Approx(0.5).epsilon(1e-5));
    // mean+variance capacity: anomalous peak near N = 1, D+1 per-halves tail
    CHECK(meanvar_learning_capacity(1, 10) ==
          Catch::Approx(1.2914214066058262).epsilon(1e-11));
    CHECK(meanvar_learning_capacity(1, 1.001) == Catch::Approx(2.004e9).epsilon(0.01));
    CHECK(meanvar_learning_capacity(1, 1e6) ==
          Catch::Approx(1.0000021666726667).epsilon(1e-11));
}

TEST_CASE("effective complexities and prior normalizations", "[oracles]")
{
    for (double N : {1.0, 10.0, 1e4}) {
        CHECK(effective_complexity(ComplexityKind::NormalMeanFlat, N, 3) ==
              Catch::Approx(1.5 * (1 + N * std::log1p(1 / N))).epsilon(1e-13));
    }
    CHECK(effective_complexity(ComplexityKind::NormalMeanFlat, 1e8, 2) ==
          Catch::Approx(2.0).epsilon(1e-7));
    CHECK(effective_complexity(ComplexityKind::Exponential, 1e6) ==
          Catch::Approx(1.0).epsilon(1e-4));
    CHECK(effective_complexity(ComplexityKind::Exponential, 5.0) ==
          Catch::Approx(1 + binet(5.0)).epsilon(1e-13));
    for (double N : {1.0, 7.0, 200.0}) {
        CHECK(uniform_gpi_log_c(N) ==
              Catch::Approx(std::log(N) - N * std::log1p(1 / N) - 1).epsilon(1e-13));
        CHECK(effective_complexity(ComplexityKind::UniformSupport, N) ==
              Catch::Approx(1 + N * std::log1p(1 / N)).epsilon(1e-13));
    }
    // mean+variance complexity diverges at N = 1 and approaches D+1
    CHECK(std::isinf(effective_complexity(ComplexityKind::NormalMeanVar, 1.0, 1)));
    CHECK(effective_complexity(ComplexityKind::NormalMeanVar, 1e7, 2) ==
          Catch::Approx(3.0).epsilon(1e-5));
}

TEST_CASE("discrete-convention thermodynamics are internally consistent",
          "[oracles]")
{
    ZooModel zoo = make_normal_conjugate(2, 1.0, 1.5, {0.3, -0.4});
    ParamPoint th{{0.9, 0.1}, {}};
    for (long N : {5L, 40L, 300L}) {
        AnalyticThermo t = analytic_thermo_discrete(zoo, th, N);
        double gm = analytic_gbar(zoo, th, static_cast<double>(N - 1));
        double g0 = analytic_gbar(zoo, th, static_cast<double>(N));
        double gp = analytic_gbar(zoo, th, static_cast<double>(N + 1));
        CHECK(t.Fbar == Catch::Approx(g0 / N).epsilon(1e-12));
        CHECK(t.Ubar == Catch::Approx(gp - g0).epsilon(1e-12));
        CHECK(t.Sbar == Catch::Approx(N * (t.Ubar - t.Fbar)).margin(1e-9));
        CHECK(t.Cbar ==
              Catch::Approx(-static_cast<double>(N) * N * (gp - 2 * g0 + gm))
                  .margin(1e-9));
        // the closed form is the prior-averaged capacity: with a fixed theta0
        // the N0 N / (N + N0) deviation term adds an O(1/N) correction
        AnalyticThermo ta = analytic_thermo_discrete(zoo, th, N, true);
        CHECK(ta.Cbar ==
              Catch::Approx(conjugate_capacity_discrete(2, N, zoo.N0)).margin(1e-7));
        CHECK(std::abs(t.Cbar - ta.Cbar) < 10.0 / static_cast<double>(N));
    }
}

TEST_CASE("discrete capacity approaches the continuous derivative", "[oracles]")
{
    CHECK(conjugate_capacity_discrete(1, 5000, 1.0) ==
          Catch::Approx(conjugate_learning_capacity(1, 5000, 1.0)).epsilon(1e-6));
}

TEST_CASE("oracle matches the sampling estimator within errors", "[oracles]")
{
    DisorderConfig cfg;
    cfg.replicates = 2000;
    cfg.seed = 1234;
    cfg.jobs = 0;

    struct Case {
        ZooModel zoo;
        ParamPoint th;
    };
    std::vector<Case> cases;
    cases.push_back({make_normal_conjugate(1, 1.0, 1.0, {0.0}), {{0.8}, {}}});
    cases.push_back({make_normal_meanflat(2, 1.0), {{0.3, -1.0}, {}}});
    cases.push_back({make_exponential(), {{2.0}, {}}});
    cases.push_back({make_uniform(4.0), {{4.0}, {}}});
    for (Case& c : cases) {
        ThermoReport rep = disorder_average(c.zoo, c.th, 20, cfg);
        AnalyticThermo exact = analytic_thermo_discrete(c.zoo, c.th, 20);
        INFO(c.zoo.name);
        CHECK(rep.Fbar == Catch::Approx(exact.Fbar).margin(3 * rep.Fse));
        CHECK(rep.Ubar == Catch::Approx(exact.Ubar).margin(3 * rep.Use));
        CHECK(rep.Cbar == Catch::Approx(exact.Cbar).margin(3 * rep.Cse));
        CHECK(rep.Sbar == Catch::Approx(exact.Sbar).margin(3 * rep.Sse));
    }
}

TEST_CASE("sufficient-statistic free energies", "[oracles]")
{
    ZooModel disc = make_normal_discrete(1, 1.0);
    ParamPoint th0{{}, {0}};
    for (double N : {5.0, 120.0}) {
        CHECK(sufficient_free_energy(disc, th0, N) ==
              Catch::Approx(analytic_gbar(disc, th0, N) / N).epsilon(1e-12));
    }
    ZooModel pois = make_poisson_stoich(10.0);
    ParamPoint thp{{}, {1}};
    double f = sufficient_free_energy(pois, thp, 10.0);
    CHECK(std::isfinite(f));
    ZooModel exp = make_exponential();
    CHECK_THROWS_AS(sufficient_free_energy(exp, ParamPoint{{1.0}, {}}, 5.0),
                    NotSupportedError);
}
