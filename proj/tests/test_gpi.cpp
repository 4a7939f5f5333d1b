#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "thermo/gpi.hpp"

using namespace thermo;

namespace {

// forward-difference entropy under the model's own prior, from the exact
// disorder-averaged free energies
double sbar_forward(const ZooModel& zoo, const ParamPoint& th0, double N)
{
    double g0 = analytic_gbar(zoo, th0, N);
    double gp = analytic_gbar(zoo, th0, N + 1);
    return N * gp - (N + 1) * g0;
}

} // namespace

TEST_CASE("scaled jeffreys closed forms", "[gpi]")
{
    double N = 37.0, sig = 1.7;
    ZooModel flat = make_normal_meanflat(2, sig);
    CHECK(scaled_jeffreys(flat, ParamPoint{{0.4, -1.0}, {}}, N) ==
          Catch::Approx(std::pow(N / (2 * pi * sig * sig), 1.0)).epsilon(1e-12));

    ZooModel mv = make_normal_meanvar(1);
    double s = 0.6;
    CHECK(scaled_jeffreys(mv, ParamPoint{{0.0, s}, {}}, N) ==
          Catch::Approx(std::sqrt(2.0) * (N / (2 * pi * s * s))).epsilon(1e-12));

    ZooModel ex = make_exponential();
    double lam = 2.5;
    CHECK(scaled_jeffreys(ex, ParamPoint{{lam}, {}}, N) ==
          Catch::Approx(std::sqrt(N / (2 * pi)) / lam).epsilon(1e-12));
    // covariance: under u = log lambda the density is the flat-space value
    CHECK(scaled_jeffreys(ex, ParamPoint{{lam}, {}}, N) * lam ==
          Catch::Approx(std::sqrt(N / (2 * pi))).epsilon(1e-12));

    CHECK(gpi_asymptotic(ex, ParamPoint{{lam}, {}}, N) ==
          Catch::Approx(scaled_jeffreys(ex, ParamPoint{{lam}, {}}, N) / std::exp(1.0))
              .epsilon(1e-12));
}

TEST_CASE("symmetric GPI priors satisfy the entropy condition exactly", "[gpi]")
{
    for (long N : {1L, 3L, 25L, 400L}) {
        ZooModel flat = make_normal_meanflat(2, 1.3, N);
        CHECK(sbar_forward(flat, ParamPoint{{0.2, 0.9}, {}},
                           static_cast<double>(N)) == Catch::Approx(0.0).margin(1e-9));
        ZooModel ex = make_exponential(N);
        CHECK(sbar_forward(ex, ParamPoint{{1.8}, {}}, static_cast<double>(N)) ==
              Catch::Approx(0.0).margin(1e-9));
        ZooModel uni = make_uniform(5.0, N);
        CHECK(sbar_forward(uni, ParamPoint{{5.0}, {}}, static_cast<double>(N)) ==
              Catch::Approx(0.0).margin(1e-9));
        if (N >= 2) {
            ZooModel mv = make_normal_meanvar(1, N);
            CHECK(sbar_forward(mv, ParamPoint{{0.0, 1.4}, {}},
                               static_cast<double>(N)) ==
                  Catch::Approx(0.0).margin(1e-9));
        }
    }
    CHECK_THROWS_AS(gpi_exact_symmetric(GpiKind::NormalMeanVar, 1), DivergenceError);
}

TEST_CASE("symmetric GPI prior normalizations match their printed forms", "[gpi]")
{
    long N = 50;
    GpiPrior uni = gpi_exact_symmetric(GpiKind::UniformSupport, N);
    double Nd = static_cast<double>(N);
    CHECK(uni.log_c ==
          Catch::Approx(std::log(Nd) - Nd * std::log1p(1 / Nd) - 1).epsilon(1e-12));
    CHECK(uni.log_density(ParamPoint{{2.0}, {}}) ==
          Catch::Approx(uni.log_c - std::log(2.0)).epsilon(1e-12));
    CHECK(uni.log_density(ParamPoint{{-1.0}, {}}) == neg_inf);

    GpiPrior ex = gpi_exact_symmetric(GpiKind::Exponential, N);
    CHECK(ex.log_c ==
          Catch::Approx(0.5 * std::log(Nd / (2 * pi)) - 1 - binet(Nd)).epsilon(1e-12));

    GpiPrior flat = gpi_exact_symmetric(GpiKind::NormalMeanFlat, N, 2, 1.5);
    CHECK(flat.log_c ==
          Catch::Approx(std::log(Nd / (2 * pi * 1.5 * 1.5)) -
                        (1 + Nd * std::log1p(1 / Nd)))
              .epsilon(1e-12));
}

TEST_CASE("GPI fixed point verified by the sampling estimator", "[gpi]")
{
    ZooModel ex = make_exponential(20);
    DisorderConfig cfg;
    cfg.replicates = 2000;
    cfg.seed = 99;
    ThermoReport rep = disorder_average(ex, ParamPoint{{2.0}, {}}, 20, cfg);
    CHECK(rep.Sbar == Catch::Approx(0.0).margin(3 * rep.Sse));
}

TEST_CASE("recursive solver on synthetic entropy functionals", "[gpi]")
{
    std::vector<double> grid{0, 1, 2};
    auto identity_sbar = [](const std::vector<double>&,
                            const std::vector<double>& lw,
                            long) { return lw; };
    // already at the fixed point: returns immediately
    GpiPrior done = gpi_recursive(identity_sbar, grid, {0, 0, 0}, 10);
    CHECK(done.max_abs_s < 1e-3);
    CHECK(done.convergence_trace.size() == 1);
    CHECK_FALSE(done.early_stopped);
    // contraction from a shifted start; S = log w converges in one update
    GpiPrior conv = gpi_recursive(identity_sbar, grid, {0.5, 0.5, 0.5}, 10);
    CHECK(conv.max_abs_s < 1e-3);
    CHECK_FALSE(conv.early_stopped);
    for (std::size_t i = 1; i < conv.convergence_trace.size(); ++i) {
        CHECK(conv.convergence_trace[i] <= conv.convergence_trace[i - 1]);
    }
    // stubborn residual: damping halves, then the solver gives up cleanly
    auto stuck = [](const std::vector<double>& g, const std::vector<double>&,
                    long) { return std::vector<double>(g.size(), 1.0); };
    GpiPrior bad = gpi_recursive(stuck, grid, {0, 0, 0}, 50);
    CHECK(bad.early_stopped);
    CHECK(bad.max_abs_s == Catch::Approx(1.0));
}

TEST_CASE("recursive solver flattens the discrete-mean entropy", "[gpi]")
{
    ZooModel zoo = make_normal_discrete(1, 1.0);
    std::vector<double> grid, lw0;
    for (long m = -3; m <= 3; ++m) {
        grid.push_back(static_cast<double>(m));
        lw0.push_back(0.1 * m); // tilted start
    }
    long N = 25;
    GpiPrior sol = gpi_recursive(zoo.sbar_on_grid, grid, lw0, N, 80, 1e-6, 0.8);
    CHECK(sol.max_abs_s < 1e-6);
    CHECK(sol.convergence_trace.front() > sol.max_abs_s);
    // lattice reflection symmetry restored up to the tolerance
    std::size_t last = sol.log_w.size() - 1;
    for (std::size_t i = 0; i <= last / 2; ++i) {
        CHECK(sol.log_w[i] == Catch::Approx(sol.log_w[last - i]).margin(1e-4));
    }
    // interior weights equalize; the window edges feel the truncated lattice
    double lo = sol.log_w[1], hi = sol.log_w[1];
    for (std::size_t i = 1; i < last; ++i) {
        lo = std::min(lo, sol.log_w[i]);
        hi = std::max(hi, sol.log_w[i]);
    }
    CHECK(hi - lo < 0.02);
    CHECK(sol.log_w[0] > hi);
}

TEST_CASE("discrete manifold limits: continuum vs frozen vs mixed", "[gpi]")
{
    ZooModel zoo = make_normal_discrete(1, 10.0);
    ParamPoint th0{{}, {0}};
    DiscreteLimitPrior cont = gpi_discrete_limits(zoo, th0, 4); // resolution 5 > spacing
    CHECK(cont.continuum_branch == std::vector<bool>{true});
    CHECK_FALSE(cont.mixed);
    double expected = 0.5 * std::log(4.0 / (2 * pi * 100.0)) - 1;
    CHECK(cont.prior.log_density(th0) == Catch::Approx(expected).epsilon(1e-12));

    DiscreteLimitPrior frozen = gpi_discrete_limits(zoo, th0, 40000);
    CHECK(frozen.continuum_branch == std::vector<bool>{false});
    CHECK(frozen.prior.log_density(th0) == Catch::Approx(0.0).margin(1e-14));

    ZooModel two = make_normal_discrete(2, 10.0);
    two.model.param_space.discrete[1].spacing = 1000.0;
    DiscreteLimitPrior mixed = gpi_discrete_limits(two, ParamPoint{{}, {0, 0}}, 4);
    CHECK(mixed.mixed);

    ZooModel ex = make_exponential();
    CHECK_THROWS_AS(gpi_discrete_limits(ex, ParamPoint{{1.0}, {}}, 10),
                    NotSupportedError);
}

TEST_CASE("model counting and a priori model probabilities", "[gpi]")
{
    // meanflat GPI prior is flat: M over a window scales as sqrt(N)
    double sig = 1.0, a = 3.0;
    auto log_w_at = [&](double N) {
        return 0.5 * std::log(N / (2 * pi * sig * sig)) -
               effective_complexity_meanflat(N, 1);
    };
    auto make_fn = [&](double N) {
        double lw = log_w_at(N);
        return [lw](const ParamPoint&) { return lw; };
    };
    Box win{{0.0}, {a}};
    ModelCount m1 = count_models(make_fn(100.0), win);
    ModelCount m4 = count_models(make_fn(400.0), win);
    CHECK(m1.M == Catch::Approx(a * std::exp(log_w_at(100.0))).epsilon(1e-9));
    // K = 1: quadrupling the data doubles the number of distinguishable models
    // (up to the small-N complexity correction, which cancels to this accuracy)
    CHECK(m4.M / m1.M == Catch::Approx(2.0).epsilon(2e-3));

    // K = 0: a single distinguishable model
    CHECK(count_models_grid({0.0}).M == Catch::Approx(1.0).epsilon(1e-12));

    // flat improper weight keeps growing with the window: flagged divergent
    ModelCount div = count_models([](const ParamPoint&) { return 0.0; },
                                  Box{{0.0}, {1.0}}, true);
    CHECK(div.divergent);
    ModelCount fine = count_models(
        [](const ParamPoint& th) {
            double x = th.continuous[0];
            return -x * x / 2;
        },
        Box{{-6.0}, {6.0}}, true);
    CHECK_FALSE(fine.divergent);

    std::vector<ModelCount> counts(3);
    counts[0].M = 1;
    counts[1].M = 2;
    counts[2].M = 7;
    ProperDecomposition dec = proper_decomposition(counts);
    CHECK(dec.model_probs[0] == Catch::Approx(0.1).epsilon(1e-12));
    CHECK(dec.model_probs[1] == Catch::Approx(0.2).epsilon(1e-12));
    CHECK(dec.model_probs[2] == Catch::Approx(0.7).epsilon(1e-12));
    counts[1].divergent = true;
    CHECK_THROWS_AS(proper_decomposition(counts), NotSupportedError);
}
