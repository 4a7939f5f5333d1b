#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "thermo/poisson.hpp"
#include "thermo/theta.hpp"

using namespace thermo;

TEST_CASE("theta statistic partition: branches and limits", "[series]")
{
    for (double n : {1.0, 5.0, 60.0, 100.0, 140.0}) {
        for (double t : {0.0, 0.2, 0.5, 0.77}) {
            double direct = theta_statistic_partition(t, n, SeriesBranch::direct);
            double resummed = theta_statistic_partition(t, n, SeriesBranch::resummed);
            INFO("n=" << n << " t=" << t);
            // margin absorbs the roundoff floor where z itself is ~ e^{-n t^2/2}
            CHECK(resummed == Catch::Approx(direct).epsilon(1e-9).margin(1e-12));
        }
    }
    // single lattice term dominates at large n
    CHECK(theta_statistic_partition(0.0, 1e4) ==
          Catch::Approx(std::sqrt(1e4 / (2 * pi))).epsilon(1e-12));
    // continuum limit at tiny n: sum approaches the integral, z -> 1
    CHECK(theta_statistic_partition(0.3, 1e-2) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("theta series dual branches agree across the overlap", "[series]")
{
    for (double n : {60.0, 90.0, 120.0, 140.0}) {
        double a_conv = theta_cross_term(n, SeriesBranch::direct);
        double a_res = theta_cross_term(n, SeriesBranch::resummed);
        double b_conv = theta_euler_term(n, SeriesBranch::direct);
        double b_res = theta_euler_term(n, SeriesBranch::resummed);
        INFO("n=" << n);
        CHECK(a_res == Catch::Approx(a_conv).epsilon(1e-10));
        CHECK(b_res == Catch::Approx(b_conv).epsilon(1e-10));
        CHECK(discrete_mean_expected_log_z(n, SeriesBranch::resummed) ==
              Catch::Approx(discrete_mean_expected_log_z(n, SeriesBranch::direct))
                  .epsilon(1e-8));
    }
}

TEST_CASE("euler factor asymptotics", "[series]")
{
    for (double n : {60.0, 120.0, 400.0}) {
        double asym = -n / 24 + pi * pi / (6 * n) + 0.5 * std::log(n / (2 * pi));
        CHECK(theta_euler_term(n) == Catch::Approx(asym).margin(2e-10 * n + 1e-8));
    }
    // cross-term rational asymptote closes onto the series at large n
    for (double n : {300.0, 1000.0}) {
        CHECK(theta_cross_term_asymptote(n) ==
              Catch::Approx(theta_cross_term(n)).margin(5e-4));
    }
}

TEST_CASE("disorder-averaged theta series vs numeric expectation", "[series]")
{
    // frozen high-precision values of E(n) = E_{t~N(0,1/n)} log z(t; n)
    CHECK(discrete_mean_expected_log_z(0.5) == Catch::Approx(0.0).margin(1e-14));
    CHECK(discrete_mean_expected_log_z(2.0) ==
          Catch::Approx(2.67528799466281e-9).epsilon(1e-6));
    CHECK(discrete_mean_expected_log_z(10.0) ==
          Catch::Approx(0.019480115748412646).epsilon(1e-10));
    CHECK(discrete_mean_expected_log_z(120.0) ==
          Catch::Approx(0.97480746910204757).epsilon(1e-10));
}

TEST_CASE("discrete-mean capacity freeze-out curve", "[series]")
{
    // c -> 1/2 in the continuum regime, -> 0 after freeze-out
    CHECK(discrete_mean_capacity_per_dim(0.05) == Catch::Approx(0.5).margin(1e-6));
    CHECK(discrete_mean_capacity_per_dim(100.0) == Catch::Approx(0.0).margin(1e-3));
    // the crossover overshoots 1/2 (Schottky-like anomaly) before freezing out
    CHECK(discrete_mean_capacity_per_dim(8.0) ==
          Catch::Approx(0.60614305525062073).epsilon(1e-8));
    CHECK(discrete_mean_capacity_per_dim(50.0) ==
          Catch::Approx(0.052497479398579169).epsilon(1e-6));
}

TEST_CASE("poisson z closed forms at k = 0, 1", "[series]")
{
    for (double t : {0.5, 1.0, 10.0}) {
        for (double b : {0.0, 0.3}) {
            double z0 = std::exp(poisson_log_z(0, t, b));
            CHECK(z0 == Catch::Approx(1 / (std::exp(b + t) - 1)).epsilon(1e-13));
            double z1 = std::exp(poisson_log_z(1, t, b));
            double e = std::exp(b + t);
            CHECK(z1 == Catch::Approx(t * e / ((e - 1) * (e - 1))).epsilon(1e-12));
        }
    }
}

TEST_CASE("poisson z frozen references", "[series]")
{
    CHECK(std::exp(poisson_log_z(5, 1.0)) ==
          Catch::Approx(0.99998188973013354).epsilon(1e-12));
    CHECK(std::exp(poisson_log_z(12, 10.0)) ==
          Catch::Approx(0.11250947088222605).epsilon(1e-12));
    CHECK(poisson_log_z(50, 500.0) ==
          Catch::Approx(-337.74736203066344).epsilon(1e-13));
}

TEST_CASE("poisson strategies cross-check on the (k, t) grid", "[series]")
{
    for (double t : {1.0, 10.0, 500.0}) {
        for (long k = 0; k <= 50; ++k) {
            double direct = poisson_log_z(k, t, 0, PoissonStrategy::directSum);
            double recur = poisson_log_z(k, t, 0, PoissonStrategy::recursion);
            INFO("k=" << k << " t=" << t);
            CHECK(recur == Catch::Approx(direct).epsilon(1e-9).margin(1e-9));
            if (k > 0 && k / (t * t) > 0.1) {
                double res = poisson_log_z(k, t, 0, PoissonStrategy::resummed);
                CHECK(res == Catch::Approx(direct).epsilon(1e-9).margin(1e-9));
            }
        }
    }
    // outside its validity region the resummation loses all precision and
    // reports divergence instead of returning a wrong value
    CHECK_THROWS_AS(poisson_log_z(50, 500.0, 0, PoissonStrategy::resummed),
                    DivergenceError);
}

TEST_CASE("poisson z monotone decreasing in the prior regularizer", "[series]")
{
    for (long k : {0L, 3L, 20L}) {
        double prev = poisson_log_z(k, 2.0, 0.0);
        for (double b : {0.1, 0.5, 2.0}) {
            double cur = poisson_log_z(k, 2.0, b);
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("poisson truncation bound is reported and small", "[series]")
{
    double bound = 1;
    double lz = poisson_log_z(40, 3.0, 0, PoissonStrategy::directSum, &bound);
    CHECK(std::isfinite(lz));
    CHECK(bound >= 0);
    CHECK(bound < 1e-12);
}
