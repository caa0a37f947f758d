#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sdiv/errors.hpp"
#include "sdiv/models.hpp"
#include "sdiv/simulation.hpp"

using namespace sdiv;

TEST_CASE("per-replicate seeds are stable and distinct") {
    CHECK(replicate_seed(1, 0) == replicate_seed(1, 0));
    CHECK(replicate_seed(1, 0) != replicate_seed(1, 1));
    CHECK(replicate_seed(1, 5) != replicate_seed(2, 5));
}

TEST_CASE("monte carlo study recovers the truth") {
    SimPlan plan;
    plan.model = "poisson";
    plan.theta_true = 3.0;
    plan.n = 200;
    plan.replicates = 30;
    plan.alpha = 0.5;
    plan.lambda = 0.0;
    plan.seed = 42;

    const auto report = run_plan(plan);
    CHECK(report.failures == 0);
    CHECK(report.estimates.size() == 30);
    CHECK(report.mean_theta_hat == doctest::Approx(3.0).epsilon(0.05));
    CHECK(report.bias ==
          doctest::Approx(report.mean_theta_hat - 3.0).epsilon(1e-12));
    CHECK(report.sd_theta_hat > 0.0);
    CHECK(report.empirical_var_scaled > 0.0);
    CHECK(report.theoretical_sandwich ==
          doctest::Approx(3.527800134968).epsilon(1e-8));
    // 30 replicates: loose agreement only
    CHECK(report.empirical_var_scaled / report.theoretical_sandwich > 0.4);
    CHECK(report.empirical_var_scaled / report.theoretical_sandwich < 2.5);
    CHECK(std::isfinite(report.normality.p_value));
    CHECK(report.normality.p_value >= 0.0);
    CHECK(report.normality.p_value <= 1.0);

    SUBCASE("parallel run is identical in every bit") {
        const auto par = run_plan(plan, 4);
        REQUIRE(par.estimates.size() == report.estimates.size());
        for (std::size_t i = 0; i < par.estimates.size(); ++i)
            CHECK(par.estimates[i] == report.estimates[i]);
        CHECK(par.mean_theta_hat == report.mean_theta_hat);
        CHECK(par.sd_theta_hat == report.sd_theta_hat);
        CHECK(par.empirical_var_scaled == report.empirical_var_scaled);
        CHECK(par.normality.a2 == report.normality.a2);
    }

    SUBCASE("the seed fully determines the result") {
        const auto again = run_plan(plan);
        CHECK(again.estimates == report.estimates);
        SimPlan other = plan;
        other.seed = 43;
        CHECK(run_plan(other).estimates != report.estimates);
    }
}

TEST_CASE("degenerate single-replicate study is flagged") {
    SimPlan plan;
    plan.model = "poisson";
    plan.theta_true = 2.0;
    plan.n = 100;
    plan.replicates = 1;
    plan.alpha = 0.0;
    plan.lambda = 0.0;
    plan.seed = 9;

    const auto report = run_plan(plan);
    CHECK(report.estimates.size() == 1);
    CHECK(report.mean_theta_hat == report.estimates[0]);
    CHECK(std::isnan(report.sd_theta_hat));
    CHECK(std::isnan(report.empirical_var_scaled));
    CHECK(std::isnan(report.normality.p_value));
}

TEST_CASE("contamination with zero mass changes nothing") {
    SimPlan pure;
    pure.model = "poisson";
    pure.theta_true = 2.0;
    pure.n = 150;
    pure.replicates = 10;
    pure.alpha = 0.5;
    pure.lambda = -0.3;
    pure.seed = 5;

    SimPlan mixed = pure;
    Contamination c;
    c.epsilon = 0.0;
    c.location = 20;
    mixed.contamination = c;

    CHECK(run_plan(pure).estimates == run_plan(mixed).estimates);
}

TEST_CASE("contaminated study pulls the mean off target for fragile members") {
    SimPlan plan;
    plan.model = "poisson";
    plan.theta_true = 2.0;
    plan.n = 400;
    plan.replicates = 12;
    plan.alpha = 0.0;   // likelihood-like: not robust
    plan.lambda = 0.0;
    plan.seed = 31;
    Contamination c;
    c.epsilon = 0.1;
    c.location = 15;
    plan.contamination = c;

    const auto fragile = run_plan(plan);
    CHECK(fragile.mean_theta_hat > 2.5);  // dragged toward the outliers

    SimPlan robust_plan = plan;
    robust_plan.alpha = 0.5;
    robust_plan.lambda = -0.5;
    const auto robust = run_plan(robust_plan);
    CHECK(std::fabs(robust.mean_theta_hat - 2.0) < 0.1);
}

TEST_CASE("normality statistic on a fixed sample") {
    const std::vector<double> sample{0.1, -0.4, 1.2,  0.5, -1.1,
                                     0.3, 0.8,  -0.2, 1.9, -0.7};
    const auto ad = anderson_darling(sample);
    CHECK(ad.a2 == doctest::Approx(0.107722555016).epsilon(1e-10));
    CHECK(ad.a2_mod == doctest::Approx(0.118225504131).epsilon(1e-10));
    CHECK(ad.p_value == doctest::Approx(0.990006367018).epsilon(1e-9));

    CHECK_THROWS_AS((void)anderson_darling({1.0, 2.0, 3.0}), domain_error);
    CHECK_THROWS_AS(
        (void)anderson_darling(std::vector<double>(10, 1.5)), domain_error);
}

TEST_CASE("estimator distribution does not depend on lambda at the model") {
    const auto check = lambda_independence_check(
        model_by_name("poisson"), 3.0, 400, 40, 0.5, {-0.5, 0.0, 1.0}, 11);
    REQUIRE(check.lambdas.size() == 3);
    REQUIRE(check.variances.size() == 3);
    for (double v : check.variances) CHECK(v > 0.0);
    CHECK(check.max_pairwise_diff >= 0.0);
    CHECK(check.noise_band > 0.0);
    CHECK(check.within_band);
    CHECK(check.max_pairwise_diff <= check.noise_band);

    SUBCASE("parallel evaluation identical") {
        const auto par = lambda_independence_check(
            model_by_name("poisson"), 3.0, 400, 40, 0.5, {-0.5, 0.0, 1.0}, 11,
            4);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(par.variances[i] == check.variances[i]);
    }

    SUBCASE("degenerate requests are rejected") {
        CHECK_THROWS_AS((void)lambda_independence_check(
                            model_by_name("poisson"), 3.0, 100, 40, 0.5,
                            {0.0}, 11),
                        domain_error);
        CHECK_THROWS_AS((void)lambda_independence_check(
                            model_by_name("poisson"), 3.0, 100, 2, 0.5,
                            {0.0, 1.0}, 11),
                        domain_error);
    }
}

TEST_CASE("plans validate their inputs") {
    SimPlan plan;
    plan.model = "poisson";
    plan.theta_true = -1.0;  // outside the parameter space
    plan.n = 50;
    plan.replicates = 3;
    plan.alpha = 0.0;
    plan.lambda = 0.0;
    CHECK_THROWS_AS((void)run_plan(plan), domain_error);

    SimPlan unknown;
    unknown.model = "cauchy";
    unknown.theta_true = 1.0;
    unknown.n = 50;
    unknown.replicates = 3;
    unknown.alpha = 0.0;
    unknown.lambda = 0.0;
    CHECK_THROWS_AS((void)run_plan(unknown), domain_error);
}
