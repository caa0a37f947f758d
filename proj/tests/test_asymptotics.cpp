#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sdiv/asymptotics.hpp"
#include "sdiv/divergence.hpp"
#include "sdiv/errors.hpp"
#include "sdiv/estimation.hpp"
#include "sdiv/frequency_table.hpp"
#include "sdiv/models.hpp"

using namespace sdiv;

TEST_CASE("alpha zero recovers likelihood theory") {
    const ModelSpec& pois = model_by_name("poisson");

    CHECK(model_J(pois, 5.0, 0.0) == doctest::Approx(0.2).epsilon(1e-10));
    CHECK(model_J(pois, 2.0, 0.0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(model_V(pois, 3.0, 0.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(sandwich_variance(pois, 2.0, 0.0) ==
          doctest::Approx(2.0).epsilon(1e-9));
    CHECK(are(pois, 7.0, 0.0) == doctest::Approx(100.0).epsilon(1e-9));

    // truncation tighter than the default so the squared-score tail noise
    // stays below the comparison band
    TruncationPolicy tight;
    tight.mass_tolerance = 1e-15;
    const ModelSpec& geom = model_by_name("geometric");
    CHECK(model_J(geom, 0.3, 0.0, tight) ==
          doctest::Approx(fisher_information(geom, 0.3)).epsilon(1e-10));
    CHECK(are(geom, 0.3, 0.0) == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("the bias-like term vanishes at the model") {
    TruncationPolicy tight;
    tight.mass_tolerance = 1e-15;
    for (const char* name : {"poisson", "geometric"}) {
        const ModelSpec& model = model_by_name(name);
        for (double theta : model.name == "poisson"
                                ? std::vector<double>{0.7, 3.0, 11.0}
                                : std::vector<double>{0.2, 0.6}) {
            CHECK(model_xi(model, theta, 0.0, tight) ==
                  doctest::Approx(0.0).epsilon(1e-10).scale(1.0));
        }
    }
}

TEST_CASE("poisson first-order pins") {
    const ModelSpec& pois = model_by_name("poisson");

    CHECK(model_J(pois, 3.0, 0.5) ==
          doctest::Approx(0.090130957265).epsilon(1e-8));
    CHECK(model_xi(pois, 3.0, 0.5) ==
          doctest::Approx(-0.023527572716).epsilon(1e-8));
    CHECK(model_V(pois, 3.0, 0.5) ==
          doctest::Approx(0.028658399985).epsilon(1e-8));
    CHECK(sandwich_variance(pois, 3.0, 0.5) ==
          doctest::Approx(3.527800134968).epsilon(1e-8));
    CHECK(sandwich_variance(pois, 2.0, 0.5) ==
          doctest::Approx(2.326304030037).epsilon(1e-8));

    const auto rep = asymptotic_report(pois, 3.0, 0.5);
    CHECK(rep.are_percent == doctest::Approx(85.038831).epsilon(1e-6));
    CHECK(asymptotic_report(pois, 2.0, 0.5).are_percent ==
          doctest::Approx(85.973285).epsilon(1e-6));
}

TEST_CASE("efficiency table rows") {
    const ModelSpec& pois = model_by_name("poisson");
    const ModelSpec& geom = model_by_name("geometric");

    // exact values from 40-digit summation, rounded to 4 decimals
    const std::vector<double> alphas{0, 0.05, 0.1, 0.3, 0.5, 0.7, 1};
    const std::vector<double> pois10{100.0,   99.6583, 98.7595, 92.1614,
                                     83.9843, 76.0431, 65.6091};
    const std::vector<double> geom02{100.0,   99.1029, 96.7886, 82.0125,
                                     68.5902, 59.4934, 51.4549};
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        CHECK(are(pois, 10.0, alphas[i]) ==
              doctest::Approx(pois10[i]).epsilon(5e-6));
        CHECK(are(geom, 0.2, alphas[i]) ==
              doctest::Approx(geom02[i]).epsilon(5e-6));
    }

    // published-table readings
    CHECK(are(pois, 10.0, 0.3) == doctest::Approx(92.07).epsilon(0.0011));
    CHECK(are(geom, 0.1, 0.7) == doctest::Approx(59.24).epsilon(1e-4));
    CHECK(are(geom, 0.2, 0.1) == doctest::Approx(96.79).epsilon(1e-4));
}

TEST_CASE("geometric closed forms agree with the series") {
    CHECK(geometric_J_closed(0.5, 0.3) ==
          doctest::Approx(3.423312776480).epsilon(1e-9));
    CHECK(geometric_V_closed(0.5, 0.3) ==
          doctest::Approx(1.767092670121).epsilon(1e-9));
    CHECK(geometric_xi_closed(0.5, 0.3) ==
          doctest::Approx(0.432391421768).epsilon(1e-9));
    CHECK(geometric_J_closed(0.25, 0.5) ==
          doctest::Approx(4.186471930449).epsilon(1e-9));
    CHECK(geometric_V_closed(0.25, 0.5) ==
          doctest::Approx(1.195320749841).epsilon(1e-9));
    CHECK(geometric_xi_closed(0.25, 0.5) ==
          doctest::Approx(0.545335328419).epsilon(1e-9));
    CHECK(geometric_J_closed(0.9, 1.0) ==
          doctest::Approx(1.669588446448).epsilon(1e-9));
    CHECK(geometric_V_closed(0.9, 1.0) ==
          doctest::Approx(0.274847254139).epsilon(1e-9));
    CHECK(geometric_xi_closed(0.9, 1.0) ==
          doctest::Approx(0.826446280992).epsilon(1e-9));

    const ModelSpec& geom = model_by_name("geometric");
    TruncationPolicy tight;
    tight.mass_tolerance = 1e-15;
    for (double theta : {0.1, 0.3, 0.5, 0.7, 0.9})
        for (double alpha : {0.0, 0.05, 0.25, 0.5, 0.75, 1.0}) {
            CHECK(geometric_J_closed(theta, alpha) ==
                  doctest::Approx(model_J(geom, theta, alpha, tight))
                      .epsilon(1e-9));
            CHECK(geometric_xi_closed(theta, alpha) ==
                  doctest::Approx(model_xi(geom, theta, alpha, tight))
                      .epsilon(1e-9)
                      .scale(1.0));
            CHECK(geometric_V_closed(theta, alpha) ==
                  doctest::Approx(model_V(geom, theta, alpha, tight))
                      .epsilon(1e-9));
        }
}

TEST_CASE("standard error of a converged fit") {
    const ModelSpec& pois = model_by_name("poisson");
    const auto data = FrequencyTable::from_entries({{1, 50}, {3, 50}});
    REQUIRE(data.n() == 100);

    FitResult fit;
    fit.theta_hat = 2.0;
    fit.converged = true;

    // likelihood case: sqrt(theta / n)
    CHECK(std_error(fit, data, pois, 0.0) ==
          doctest::Approx(std::sqrt(2.0 / 100.0)).epsilon(1e-9));

    // quadruple the sample, halve the error
    const auto data4 = FrequencyTable::from_entries({{1, 200}, {3, 200}});
    CHECK(std_error(fit, data4, pois, 0.0) ==
          doctest::Approx(0.5 * std_error(fit, data, pois, 0.0))
              .epsilon(1e-12));

    FitResult bad;
    bad.theta_hat = 2.0;
    bad.converged = false;
    CHECK_THROWS_AS((void)std_error(bad, data, pois, 0.0), domain_error);
}

TEST_CASE("general-pmf curvature and variability") {
    const ModelSpec& pois = model_by_name("poisson");

    SUBCASE("collapses to the model quantities when g is the model") {
        const double theta = 2.0;
        TruncationPolicy policy;
        const std::int64_t top = truncation_point(pois, theta, policy);
        PmfVector g;
        g.origin = 0;
        for (std::int64_t x = 0; x <= top; ++x)
            g.masses.push_back(pmf(pois, theta, x));

        for (double lambda : {-0.5, 0.0, 0.7}) {
            const auto params = make_divergence_params(0.5, lambda);
            const auto [Jg, Vg] = general_Jg_Vg(g, pois, theta, params);
            CHECK(Jg == doctest::Approx(model_J(pois, theta, 0.5)).epsilon(1e-6));
            CHECK(Vg == doctest::Approx(model_V(pois, theta, 0.5)).epsilon(1e-6));
        }
    }

    SUBCASE("contaminated target: pinned values and lambda dependence") {
        // g = 0.95 Poisson(2) + 0.05 point mass at 15, restricted to 0..60
        PmfVector g;
        g.origin = 0;
        double total = 0.0;
        for (std::int64_t x = 0; x <= 60; ++x) {
            double mass = 0.95 * pmf(pois, 2.0, x);
            if (x == 15) mass += 0.05;
            g.masses.push_back(mass);
            total += mass;
        }
        for (auto& mass : g.masses) mass /= total;

        // best-fitting parameters found by an independent root solve
        const double theta_neg = 2.0140194782;
        const double theta_pos = 2.0209145221;

        const auto pneg = make_divergence_params(0.5, -0.5);
        const auto [Jn, Vn] = general_Jg_Vg(g, pois, theta_neg, pneg);
        CHECK(Jn == doctest::Approx(0.1470785168).epsilon(1e-6));
        CHECK(Vn == doctest::Approx(0.0528265229).epsilon(1e-6));
        const double sandwich_neg = Vn / (Jn * Jn);
        CHECK(sandwich_neg == doctest::Approx(2.4420443266).epsilon(1e-6));

        const auto ppos = make_divergence_params(0.5, 0.5);
        const auto [Jp, Vp] = general_Jg_Vg(g, pois, theta_pos, ppos);
        CHECK(Jp == doctest::Approx(0.1413408181).epsilon(1e-6));
        CHECK(Vp == doctest::Approx(0.0500711750).epsilon(1e-6));
        const double sandwich_pos = Vp / (Jp * Jp);
        CHECK(sandwich_pos == doctest::Approx(2.5064126935).epsilon(1e-6));

        // off the model the curvature genuinely depends on lambda
        CHECK(std::fabs(Jn - Jp) > 1e-3);

        // long-run Monte Carlo agreement (scaled variance of the estimator
        // over 3000 samples of size 1000, fixed elsewhere): within 10%
        const double mc_neg = 2.369970;
        const double mc_pos = 2.366336;
        CHECK(std::fabs(sandwich_neg - mc_neg) / mc_neg < 0.10);
        CHECK(std::fabs(sandwich_pos - mc_pos) / mc_pos < 0.10);
    }

    SUBCASE("vanishing target mass needs a positive exponent") {
        PmfVector g;
        g.origin = 0;
        g.masses = {0.5, 0.5};  // no mass past x = 1
        const auto params = make_divergence_params(0.0, -2.0);  // A = -1
        CHECK_THROWS_AS((void)general_Jg_Vg(g, pois, 0.5, params),
                        undefined_divergence);
    }
}
