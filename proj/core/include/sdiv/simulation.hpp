#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdiv/divergence.hpp"
#include "sdiv/models.hpp"

namespace sdiv {

struct Contamination {
    double epsilon = 0.0;   // mixing weight of the point mass
    std::int64_t location = 0;
};

struct SimPlan {
    std::string model = "poisson";
    double theta_true = 1.0;
    std::size_t n = 100;
    std::size_t replicates = 100;
    double alpha = 0.0;
    double lambda = 0.0;
    std::optional<Contamination> contamination;
    std::uint64_t seed = 1;
};

struct NormalityTest {
    double a2 = 0.0;        // Anderson-Darling statistic
    double a2_mod = 0.0;    // finite-sample modification
    double p_value = 0.0;
};

struct SimReport {
    SimPlan plan;
    std::size_t failures = 0;          // replicates that did not converge
    double mean_theta_hat = 0.0;
    double sd_theta_hat = 0.0;
    double bias = 0.0;                 // mean_theta_hat - theta_true
    double empirical_var_scaled = 0.0; // n * var(theta_hat), ddof = 1
    double theoretical_sandwich = 0.0; // model-based V/J^2 at theta_true
    NormalityTest normality;           // of sqrt(n)(theta_hat - theta_true)
    std::vector<double> estimates;     // converged theta_hat, replicate order
};

// Deterministic stream splitter: replicate k of a run seeded with s draws
// from an engine seeded with splitmix64 applied to s + k * golden gamma.
std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t replicate);

// Runs every replicate (in parallel when jobs > 1; results are written to
// slots indexed by replicate so the report is identical for any job count).
SimReport run_plan(const SimPlan& plan, int jobs = 1);

// Anderson-Darling test of normality with estimated mean and variance.
NormalityTest anderson_darling(const std::vector<double>& sample);

struct LambdaIndependenceCheck {
    std::vector<double> lambdas;
    std::vector<double> variances;  // n * var(theta_hat) per lambda, common samples
    double max_pairwise_diff = 0.0;
    double noise_band = 0.0;        // 3 sqrt(2/(R-1)) * mean(variances)
    bool within_band = false;
};

// Re-fits the same simulated datasets at each lambda (common random
// numbers) and checks that the scaled variances agree to Monte Carlo noise.
LambdaIndependenceCheck lambda_independence_check(
    const ModelSpec& model, double theta, std::size_t n, std::size_t replicates,
    double alpha, const std::vector<double>& lambdas, std::uint64_t seed,
    int jobs = 1);

} // namespace sdiv
