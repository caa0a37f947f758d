#include "sdiv/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "sdiv/asymptotics.hpp"
#include "sdiv/errors.hpp"
#include "sdiv/estimation.hpp"
#include "internal_util.hpp"

namespace sdiv {

namespace {

using detail::pairwise_sum;

constexpr double nan_marker = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t state) {
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double sample_mean(const std::vector<double>& v) {
    return pairwise_sum(v) / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return nan_marker;  // undefined, flagged downstream
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        sq[i] = (v[i] - mean) * (v[i] - mean);
    return pairwise_sum(sq) / static_cast<double>(v.size() - 1);
}

// Runs fn(k) for k in [0, count) on `jobs` threads, each writing only its
// own slots, so results do not depend on the schedule.
void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next.fetch_add(1); k < count;
             k = next.fetch_add(1))
            fn(k);
    };
    std::vector<std::thread> pool;
    const std::size_t threads =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace

std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t replicate) {
    return splitmix64(base_seed +
                      static_cast<std::uint64_t>(replicate) *
                          0x9E3779B97F4A7C15ULL);
}

SimReport run_plan(const SimPlan& plan, int jobs) {
    const ModelSpec& model = model_by_name(plan.model);
    require_theta(model, plan.theta_true);
    if (plan.n == 0 || plan.replicates == 0)
        throw domain_error("plan needs a positive sample size and replicate count");
    const DivergenceParams params =
        make_divergence_params(plan.alpha, plan.lambda);

    std::vector<double> slots(plan.replicates, nan_marker);
    parallel_for(plan.replicates, jobs, [&](std::size_t k) {
        const std::uint64_t seed = replicate_seed(plan.seed, k);
        try {
            FrequencyTable data =
                plan.contamination
                    ? sample_contaminated(model, plan.theta_true,
                                          static_cast<std::int64_t>(plan.n),
                                          seed, plan.contamination->epsilon,
                                          plan.contamination->location)
                    : sample(model, plan.theta_true,
                             static_cast<std::int64_t>(plan.n), seed);
            slots[k] = fit(data, model, params).theta_hat;
        } catch (const std::exception&) {
            // slot stays NaN and is counted as a failure
        }
    });

    SimReport rep;
    rep.plan = plan;
    rep.estimates.reserve(plan.replicates);
    for (double v : slots)
        if (std::isnan(v))
            ++rep.failures;
        else
            rep.estimates.push_back(v);
    if (rep.estimates.empty())
        throw nonconvergence_error("every replicate failed to converge", "");

    rep.mean_theta_hat = sample_mean(rep.estimates);
    const double var = sample_variance(rep.estimates, rep.mean_theta_hat);
    rep.sd_theta_hat = std::sqrt(var);
    rep.bias = rep.mean_theta_hat - plan.theta_true;
    rep.empirical_var_scaled = static_cast<double>(plan.n) * var;
    rep.theoretical_sandwich =
        sandwich_variance(model, plan.theta_true, plan.alpha);

    if (rep.estimates.size() >= 8) {
        std::vector<double> scaled(rep.estimates.size());
        const double root_n = std::sqrt(static_cast<double>(plan.n));
        for (std::size_t i = 0; i < scaled.size(); ++i)
            scaled[i] = root_n * (rep.estimates[i] - plan.theta_true);
        rep.normality = anderson_darling(scaled);
    } else {
        rep.normality.a2 = nan_marker;       // too few replicates to test
        rep.normality.a2_mod = nan_marker;
        rep.normality.p_value = nan_marker;
    }
    return rep;
}

NormalityTest anderson_darling(const std::vector<double>& sample) {
    const std::size_t n = sample.size();
    if (n < 8)
        throw domain_error(
            "normality test needs at least 8 observations");

    const double mean = sample_mean(sample);
    const double sd = std::sqrt(sample_variance(sample, mean));
    if (!(sd > 0.0))
        throw domain_error("normality test needs a non-degenerate sample");

    std::vector<double> z(sample);
    std::sort(z.begin(), z.end());
    for (double& v : z)
        v = std::clamp(normal_cdf((v - mean) / sd), 1e-300, 1.0 - 1e-16);

    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 2.0 * static_cast<double>(i) + 1.0;
        terms[i] = w * (std::log(z[i]) + std::log1p(-z[n - 1 - i]));
    }
    const double nd = static_cast<double>(n);
    const double a2 = -nd - pairwise_sum(terms) / nd;
    const double aa = a2 * (1.0 + 0.75 / nd + 2.25 / (nd * nd));

    // Case-3 significance approximation (mean and variance estimated).
    double p;
    if (aa < 0.2)
        p = 1.0 - std::exp(-13.436 + 101.14 * aa - 223.73 * aa * aa);
    else if (aa < 0.34)
        p = 1.0 - std::exp(-8.318 + 42.796 * aa - 59.938 * aa * aa);
    else if (aa < 0.6)
        p = std::exp(0.9177 - 4.279 * aa - 1.38 * aa * aa);
    else if (aa <= 10.0)
        p = std::exp(1.2937 - 5.709 * aa + 0.0186 * aa * aa);
    else
        p = 0.0;

    NormalityTest t;
    t.a2 = a2;
    t.a2_mod = aa;
    t.p_value = std::clamp(p, 0.0, 1.0);
    return t;
}

LambdaIndependenceCheck lambda_independence_check(
    const ModelSpec& model, double theta, std::size_t n, std::size_t replicates,
    double alpha, const std::vector<double>& lambdas, std::uint64_t seed,
    int jobs) {
    if (lambdas.size() < 2)
        throw domain_error("need at least two lambda values to compare");
    if (replicates < 3)
        throw domain_error("need at least three replicates");

    // One common set of datasets for every lambda (common random numbers).
    std::vector<FrequencyTable> datasets;
    datasets.reserve(replicates);
    for (std::size_t k = 0; k < replicates; ++k)
        datasets.push_back(sample(model, theta,
                                  static_cast<std::int64_t>(n),
                                  replicate_seed(seed, k)));

    // theta_hat[j][k]; a replicate that fails under any lambda is dropped
    // from all of them to keep the comparison paired.
    std::vector<std::vector<double>> est(
        lambdas.size(), std::vector<double>(replicates, nan_marker));
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        const DivergenceParams params =
            make_divergence_params(alpha, lambdas[j]);
        parallel_for(replicates, jobs, [&](std::size_t k) {
            try {
                est[j][k] = fit(datasets[k], model, params).theta_hat;
            } catch (const std::exception&) {
            }
        });
    }

    LambdaIndependenceCheck check;
    check.lambdas = lambdas;
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < replicates; ++k) {
        bool ok = true;
        for (std::size_t j = 0; j < lambdas.size(); ++j)
            ok = ok && !std::isnan(est[j][k]);
        if (ok) kept.push_back(k);
    }
    if (kept.size() < 3)
        throw nonconvergence_error(
            "too few replicates converged under every lambda", "");

    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        std::vector<double> v;
        v.reserve(kept.size());
        for (std::size_t k : kept) v.push_back(est[j][k]);
        const double var = sample_variance(v, sample_mean(v));
        check.variances.push_back(static_cast<double>(n) * var);
    }

    double vmin = check.variances[0], vmax = check.variances[0];
    for (double v : check.variances) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    check.max_pairwise_diff = vmax - vmin;
    const double mean_v = sample_mean(check.variances);
    check.noise_band =
        3.0 * std::sqrt(2.0 / static_cast<double>(kept.size() - 1)) * mean_v;
    check.within_band = check.max_pairwise_diff <= check.noise_band;
    return check;
}

} // namespace sdiv
