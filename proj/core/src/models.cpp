#include "sdiv/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "sdiv/errors.hpp"

namespace sdiv {

namespace {

double poisson_log_pmf(double theta, std::int64_t x) {
    return static_cast<double>(x) * std::log(theta) - theta -
           std::lgamma(static_cast<double>(x) + 1.0);
}

double poisson_log_pmf_deriv(double theta, std::int64_t x, int order) {
    const double xd = static_cast<double>(x);
    switch (order) {
        case 1: return xd / theta - 1.0;
        case 2: return -xd / (theta * theta);
        case 3: return 2.0 * xd / (theta * theta * theta);
        default:
            throw domain_error("log-pmf derivative order must be 1, 2 or 3");
    }
}

// Support {1, 2, ...}: number of trials up to and including the first
// success, f(x) = theta (1-theta)^(x-1).
double geometric_log_pmf(double theta, std::int64_t x) {
    return std::log(theta) +
           static_cast<double>(x - 1) * std::log1p(-theta);
}

double geometric_log_pmf_deriv(double theta, std::int64_t x, int order) {
    const double k = static_cast<double>(x - 1);
    const double q = 1.0 - theta;
    switch (order) {
        case 1: return 1.0 / theta - k / q;
        case 2: return -1.0 / (theta * theta) - k / (q * q);
        case 3: return 2.0 / (theta * theta * theta) - 2.0 * k / (q * q * q);
        default:
            throw domain_error("log-pmf derivative order must be 1, 2 or 3");
    }
}

// One uniform in [0,1) with 53 random bits.
double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Cumulative pmf table for inversion sampling; covers at least
// 1 - 1e-15 of the mass so clamping to the last entry is harmless.
std::vector<double> inversion_cdf(const ModelSpec& model, double theta) {
    TruncationPolicy policy;
    policy.mass_tolerance = 1e-15;
    const std::int64_t top = truncation_point(model, theta, policy);
    std::vector<double> cdf;
    cdf.reserve(static_cast<std::size_t>(top - model.support_origin + 1));
    double cum = 0.0;
    for (std::int64_t x = model.support_origin; x <= top; ++x) {
        cum += std::exp(model.log_pmf(theta, x));
        cdf.push_back(cum);
    }
    return cdf;
}

std::int64_t invert(const std::vector<double>& cdf, std::int64_t origin,
                    double u) {
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;  // beyond tabulated mass: clamp to last point
    return origin + static_cast<std::int64_t>(it - cdf.begin());
}

} // namespace

ModelSpec poisson_model() {
    ModelSpec m;
    m.name = "poisson";
    m.param_lo = 0.0;
    m.param_hi = std::numeric_limits<double>::infinity();
    m.support_origin = 0;
    m.log_pmf = poisson_log_pmf;
    m.log_pmf_deriv = poisson_log_pmf_deriv;
    m.fisher_closed = [](double theta) { return 1.0 / theta; };
    return m;
}

ModelSpec geometric_model() {
    ModelSpec m;
    m.name = "geometric";
    m.param_lo = 0.0;
    m.param_hi = 1.0;
    m.support_origin = 1;
    m.log_pmf = geometric_log_pmf;
    m.log_pmf_deriv = geometric_log_pmf_deriv;
    m.fisher_closed = [](double theta) {
        return 1.0 / (theta * theta * (1.0 - theta));
    };
    return m;
}

const ModelSpec& model_by_name(const std::string& name) {
    static const ModelSpec poisson = poisson_model();
    static const ModelSpec geometric = geometric_model();
    if (name == "poisson") return poisson;
    if (name == "geometric") return geometric;
    throw domain_error("unknown model '" + name +
                       "' (expected 'poisson' or 'geometric')");
}

void require_theta(const ModelSpec& model, double theta) {
    if (!(theta > model.param_lo && theta < model.param_hi))
        throw domain_error("theta = " + std::to_string(theta) +
                           " outside the parameter space of " + model.name);
}

double pmf(const ModelSpec& model, double theta, std::int64_t x) {
    require_theta(model, theta);
    if (x < model.support_origin)
        throw domain_error("support point " + std::to_string(x) +
                           " below the origin of " + model.name);
    return std::exp(model.log_pmf(theta, x));
}

double score(const ModelSpec& model, double theta, std::int64_t x, int order) {
    require_theta(model, theta);
    if (x < model.support_origin)
        throw domain_error("support point " + std::to_string(x) +
                           " below the origin of " + model.name);
    return model.log_pmf_deriv(theta, x, order);
}

double fisher_information(const ModelSpec& model, double theta) {
    require_theta(model, theta);
    if (model.fisher_closed) return model.fisher_closed(theta);
    return fisher_information_series(model, theta);
}

double fisher_information_series(const ModelSpec& model, double theta,
                                 const TruncationPolicy& policy) {
    require_theta(model, theta);
    const std::int64_t top = truncation_point(model, theta, policy);
    double s = 0.0;
    for (std::int64_t x = model.support_origin; x <= top; ++x) {
        const double u = model.log_pmf_deriv(theta, x, 1);
        s += u * u * std::exp(model.log_pmf(theta, x));
    }
    return s;
}

std::int64_t truncation_point(const ModelSpec& model, double theta,
                              const TruncationPolicy& policy) {
    require_theta(model, theta);
    const double target = 1.0 - policy.mass_tolerance;
    // Kahan-compensated accumulation keeps the summation itself exact to an
    // ulp; the residual uncertainty is the rounding of the terms (relative
    // error ~ |log f| * eps from the exp), so partial sums can plateau a few
    // 1e-15 below 1 and tolerances that tight are not reachable literally.
    double cum = 0.0, comp = 0.0;
    for (std::int64_t x = model.support_origin; x <= policy.hard_cap; ++x) {
        const double raw = std::exp(model.log_pmf(theta, x));
        const double term = raw - comp;
        const double next = cum + term;
        comp = (next - cum) - term;
        cum = next;
        if (x < policy.data_max) continue;
        if (cum >= target) return x;
        // the remaining gap is rounding noise and the terms can no longer
        // close it: accept the plateau as "all representable mass"
        if (1.0 - cum <= 64 * std::numeric_limits<double>::epsilon() &&
            raw < (target - cum) * 1e-3)
            return x;
    }
    throw truncation_error("support truncation for " + model.name +
                               " hit the hard cap before reaching the "
                               "requested mass",
                           cum);
}

FrequencyTable sample(const ModelSpec& model, double theta, std::int64_t n,
                      std::uint64_t seed) {
    return sample_contaminated(model, theta, n, seed, 0.0, 0);
}

FrequencyTable sample_contaminated(const ModelSpec& model, double theta,
                                   std::int64_t n, std::uint64_t seed,
                                   double epsilon, std::int64_t location) {
    require_theta(model, theta);
    if (n <= 0) throw domain_error("sample size must be positive");
    if (epsilon < 0.0 || epsilon >= 1.0)
        throw domain_error("contamination weight must lie in [0, 1)");
    if (epsilon > 0.0 && location < model.support_origin)
        throw domain_error("contamination location below the support origin");

    const std::vector<double> cdf = inversion_cdf(model, theta);
    std::mt19937_64 rng(seed);
    std::vector<std::int64_t> xs;
    xs.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        if (epsilon > 0.0 && next_uniform(rng) < epsilon) {
            xs.push_back(location);
            continue;
        }
        xs.push_back(invert(cdf, model.support_origin, next_uniform(rng)));
    }
    return FrequencyTable::from_samples(xs);
}

} // namespace sdiv
