#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "sdiv/frequency_table.hpp"

namespace sdiv {

// Tail truncation for infinite supports: series over x stop at the smallest
// T with cumulative mass >= 1 - mass_tolerance, never below data_max.
struct TruncationPolicy {
    double mass_tolerance = 1e-12;
    std::int64_t hard_cap = 1'000'000;
    std::int64_t data_max = 0;
};

// A discrete parametric family with scalar parameter theta on an open
// interval. New models plug in by filling the callable fields; everything
// downstream (divergences, fitting, asymptotics) is generic.
struct ModelSpec {
    std::string name;
    double param_lo = 0.0;             // open interval (param_lo, param_hi)
    double param_hi = 0.0;
    std::int64_t support_origin = 0;   // first support point

    // ln f_theta(x); caller guarantees theta interior and x >= origin.
    std::function<double(double, std::int64_t)> log_pmf;
    // d^order/dtheta^order ln f_theta(x), order in {1,2,3}.
    std::function<double(double, std::int64_t, int)> log_pmf_deriv;
    // Closed-form Fisher information, if the family has one.
    std::function<double(double)> fisher_closed;
};

ModelSpec poisson_model();
ModelSpec geometric_model();

// Lookup by CLI name ("poisson", "geometric"); throws domain_error.
const ModelSpec& model_by_name(const std::string& name);

// Throws domain_error unless param_lo < theta < param_hi.
void require_theta(const ModelSpec& model, double theta);

// f_theta(x), evaluated in log space. Throws domain_error on theta outside
// the parameter space or x below the support origin.
double pmf(const ModelSpec& model, double theta, std::int64_t x);

// order-th derivative of ln f_theta(x) in theta, order in {1,2,3}.
double score(const ModelSpec& model, double theta, std::int64_t x, int order);

// I(theta) from the closed form when available, otherwise the truncated
// series sum of u^2 f.
double fisher_information(const ModelSpec& model, double theta);

// Series fallback/cross-check: sum over the truncated support of u^2 f.
double fisher_information_series(const ModelSpec& model, double theta,
                                 const TruncationPolicy& policy = {});

// Smallest T with sum_{x<=T} f >= 1 - mass_tolerance and T >= data_max.
// Throws truncation_error (with achieved mass) if the hard cap is hit first.
std::int64_t truncation_point(const ModelSpec& model, double theta,
                              const TruncationPolicy& policy = {});

// n i.i.d. draws by inversion over the pmf, aggregated; deterministic in
// seed.
FrequencyTable sample(const ModelSpec& model, double theta, std::int64_t n,
                      std::uint64_t seed);

// Contaminated sampling: each draw is replaced by point mass at `location`
// with probability epsilon. epsilon = 0 reduces to sample().
FrequencyTable sample_contaminated(const ModelSpec& model, double theta,
                                   std::int64_t n, std::uint64_t seed,
                                   double epsilon, std::int64_t location);

} // namespace sdiv
