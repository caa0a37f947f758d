#include "sdiv/asymptotics.hpp"

#include <cmath>
#include <vector>

#include "sdiv/errors.hpp"
#include "internal_util.hpp"

namespace sdiv {

namespace {

using detail::pairwise_sum;

// Collects Σ u^(0..2) weighted by f^(1+α) and f^(1+2α) in one pass.
struct ModelMoments {
    double J = 0.0;   // Σ u² f^(1+α)
    double xi = 0.0;  // Σ u  f^(1+α)
    double q = 0.0;   // Σ u² f^(1+2α)
};

ModelMoments model_moments(const ModelSpec& model, double theta, double alpha,
                           const TruncationPolicy& policy) {
    require_theta(model, theta);
    if (!(alpha >= 0.0))
        throw domain_error("alpha must be nonnegative");
    const std::int64_t top = truncation_point(model, theta, policy);
    const std::size_t m =
        static_cast<std::size_t>(top - model.support_origin + 1);

    std::vector<double> tj(m), txi(m), tq(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::int64_t x =
            model.support_origin + static_cast<std::int64_t>(i);
        const double lf = model.log_pmf(theta, x);
        const double u = model.log_pmf_deriv(theta, x, 1);
        const double w1 = std::exp((1.0 + alpha) * lf);
        const double w2 = std::exp((1.0 + 2.0 * alpha) * lf);
        tj[i] = u * u * w1;
        txi[i] = u * w1;
        tq[i] = u * u * w2;
    }
    ModelMoments mm;
    mm.J = pairwise_sum(tj);
    mm.xi = pairwise_sum(txi);
    mm.q = pairwise_sum(tq);
    return mm;
}

} // namespace

double model_J(const ModelSpec& model, double theta, double alpha,
               const TruncationPolicy& policy) {
    return model_moments(model, theta, alpha, policy).J;
}

double model_xi(const ModelSpec& model, double theta, double alpha,
                const TruncationPolicy& policy) {
    return model_moments(model, theta, alpha, policy).xi;
}

double model_V(const ModelSpec& model, double theta, double alpha,
               const TruncationPolicy& policy) {
    const ModelMoments mm = model_moments(model, theta, alpha, policy);
    return mm.q - mm.xi * mm.xi;
}

double sandwich_variance(const ModelSpec& model, double theta, double alpha,
                         const TruncationPolicy& policy) {
    const ModelMoments mm = model_moments(model, theta, alpha, policy);
    if (!(mm.J > 0.0))
        throw degenerate_information_error(
            "J is not positive definite at theta = " + std::to_string(theta));
    const double V = mm.q - mm.xi * mm.xi;
    return V / (mm.J * mm.J);
}

double are(const ModelSpec& model, double theta, double alpha,
           const TruncationPolicy& policy) {
    const double cramer_rao = 1.0 / fisher_information(model, theta);
    return 100.0 * cramer_rao / sandwich_variance(model, theta, alpha, policy);
}

AsymptoticReport asymptotic_report(const ModelSpec& model, double theta,
                                   double alpha) {
    const TruncationPolicy policy;
    const ModelMoments mm = model_moments(model, theta, alpha, policy);
    if (!(mm.J > 0.0))
        throw degenerate_information_error(
            "J is not positive definite at theta = " + std::to_string(theta));

    AsymptoticReport rep;
    rep.model = model.name;
    rep.theta = theta;
    rep.alpha = alpha;
    rep.J = mm.J;
    rep.xi = mm.xi;
    rep.V = mm.q - mm.xi * mm.xi;
    rep.sandwich = rep.V / (mm.J * mm.J);
    rep.fisher = fisher_information(model, theta);
    rep.are_percent = 100.0 / (rep.fisher * rep.sandwich);
    return rep;
}

namespace {

void require_geometric_theta(double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw domain_error("geometric closed forms need theta in (0, 1)");
}

// Shared core of the closed forms: theta^(a-1) (t² - θ(θ+2)t + 2θ²)
// / ((1-θ)² t³) with t = 1 - (1-θ)^(1+a).
double geometric_second_moment_form(double theta, double a) {
    const double q = 1.0 - theta;
    const double t = -std::expm1((1.0 + a) * std::log1p(-theta));
    const double numer =
        t * t - theta * (theta + 2.0) * t + 2.0 * theta * theta;
    return std::pow(theta, a - 1.0) * numer / (q * q * t * t * t);
}

} // namespace

double geometric_J_closed(double theta, double alpha) {
    require_geometric_theta(theta);
    return geometric_second_moment_form(theta, alpha);
}

double geometric_xi_closed(double theta, double alpha) {
    require_geometric_theta(theta);
    const double q = 1.0 - theta;
    const double t = -std::expm1((1.0 + alpha) * std::log1p(-theta));
    return std::pow(theta, alpha) * (t - theta) / (q * t * t);
}

double geometric_V_closed(double theta, double alpha) {
    require_geometric_theta(theta);
    const double t = -std::expm1((1.0 + alpha) * std::log1p(-theta));
    const double one_minus_qa = -std::expm1(alpha * std::log1p(-theta));
    const double xi_sq = std::pow(theta, 2.0 * alpha) * one_minus_qa *
                         one_minus_qa / (t * t * t * t);
    return geometric_second_moment_form(theta, 2.0 * alpha) - xi_sq;
}

std::pair<double, double> general_Jg_Vg(const PmfVector& g,
                                        const ModelSpec& model, double theta_g,
                                        const DivergenceParams& params,
                                        const TruncationPolicy& policy) {
    require_theta(model, theta_g);
    validate_pmf(g);
    if (g.origin < model.support_origin)
        throw domain_error("true pmf has mass below the model support origin");

    TruncationPolicy pol = policy;
    pol.data_max =
        g.origin + static_cast<std::int64_t>(g.masses.size()) - 1;
    const std::int64_t top = truncation_point(model, theta_g, pol);
    const std::size_t m =
        static_cast<std::size_t>(top - model.support_origin + 1);

    const double a1 = 1.0 + params.alpha;
    const double A = params.A;
    const double B = params.B;
    const bool a_limit = params.regime == Regime::ALimitZero;

    // All cell weights are assembled in log space:
    //   t1 = g^A f^B = K'(δ)(δ+1) f^(1+α),  t2 = f^(1+α),
    //   K f^(1+α) = (t1 - t2)/A   (log-ratio form when A = 0),
    //   ψ = K'(δ) f^α u = exp((A-1)·ln g + B·ln f) u.
    std::vector<double> tJ(m), tpsi2(m), tpsi1(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::int64_t x =
            model.support_origin + static_cast<std::int64_t>(i);
        const double lf = model.log_pmf(theta_g, x);
        const double u = model.log_pmf_deriv(theta_g, x, 1);
        const double u2 = model.log_pmf_deriv(theta_g, x, 2);
        const double curv = a1 * u * u + u2;
        const double t2 = std::exp(a1 * lf);

        const std::size_t gi = static_cast<std::size_t>(x - g.origin);
        const double gv =
            (x >= g.origin && gi < g.masses.size()) ? g.masses[gi] : 0.0;

        if (gv > 0.0) {
            const double lg = std::log(gv);
            const double t1 = std::exp(A * lg + B * lf);
            const double K_f = a_limit ? (lg - lf) * t2 : (t1 - t2) / A;
            tJ[i] = u * u * t1 - K_f * curv;
            // ψ² g and ψ g, both fully in log space
            tpsi2[i] = u * u * std::exp((2.0 * A - 1.0) * lg + 2.0 * B * lf);
            tpsi1[i] = t1 * u;
        } else {
            if (a_limit || A < 0.0)
                throw undefined_divergence(
                    "true pmf vanishes at x = " + std::to_string(x) +
                        " where the exponent A is not positive",
                    x);
            tJ[i] = t2 * curv / A;  // -K(-1) f^(1+α) (a1 u² + u₂)
            tpsi2[i] = 0.0;
            tpsi1[i] = 0.0;
        }
    }

    const double J = pairwise_sum(tJ);
    const double mean_psi = pairwise_sum(tpsi1);
    const double V = pairwise_sum(tpsi2) - mean_psi * mean_psi;
    return {J, V};
}

double std_error(const FitResult& fit, const FrequencyTable& data,
                 const ModelSpec& model, double alpha) {
    if (!fit.converged)
        throw domain_error("standard error requires a converged fit");
    return std::sqrt(sandwich_variance(model, fit.theta_hat, alpha) /
                     static_cast<double>(data.n()));
}

} // namespace sdiv
