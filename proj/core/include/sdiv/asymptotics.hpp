#pragma once

#include <string>
#include <utility>

#include "sdiv/divergence.hpp"
#include "sdiv/estimation.hpp"
#include "sdiv/models.hpp"

namespace sdiv {

// Everything the first-order theory yields for a (model, theta, alpha)
// triple. At the model, these do not depend on lambda.
struct AsymptoticReport {
    std::string model;
    double theta = 0.0;
    double alpha = 0.0;
    double J = 0.0;         // sum u^2 f^(1+alpha)
    double V = 0.0;         // sum u^2 f^(1+2 alpha) - xi^2
    double xi = 0.0;        // sum u f^(1+alpha)
    double sandwich = 0.0;  // V / J^2, asymptotic variance of sqrt(n)(theta_hat - theta)
    double fisher = 0.0;
    double are_percent = 0.0;  // 100 * (1/fisher) / sandwich
};

double model_J(const ModelSpec& model, double theta, double alpha,
               const TruncationPolicy& policy = {});
double model_xi(const ModelSpec& model, double theta, double alpha,
                const TruncationPolicy& policy = {});
double model_V(const ModelSpec& model, double theta, double alpha,
               const TruncationPolicy& policy = {});

// V/J^2. Throws degenerate_information_error when J <= 0.
double sandwich_variance(const ModelSpec& model, double theta, double alpha,
                         const TruncationPolicy& policy = {});

// Efficiency relative to the MLE, in percent.
double are(const ModelSpec& model, double theta, double alpha,
           const TruncationPolicy& policy = {});

AsymptoticReport asymptotic_report(const ModelSpec& model, double theta,
                                   double alpha);

// Closed forms for the geometric family (cross-checks of the series sums):
//   t_a = 1 - (1-theta)^(1+a)
//   J_a = theta^(a-1) (t_a^2 - theta(theta+2) t_a + 2 theta^2)
//         / ((1-theta)^2 t_a^3)
//   xi_a = theta^a (t_a - theta) / ((1-theta) t_a^2)
//   V_a = [J-form at 2a, weight theta^(2a-1)] - theta^(2a)(1-(1-theta)^a)^2 / t_a^4
double geometric_J_closed(double theta, double alpha);
double geometric_xi_closed(double theta, double alpha);
double geometric_V_closed(double theta, double alpha);

// First-order quantities when the data-generating pmf g is not in the
// family, obtained by differentiating the estimating equation
// sum K(delta) grad f^(1+alpha) = const at its root:
//   J_g = sum u^2 K'(delta) f^alpha g
//         - sum K(delta) f^(1+alpha) ((1+alpha) u^2 + u'),
//   V_g = sum (K'(delta) f^alpha u)^2 g - (sum K'(delta) f^alpha u g)^2,
// with delta = g/f - 1. theta_g must be the best-fitting parameter for g
// under the same (alpha, lambda). Unlike the model case these depend on
// lambda.
std::pair<double, double> general_Jg_Vg(const PmfVector& g,
                                        const ModelSpec& model, double theta_g,
                                        const DivergenceParams& params,
                                        const TruncationPolicy& policy = {});

// sqrt(sandwich(theta_hat)/n) for a converged fit.
double std_error(const FitResult& fit, const FrequencyTable& data,
                 const ModelSpec& model, double alpha);

} // namespace sdiv
