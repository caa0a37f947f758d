#include "sdiv/divergence.hpp"

#include <cmath>
#include <string>

namespace sdiv {

namespace {

constexpr double regime_eps = 1e-12;

[[noreturn]] void throw_zero_cell(std::int64_t cell, const char* what) {
    throw undefined_divergence(std::string(what) + " at support point " +
                                   std::to_string(cell),
                               cell);
}

} // namespace

DivergenceParams make_divergence_params(double alpha, double lambda) {
    if (!(alpha >= 0.0 && alpha <= 1.0) || !std::isfinite(alpha))
        throw domain_error("alpha must lie in [0, 1]");
    if (!std::isfinite(lambda))
        throw domain_error("lambda must be finite");

    DivergenceParams p;
    p.alpha = alpha;
    p.lambda = lambda;
    p.A = 1.0 + lambda * (1.0 - alpha);
    p.B = alpha - lambda * (1.0 - alpha);
    if (std::fabs(p.A) <= regime_eps)
        p.regime = Regime::ALimitZero;
    else if (std::fabs(p.B) <= regime_eps)
        p.regime = Regime::BLimitZero;
    else
        p.regime = Regime::Generic;
    return p;
}

void validate_pmf(const PmfVector& p, double tol) {
    if (p.masses.empty()) throw domain_error("empty probability vector");
    double sum = 0.0;
    for (double m : p.masses) {
        if (!(m >= 0.0))
            throw domain_error("probability vector has a negative mass");
        sum += m;
    }
    if (std::fabs(sum - 1.0) > tol)
        throw domain_error("probability vector sums to " +
                           std::to_string(sum) + ", not 1");
}

double s_divergence(const PmfVector& g, const PmfVector& f,
                    const DivergenceParams& params) {
    if (g.origin != f.origin || g.masses.size() != f.masses.size())
        throw domain_error(
            "divergence requires a common support grid for both pmfs");

    const double a1 = 1.0 + params.alpha;
    const double A = params.A;
    const double B = params.B;

    double sum_f = 0.0, sum_g = 0.0, cross = 0.0;
    // cross means Σ f^B g^A in the generic regime, Σ f^(1+α) ln(f/g) when
    // A = 0, and Σ g^(1+α) ln(g/f) when B = 0.
    for (std::size_t i = 0; i < f.masses.size(); ++i) {
        const double fv = f.masses[i];
        const double gv = g.masses[i];
        const std::int64_t cell = f.origin + static_cast<std::int64_t>(i);
        if (fv == 0.0 && gv == 0.0) continue;

        switch (params.regime) {
            case Regime::Generic:
                if (fv > 0.0) sum_f += std::pow(fv, a1);
                if (gv > 0.0) sum_g += std::pow(gv, a1);
                if (gv == 0.0) {
                    if (A < 0.0)
                        throw_zero_cell(cell,
                                        "zero mass raised to a negative exponent");
                    // A > 0: g^A = 0, the cross term vanishes.
                } else if (fv == 0.0) {
                    if (B < 0.0)
                        throw_zero_cell(cell,
                                        "zero mass raised to a negative exponent");
                    // B > 0 in this regime: f^B = 0, the cross term vanishes.
                } else {
                    cross += std::exp(B * std::log(fv) + A * std::log(gv));
                }
                break;

            case Regime::ALimitZero:
                // S = Σ f^(1+α) ln(f/g) − Σ (f^(1+α) − g^(1+α)) / (1+α)
                if (gv > 0.0) sum_g += std::pow(gv, a1);
                if (fv > 0.0) {
                    if (gv == 0.0)
                        throw_zero_cell(cell, "log of a zero mass ratio");
                    sum_f += std::pow(fv, a1);
                    cross += std::pow(fv, a1) * (std::log(fv) - std::log(gv));
                }
                break;

            case Regime::BLimitZero:
                // S = Σ g^(1+α) ln(g/f) − Σ (g^(1+α) − f^(1+α)) / (1+α)
                if (fv > 0.0) sum_f += std::pow(fv, a1);
                if (gv > 0.0) {
                    if (fv == 0.0)
                        throw_zero_cell(cell, "log of a zero mass ratio");
                    sum_g += std::pow(gv, a1);
                    cross += std::pow(gv, a1) * (std::log(gv) - std::log(fv));
                }
                break;
        }
    }

    switch (params.regime) {
        case Regime::Generic:
            return sum_f / A - a1 / (A * B) * cross + sum_g / B;
        case Regime::ALimitZero:
            return cross - (sum_f - sum_g) / a1;
        case Regime::BLimitZero:
            return cross - (sum_g - sum_f) / a1;
    }
    throw domain_error("unreachable divergence regime");
}

double kernel_K(double delta, const DivergenceParams& params) {
    if (!(delta >= -1.0))
        throw domain_error("kernel argument must satisfy delta >= -1");
    const double A = params.A;
    if (params.regime == Regime::ALimitZero) {
        if (delta == -1.0)
            throw domain_error("kernel log-limit undefined at delta = -1");
        return std::log1p(delta);
    }
    if (delta == -1.0) {
        if (A > 0.0) return -1.0 / A;
        throw domain_error("kernel undefined at delta = -1 for A < 0");
    }
    return std::expm1(A * std::log1p(delta)) / A;
}

double kernel_K_deriv(double delta, const DivergenceParams& params, int order) {
    if (!(delta >= -1.0))
        throw domain_error("kernel argument must satisfy delta >= -1");
    const double A =
        params.regime == Regime::ALimitZero ? 0.0 : params.A;

    if (order == 1) {
        // K'(delta) = (delta+1)^(A-1)
        if (delta == -1.0) {
            if (A > 1.0) return 0.0;
            if (A == 1.0) return 1.0;
            throw domain_error(
                "kernel derivative undefined at delta = -1 for A < 1");
        }
        return std::exp((A - 1.0) * std::log1p(delta));
    }
    if (order == 2) {
        // K''(delta) = (A-1)(delta+1)^(A-2)
        if (A == 1.0) return 0.0;
        if (delta == -1.0) {
            if (A > 2.0) return 0.0;
            if (A == 2.0) return 1.0;
            throw domain_error(
                "kernel second derivative undefined at delta = -1 for A < 2");
        }
        return (A - 1.0) * std::exp((A - 2.0) * std::log1p(delta));
    }
    throw domain_error("kernel derivative order must be 1 or 2");
}

} // namespace sdiv
