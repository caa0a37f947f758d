#pragma once

#include <cstdint>
#include <vector>

#include "sdiv/errors.hpp"

namespace sdiv {

// Which formula applies: the generic three-term sum, or one of the two
// analytic limits where an exponent vanishes.
enum class Regime { Generic, ALimitZero, BLimitZero };

// The divergence family is indexed by (alpha, lambda); the derived exponents
//   A = 1 + lambda(1-alpha),   B = alpha - lambda(1-alpha)
// always satisfy A + B = 1 + alpha. |A| or |B| <= 1e-12 selects the
// corresponding limit formula.
struct DivergenceParams {
    double alpha = 0.0;
    double lambda = 0.0;
    double A = 1.0;
    double B = 0.0;
    Regime regime = Regime::BLimitZero;
};

// Validates alpha in [0,1] and the A+B identity; throws domain_error.
DivergenceParams make_divergence_params(double alpha, double lambda);

// A probability vector on consecutive integers starting at `origin`.
struct PmfVector {
    std::int64_t origin = 0;
    std::vector<double> masses;
};

// Throws domain_error if masses are negative or do not sum to 1 within tol.
void validate_pmf(const PmfVector& p, double tol = 1e-9);

// Divergence of g from f over a common support grid (same origin and
// length required). Conventions: 0*ln 0 = 0 and 0^p = 0 for p > 0; a cell
// where a zero mass meets a negative or log-type exponent raises
// undefined_divergence naming the cell.
double s_divergence(const PmfVector& g, const PmfVector& f,
                    const DivergenceParams& params);

// Estimating-equation kernel K(delta) = ((delta+1)^A - 1)/A for A != 0,
// ln(delta+1) in the A->0 limit regime. delta >= -1 required; delta = -1
// with A <= 0 is the empty-cell singularity (domain_error).
double kernel_K(double delta, const DivergenceParams& params);

// Closed-form derivatives: order 1 -> (delta+1)^(A-1), order 2 ->
// (A-1)(delta+1)^(A-2). delta = -1 with a negative exponent is a
// domain_error; integer-exponent edge cases (A = 1, A = 2) stay finite.
double kernel_K_deriv(double delta, const DivergenceParams& params, int order);

} // namespace sdiv
