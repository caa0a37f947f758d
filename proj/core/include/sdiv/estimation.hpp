#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdiv/divergence.hpp"
#include "sdiv/frequency_table.hpp"
#include "sdiv/models.hpp"

namespace sdiv {

struct SolverOptions {
    double grad_tol = 1e-9;   // relative: |grad| <= grad_tol * max(1, |H|)
    int max_iter = 200;       // Newton iterations per seed
    int jobs = 1;             // grid-level parallelism
};

struct FitResult {
    double theta_hat = 0.0;
    double objective = 0.0;       // H_n at the optimum
    double grad_norm = 0.0;       // |gradient_Hn| at theta_hat
    int iterations = 0;           // iterations of the winning seed
    int seeds_tried = 0;
    bool converged = false;
    std::optional<double> std_error;
};

// H_n(theta): the theta-dependent part of the divergence between the
// empirical frequencies and f_theta, summed over the truncated support
// (always extended to cover the largest observed point). Regimes with a
// vanishing exponent use the analytic limit forms. Throws
// undefined_divergence when the (alpha, lambda) pair is inadmissible for
// this dataset (empty support cell against a non-positive exponent).
double objective_Hn(const FrequencyTable& data, const ModelSpec& model,
                    double theta, const DivergenceParams& params,
                    const TruncationPolicy& policy = {});

// dH_n/dtheta = -sum_x K(delta(x)) f^(1+alpha)(x) u(x), delta = r/f - 1.
// Unobserved support cells enter through K(-1) = -1/A.
double gradient_Hn(const FrequencyTable& data, const ModelSpec& model,
                   double theta, const DivergenceParams& params,
                   const TruncationPolicy& policy = {});

// Minimizes H_n by safeguarded Newton on an unconstrained scale (log theta
// for half-line parameters, logit for interval ones), started from a
// deterministic multi-start seed set; the lowest-objective converged seed
// wins. Throws undefined_divergence for inadmissible (alpha, lambda) and
// nonconvergence_error (with per-seed trace) when no seed converges.
FitResult fit(const FrequencyTable& data, const ModelSpec& model,
              const DivergenceParams& params, const SolverOptions& options = {});

enum class CellState { Ok, Inadmissible, NonConverged };

struct GridCell {
    CellState state = CellState::Inadmissible;
    FitResult result;            // valid when state == Ok
    std::string message;         // diagnostic for non-Ok states
};

struct GridResult {
    std::vector<double> alphas;   // columns
    std::vector<double> lambdas;  // rows
    std::vector<GridCell> cells;  // row-major: lambdas.size() x alphas.size()

    const GridCell& cell(std::size_t row, std::size_t col) const {
        return cells[row * alphas.size() + col];
    }
};

// Fits every (lambda, alpha) cell; per-cell failures become cell states and
// never abort the grid. Deterministic regardless of options.jobs.
GridResult fit_grid(const FrequencyTable& data, const ModelSpec& model,
                    const std::vector<double>& alphas,
                    const std::vector<double>& lambdas,
                    const SolverOptions& options = {});

} // namespace sdiv
