#include "sdiv/estimation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "sdiv/errors.hpp"
#include "internal_util.hpp"

namespace sdiv {

namespace {

using detail::pairwise_sum;

constexpr double inf = std::numeric_limits<double>::infinity();

// log f and relative frequencies over the truncated support, which always
// extends to the largest observed point.
struct SupportGrid {
    std::int64_t origin = 0;
    std::vector<double> lf;
    std::vector<double> r;
};

SupportGrid build_grid(const FrequencyTable& data, const ModelSpec& model,
                       double theta, TruncationPolicy policy) {
    if (data.min_x() < model.support_origin)
        throw domain_error("data contains support point " +
                           std::to_string(data.min_x()) + " below the origin of " +
                           model.name);
    policy.data_max = data.max_x();
    const std::int64_t top = truncation_point(model, theta, policy);

    SupportGrid grid;
    grid.origin = model.support_origin;
    const std::size_t m = static_cast<std::size_t>(top - grid.origin + 1);
    grid.lf.resize(m);
    grid.r.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        grid.lf[i] = model.log_pmf(theta, grid.origin + static_cast<std::int64_t>(i));
    const double n = static_cast<double>(data.n());
    for (const auto& e : data.entries())
        grid.r[static_cast<std::size_t>(e.x - grid.origin)] =
            static_cast<double>(e.count) / n;
    return grid;
}

[[noreturn]] void throw_empty_cell(std::int64_t cell) {
    throw undefined_divergence(
        "empty support cell at x = " + std::to_string(cell) +
            " is incompatible with a non-positive data exponent",
        cell);
}

// In the A -> 0 limit the objective carries a term f * log(f / r), which is
// infinite on every cell the sample misses. A model with unbounded support
// always has such cells, no matter how the grid is truncated, so the
// estimation problem itself is undefined (this matches the blank entries in
// published fit grids at that corner of the parameter family).
[[noreturn]] void throw_a_limit_undefined(const SupportGrid& grid) {
    const std::int64_t past_end =
        grid.origin + static_cast<std::int64_t>(grid.lf.size());
    throw undefined_divergence(
        "the A = 0 member compares the model against the sample on the full "
        "model support; an unbounded-support model always has cells with no "
        "observations, so no minimizer exists",
        past_end);
}

double objective_on_grid(const SupportGrid& grid,
                         const DivergenceParams& params) {
    const double a1 = 1.0 + params.alpha;
    const double A = params.A;
    const double B = params.B;
    const std::size_t m = grid.lf.size();

    std::vector<double> fpow(m);
    for (std::size_t i = 0; i < m; ++i) fpow[i] = std::exp(a1 * grid.lf[i]);

    std::vector<double> cross;
    cross.reserve(m);
    switch (params.regime) {
        case Regime::Generic:
            for (std::size_t i = 0; i < m; ++i) {
                if (grid.r[i] > 0.0)
                    cross.push_back(
                        std::exp(B * grid.lf[i] + A * std::log(grid.r[i])));
                else if (A < 0.0)
                    throw_empty_cell(grid.origin + static_cast<std::int64_t>(i));
            }
            return (pairwise_sum(fpow) / A -
                    a1 / (A * B) * pairwise_sum(cross)) /
                   a1;

        case Regime::ALimitZero:
            throw_a_limit_undefined(grid);

        case Regime::BLimitZero:
            for (std::size_t i = 0; i < m; ++i)
                if (grid.r[i] > 0.0)
                    cross.push_back(std::pow(grid.r[i], a1) * grid.lf[i]);
            return (pairwise_sum(fpow) / a1 - pairwise_sum(cross)) / a1;
    }
    throw domain_error("unreachable divergence regime");
}

double gradient_on_grid(const SupportGrid& grid, const ModelSpec& model,
                        double theta, const DivergenceParams& params) {
    const double a1 = 1.0 + params.alpha;
    const double A = params.A;
    const double B = params.B;
    const std::size_t m = grid.lf.size();

    if (params.regime == Regime::ALimitZero) throw_a_limit_undefined(grid);

    std::vector<double> terms(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::int64_t x = grid.origin + static_cast<std::int64_t>(i);
        const double u = model.log_pmf_deriv(theta, x, 1);
        const double t2 = std::exp(a1 * grid.lf[i]);
        if (grid.r[i] > 0.0) {
            const double t1 = std::exp(B * grid.lf[i] + A * std::log(grid.r[i]));
            terms[i] = -(t1 - t2) / A * u;
        } else {
            if (A < 0.0) throw_empty_cell(x);
            terms[i] = t2 * u / A;  // K(-1) = -1/A
        }
    }
    return pairwise_sum(terms);
}

// Bijection between theta and the unconstrained solver variable z.
struct ParamTransform {
    bool half_line = false;  // log scale; otherwise logit on (lo, hi)
    double lo = 0.0, hi = 0.0;
    double z_lo = 0.0, z_hi = 0.0;  // exploration box in z

    double to_theta(double z) const {
        const double zc = std::clamp(z, z_lo, z_hi);
        if (half_line) return std::exp(zc);
        return lo + (hi - lo) / (1.0 + std::exp(-zc));
    }
    double to_z(double theta) const {
        double z;
        if (half_line) {
            z = std::log(theta);
        } else {
            const double p = (theta - lo) / (hi - lo);
            z = std::log(p / (1.0 - p));
        }
        return std::clamp(z, z_lo, z_hi);
    }
    // d theta / d z
    double dtheta_dz(double theta) const {
        if (half_line) return theta;
        return (theta - lo) * (hi - theta) / (hi - lo);
    }
};

ParamTransform make_transform(const ModelSpec& model,
                              const FrequencyTable& data) {
    ParamTransform t;
    t.lo = model.param_lo;
    t.hi = model.param_hi;
    if (std::isinf(model.param_hi)) {
        t.half_line = true;
        // The minimizer is never far above the data range; bounding the
        // exploration keeps tail truncation cheap and finite.
        const double hi = 10.0 * (static_cast<double>(data.max_x()) + 1.0);
        t.z_lo = std::log(1e-8);
        t.z_hi = std::log(hi);
    } else {
        // Keep theta far enough from both endpoints that the support
        // truncation stays below its hard cap.
        t.z_lo = std::log(1e-4 / (1.0 - 1e-4));
        t.z_hi = std::log((1.0 - 1e-9) / 1e-9);
    }
    return t;
}

std::vector<double> seed_thetas(const FrequencyTable& data,
                                const ModelSpec& model,
                                const ParamTransform& transform) {
    const bool half_line = transform.half_line;
    const double xbar = data.mean();
    const double med = static_cast<double>(data.median());
    std::vector<double> seeds;

    auto push = [&](double theta) {
        if (!std::isfinite(theta)) return;
        theta = transform.to_theta(transform.to_z(theta));
        for (double s : seeds)
            if (std::fabs(s - theta) <= 1e-12 * std::max(1.0, std::fabs(theta)))
                return;
        seeds.push_back(theta);
    };

    auto mle = [&](const FrequencyTable& d) {
        return half_line ? d.mean() : 1.0 / std::max(1.0, d.mean());
    };

    push(mle(data));
    if (data.entries().size() > 1) push(mle(data.drop_top_point()));
    // Median matching: Poisson median is close to theta - 1/3; a geometric
    // observation exceeds m with probability (1-theta)^m.
    if (half_line)
        push(med + 1.0 / 3.0);
    else
        push(1.0 - std::pow(2.0, -1.0 / std::max(1.0, med)));

    // Five coarse sweep points across the plausible range.
    if (half_line) {
        const double lo = std::max(1e-2, xbar / 50.0);
        const double hi = 3.0 * (static_cast<double>(data.max_x()) + 1.0);
        for (int i = 0; i < 5; ++i)
            push(lo * std::pow(hi / lo, static_cast<double>(i) / 4.0));
    } else {
        const double zl = std::log(0.02 / 0.98), zh = -zl;
        for (int i = 0; i < 5; ++i)
            push(1.0 / (1.0 + std::exp(-(zl + (zh - zl) * i / 4.0))));
    }
    return seeds;
}

struct SeedOutcome {
    double theta0 = 0.0;
    double theta = 0.0;
    double objective = inf;
    double grad = inf;
    int iterations = 0;
    bool converged = false;
    std::string status;
};

} // namespace

double objective_Hn(const FrequencyTable& data, const ModelSpec& model,
                    double theta, const DivergenceParams& params,
                    const TruncationPolicy& policy) {
    require_theta(model, theta);
    return objective_on_grid(build_grid(data, model, theta, policy), params);
}

double gradient_Hn(const FrequencyTable& data, const ModelSpec& model,
                   double theta, const DivergenceParams& params,
                   const TruncationPolicy& policy) {
    require_theta(model, theta);
    return gradient_on_grid(build_grid(data, model, theta, policy), model,
                            theta, params);
}

FitResult fit(const FrequencyTable& data, const ModelSpec& model,
              const DivergenceParams& params, const SolverOptions& options) {
    const ParamTransform transform = make_transform(model, data);
    const TruncationPolicy policy;

    // Objective/gradient in z. Trial points where the objective cannot be
    // evaluated (tail truncation overflow, or theta-dependent admissibility
    // edges) count as +infinity so the line search backs away from them;
    // a seed that starts undefined is reported as such instead.
    bool saw_undefined = false;
    std::string undefined_message;
    std::int64_t undefined_cell = 0;

    auto H_of_z = [&](double z) {
        const double theta = transform.to_theta(z);
        try {
            return objective_on_grid(build_grid(data, model, theta, policy),
                                     params);
        } catch (const undefined_divergence& e) {
            if (!saw_undefined) {
                saw_undefined = true;
                undefined_message = e.what();
                undefined_cell = e.cell();
            }
            return inf;
        } catch (const truncation_error&) {
            return inf;
        }
    };
    auto grad_theta = [&](double z) {
        const double theta = transform.to_theta(z);
        try {
            return gradient_on_grid(build_grid(data, model, theta, policy),
                                    model, theta, params);
        } catch (const undefined_divergence&) {
            return std::numeric_limits<double>::quiet_NaN();
        } catch (const truncation_error&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };

    const std::vector<double> seeds = seed_thetas(data, model, transform);
    std::vector<SeedOutcome> outcomes;
    outcomes.reserve(seeds.size());

    for (double theta0 : seeds) {
        SeedOutcome out;
        out.theta0 = theta0;
        double z = transform.to_z(theta0);
        double H = H_of_z(z);
        if (!std::isfinite(H)) {
            out.theta = theta0;
            out.status = "objective undefined at seed";
            outcomes.push_back(out);
            continue;
        }

        int iter = 0;
        for (; iter < options.max_iter; ++iter) {
            const double theta = transform.to_theta(z);
            const double gt = grad_theta(z);
            if (std::isnan(gt)) {
                out.status = "gradient undefined during iteration";
                break;
            }
            if (std::fabs(gt) <= options.grad_tol * std::max(1.0, std::fabs(H))) {
                out.converged = true;
                out.status = "converged";
                break;
            }
            const double gz = gt * transform.dtheta_dz(theta);

            // Curvature in z by central differences of the analytic gradient.
            const double h = 1e-5 * std::max(1.0, std::fabs(z));
            const double gzp = grad_theta(z + h) *
                               transform.dtheta_dz(transform.to_theta(z + h));
            const double gzm = grad_theta(z - h) *
                               transform.dtheta_dz(transform.to_theta(z - h));
            double step;
            const double curv = (gzp - gzm) / (2.0 * h);
            if (std::isfinite(curv) && curv > 0.0)
                step = -gz / curv;
            else
                step = (gz > 0.0 ? -1.0 : 1.0);  // descent fallback
            step = std::clamp(step, -2.0, 2.0);

            // Backtracking: accept the first strict decrease.
            double t = 1.0;
            bool accepted = false;
            for (int bt = 0; bt < 50; ++bt) {
                const double z_new = std::clamp(z + t * step, transform.z_lo,
                                                transform.z_hi);
                const double H_new = H_of_z(z_new);
                if (std::isfinite(H_new) && H_new < H) {
                    z = z_new;
                    H = H_new;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted) {
                // The line search hit the rounding floor of H. When the
                // objective is astronomically scaled (it can exceed 1e20 on
                // heavy-outlier fits) the achievable decrease vanishes while
                // the gradient is still above the tight tolerance, so accept
                // the point under a relaxed scale-relative test instead of
                // reporting a failure.
                if (std::fabs(gt) <=
                    1e4 * options.grad_tol * std::max(1.0, std::fabs(H))) {
                    out.converged = true;
                    out.status = "converged (line search at rounding floor)";
                } else {
                    out.status = "no descent direction (stalled)";
                }
                break;
            }
        }
        if (iter == options.max_iter) {
            // The loop tests the gradient before stepping, so give the last
            // accepted point its own chance.
            const double gt = grad_theta(z);
            if (!std::isnan(gt) &&
                std::fabs(gt) <= options.grad_tol * std::max(1.0, std::fabs(H))) {
                out.converged = true;
                out.status = "converged";
            } else {
                out.status = "iteration limit";
            }
        }

        out.theta = transform.to_theta(z);
        out.objective = H;
        const double g_final = grad_theta(z);
        out.grad = std::isnan(g_final) ? inf : std::fabs(g_final);
        out.iterations = iter;
        outcomes.push_back(out);
    }

    // Lowest-objective converged seed wins.
    const SeedOutcome* best = nullptr;
    for (const SeedOutcome& out : outcomes)
        if (out.converged && (!best || out.objective < best->objective))
            best = &out;

    if (!best) {
        std::ostringstream trace;
        bool all_undefined = !outcomes.empty();
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            const SeedOutcome& o = outcomes[i];
            if (o.status != "objective undefined at seed") all_undefined = false;
            if (i) trace << "; ";
            trace << "seed " << o.theta0 << " -> theta " << o.theta << ", H "
                  << o.objective << ", |grad| " << o.grad << ", iters "
                  << o.iterations << " (" << o.status << ")";
        }
        if (all_undefined && saw_undefined)
            throw undefined_divergence(undefined_message, undefined_cell);
        throw nonconvergence_error("no multi-start seed converged",
                                   trace.str());
    }

    FitResult result;
    result.theta_hat = best->theta;
    result.objective = best->objective;
    result.grad_norm = best->grad;
    result.iterations = best->iterations;
    result.seeds_tried = static_cast<int>(outcomes.size());
    result.converged = true;
    return result;
}

GridResult fit_grid(const FrequencyTable& data, const ModelSpec& model,
                    const std::vector<double>& alphas,
                    const std::vector<double>& lambdas,
                    const SolverOptions& options) {
    if (alphas.empty() || lambdas.empty())
        throw domain_error("grid axes must be nonempty");

    // Validate the whole grid up front so bad axes fail the call itself
    // rather than every cell.
    std::vector<DivergenceParams> params;
    params.reserve(lambdas.size() * alphas.size());
    for (double lambda : lambdas)
        for (double alpha : alphas)
            params.push_back(make_divergence_params(alpha, lambda));

    GridResult grid;
    grid.alphas = alphas;
    grid.lambdas = lambdas;
    grid.cells.resize(params.size());

    auto run_cell = [&](std::size_t idx) {
        GridCell& cell = grid.cells[idx];
        try {
            cell.result = fit(data, model, params[idx], options);
            cell.state = CellState::Ok;
        } catch (const undefined_divergence& e) {
            cell.state = CellState::Inadmissible;
            cell.message = e.what();
        } catch (const nonconvergence_error& e) {
            cell.state = CellState::NonConverged;
            cell.message = std::string(e.what()) + ": " + e.trace();
        } catch (const std::exception& e) {
            cell.state = CellState::NonConverged;
            cell.message = e.what();
        }
    };

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1 || params.size() <= 1) {
        for (std::size_t i = 0; i < params.size(); ++i) run_cell(i);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < params.size();
                 i = next.fetch_add(1))
                run_cell(i);
        };
        std::vector<std::thread> pool;
        const std::size_t count =
            std::min<std::size_t>(static_cast<std::size_t>(jobs), params.size());
        pool.reserve(count);
        for (std::size_t i = 0; i < count; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    return grid;
}

} // namespace sdiv
