// Microbenchmarks for the hot paths: objective/gradient evaluation, a full
// fit, the asymptotic-series sums, sampling, and a small simulation plan.

#include <benchmark/benchmark.h>

#include "sdiv/asymptotics.hpp"
#include "sdiv/divergence.hpp"
#include "sdiv/estimation.hpp"
#include "sdiv/frequency_table.hpp"
#include "sdiv/models.hpp"
#include "sdiv/simulation.hpp"

using namespace sdiv;

namespace {

FrequencyTable bench_data(std::int64_t n) {
    return sample(model_by_name("poisson"), 3.0, n, 12345);
}

void BM_objective(benchmark::State& state) {
    const auto data = bench_data(state.range(0));
    const ModelSpec& model = model_by_name("poisson");
    const auto params = make_divergence_params(0.5, -0.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(objective_Hn(data, model, 3.1, params));
}
BENCHMARK(BM_objective)->Arg(100)->Arg(5000);

void BM_gradient(benchmark::State& state) {
    const auto data = bench_data(state.range(0));
    const ModelSpec& model = model_by_name("poisson");
    const auto params = make_divergence_params(0.5, -0.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(gradient_Hn(data, model, 3.1, params));
}
BENCHMARK(BM_gradient)->Arg(100)->Arg(5000);

void BM_fit(benchmark::State& state) {
    const auto data = bench_data(state.range(0));
    const ModelSpec& model = model_by_name("poisson");
    const auto params = make_divergence_params(0.5, -0.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(fit(data, model, params));
}
BENCHMARK(BM_fit)->Arg(100)->Arg(5000);

void BM_model_J(benchmark::State& state) {
    const ModelSpec& model = model_by_name("poisson");
    for (auto _ : state)
        benchmark::DoNotOptimize(model_J(model, 10.0, 0.5));
}
BENCHMARK(BM_model_J);

void BM_sample(benchmark::State& state) {
    const ModelSpec& model = model_by_name("poisson");
    std::uint64_t seed = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(sample(model, 3.0, state.range(0), seed++));
}
BENCHMARK(BM_sample)->Arg(1000)->Arg(100000);

void BM_run_plan(benchmark::State& state) {
    SimPlan plan;
    plan.model = "poisson";
    plan.theta_true = 3.0;
    plan.n = 200;
    plan.replicates = 20;
    plan.alpha = 0.5;
    plan.lambda = -0.5;
    plan.seed = 7;
    const int jobs = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_plan(plan, jobs));
}
BENCHMARK(BM_run_plan)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
