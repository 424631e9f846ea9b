// Serial reference vs. OpenMP kernels on random tasks.

#include "invlab/constructions.hpp"
#include "invlab/kernels.hpp"
#include "invlab/rng.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace invlab;

struct Workload {
  TaskSpec task;
  TransitionModel t;
  std::vector<Policy> policies;
};

Workload make_workload(Index states, std::size_t count) {
  Rng rng = make_stream(42, static_cast<std::uint64_t>(states));
  Matrix reward = Matrix::NullaryExpr(states, 3, [&] { return std::uniform_real_distribution<>(0, 1)(rng); });
  Vector d0 = Vector::Constant(states, 1.0 / static_cast<double>(states));
  Workload w{make_task(0.9, d0, reward), random_transition_model(rng, states, 3, 1.0), {}};
  for (std::size_t k = 0; k < count; ++k) w.policies.push_back(random_policy(rng, states, 3));
  return w;
}

void BM_EvaluateSerial(benchmark::State& st) {
  Workload w = make_workload(st.range(0), 256);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::evaluate_values(w.t, w.task, w.policies));
}

void BM_EvaluateParallel(benchmark::State& st) {
  Workload w = make_workload(st.range(0), 256);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::parallel::evaluate_values(w.t, w.task, w.policies));
}

std::pair<std::vector<double>, std::vector<double>> value_pair(std::size_t n) {
  Rng rng = make_stream(7, n);
  std::uniform_real_distribution<> u(0, 10);
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = u(rng), b[i] = u(rng);
  return {a, b};
}

void BM_BestPairSerial(benchmark::State& st) {
  auto [a, b] = value_pair(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::best_pair(a, b));
}

void BM_BestPairParallel(benchmark::State& st) {
  auto [a, b] = value_pair(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::parallel::best_pair(a, b));
}

void search(benchmark::State& st, Execution exec) {
  TaskSpec task = figure_task_and_models().task;
  SearchConfig config(ThetaFamily::two_action(task));
  config.trials = static_cast<std::size_t>(st.range(0));
  config.seed = 7;
  for (auto _ : st) benchmark::DoNotOptimize(dirichlet_search(task, config, exec));
}

void BM_SearchSerial(benchmark::State& st) { search(st, Execution::Serial); }
void BM_SearchParallel(benchmark::State& st) { search(st, Execution::Parallel); }

}  // namespace

BENCHMARK(BM_EvaluateSerial)->Arg(8)->Arg(32)->Arg(128);
BENCHMARK(BM_EvaluateParallel)->Arg(8)->Arg(32)->Arg(128);
BENCHMARK(BM_BestPairSerial)->Arg(256)->Arg(2048);
BENCHMARK(BM_BestPairParallel)->Arg(256)->Arg(2048);
BENCHMARK(BM_SearchSerial)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SearchParallel)->Arg(50)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
