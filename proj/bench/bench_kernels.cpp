#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "ids/harness.hpp"
#include "ids/linear.hpp"

using namespace ids;

namespace {

ExperimentConfig bernoulli_config(std::size_t trials) {
  ExperimentConfig c;
  c.environment.family = Family::bernoulli;
  c.environment.arms = 10;
  c.horizon = 200;
  c.trials = trials;
  c.master_seed = 1;
  c.policies = parse_policy_list("ids,ts");
  return c;
}

void BM_ExperimentParallel(benchmark::State& state) {
  const ExperimentConfig c = bernoulli_config(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c));
}

void BM_ExperimentSerial(benchmark::State& state) {
  const ExperimentConfig c = bernoulli_config(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment_serial(c));
}

struct LinearFixture {
  ActionMatrix actions;
  ThetaSampler sampler;
  MonteCarloConfig mc;

  explicit LinearFixture(std::size_t samples) {
    Rng rng(3);
    actions.rows.resize(30, 5);
    std::normal_distribution<double> n01;
    for (Eigen::Index i = 0; i < actions.rows.size(); ++i)
      actions.rows.data()[i] = n01(rng) / std::sqrt(5.0);
    sampler = gaussian_theta_sampler(LinearGaussianPosterior::isotropic_prior(5, 10.0, 1.0));
    mc.num_samples = samples;
    mc.seed = 9;
  }
};

void BM_LinearStatsParallel(benchmark::State& state) {
  const LinearFixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(linear_ids_stats(f.actions, f.sampler, f.mc));
}

void BM_LinearStatsSerial(benchmark::State& state) {
  const LinearFixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(linear_ids_stats_serial(f.actions, f.sampler, f.mc));
}

}  // namespace

BENCHMARK(BM_ExperimentParallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExperimentSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LinearStatsParallel)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LinearStatsSerial)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
