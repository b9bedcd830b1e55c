#include <benchmark/benchmark.h>

#include <fairgen/classifier.hpp>
#include <fairgen/generator.hpp>
#include <fairgen/pipeline.hpp>

using namespace fairgen;

namespace {

struct Fixture {
  Oracle oracle{OracleConfig{}};
  OracleGenerator generator{oracle};
  GroupSet groups = GroupSet::defaults(5);
  LabeledData features, latents;
  std::vector<LinearModel> feature_models, probes;

  Fixture() {
    RngHandle rng(7);
    for (int i = 0; i < 5000; ++i) {
      const auto z = sample_latent(rng, 16);
      features.add(oracle.generate(z).values(), oracle.true_group(z));
      latents.add(z.values(), oracle.true_group(z));
    }
    feature_models = train_ovr(features, groups, Space::feature, TrainConfig{});
    probes = train_ovr(latents, groups, Space::latent, TrainConfig{});
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_SampleLatent(benchmark::State& state) {
  RngHandle rng(1);
  const auto d = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_latent(rng, d));
}
BENCHMARK(BM_SampleLatent)->Arg(16)->Arg(512);

void BM_OracleGenerate(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const Oracle oracle(OracleConfig{.latent_dim = d, .feature_dim = d / 8});
  RngHandle rng(2);
  const auto z = sample_latent(rng, d);
  for (auto _ : state) benchmark::DoNotOptimize(oracle.generate(z));
}
BENCHMARK(BM_OracleGenerate)->Arg(16)->Arg(512);

void BM_LogisticGradient(benchmark::State& state) {
  const auto& f = fixture();
  const auto& m = f.feature_models.front();
  for (auto _ : state) benchmark::DoNotOptimize(logistic_gradient(m.weights, m.bias, f.features, 1e-4));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.features.size()));
}
BENCHMARK(BM_LogisticGradient);

void BM_TrainOvr(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(train_ovr(f.features, f.groups, Space::feature, TrainConfig{}));
}
BENCHMARK(BM_TrainOvr)->Unit(benchmark::kMillisecond);

void BM_Survey(benchmark::State& state) {
  const auto& f = fixture();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    RngHandle rng(3);
    benchmark::DoNotOptimize(survey_unguided({.samples = n}, f.generator, f.feature_models, f.groups, rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Survey)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_GenerateBalanced(benchmark::State& state) {
  const auto& f = fixture();
  const BalancePlan plan{.quota_per_group = static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) {
    RngHandle rng(4);
    benchmark::DoNotOptimize(generate_balanced(plan, f.generator, f.probes, f.feature_models, f.groups, rng));
  }
}
BENCHMARK(BM_GenerateBalanced)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
