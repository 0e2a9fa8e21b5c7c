#include <benchmark/benchmark.h>

#include <random>

#include "mtcnn/generator.hpp"
#include "mtcnn/metrics.hpp"
#include "mtcnn/training.hpp"

namespace {

using namespace mtcnn;

EncodedBatch make_batch(std::size_t records) {
  GeneratorSpec spec;
  spec.train_records = records;
  spec.test_records = 0;
  auto data = generate_synthetic(spec, 11);
  auto vocab = build_vocab(data.train);
  return encode_batch(data.train, vocab, 100, spec.tasks);
}

void BM_ForwardEval(benchmark::State& state) {
  auto batch = make_batch(64);
  MtcnnModel<float> model(ModelConfig{}, 500, 100, 3);
  for (auto _ : state) {
    Graph<float> g(false);
    auto out = model.forward(g, batch, Mode::eval);
    benchmark::DoNotOptimize(out.shared.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 64);
}
BENCHMARK(BM_ForwardEval);

void BM_TrainStep(benchmark::State& state) {
  auto batch = make_batch(64);
  MtcnnModel<float> model(ModelConfig{}, 500, 100, 3);
  auto params = model.named_params();
  AdamState<float> adam;
  adam.init(params);
  std::mt19937_64 dropout_rng(5);
  const std::vector<double> weights(3, 1.0 / 3.0);
  for (auto _ : state) {
    Graph<float> g(true);
    auto fwd = model.forward(g, batch, Mode::train, &dropout_rng);
    auto loss = multitask_loss(g, fwd.logits, batch.labels, 3, weights);
    for (auto& p : params) p.tensor.zero_grad();
    g.backward(loss);
    adam_step(params, adam);
    benchmark::DoNotOptimize(loss.item());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 64);
}
BENCHMARK(BM_TrainStep);

void BM_KsStatistic(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = uni(rng);
    labels[i] = uni(rng) < 0.05 ? 1 : 0;
  }
  labels[0] = 1;
  labels[1] = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ks_statistic(scores, labels));
  }
}
BENCHMARK(BM_KsStatistic)->Arg(10000)->Arg(100000);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
