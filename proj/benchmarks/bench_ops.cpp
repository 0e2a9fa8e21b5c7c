#include <benchmark/benchmark.h>

#include <random>

#include "mtcnn/ops.hpp"

namespace {

using mtcnn::Graph;
using mtcnn::Tensor;

template <typename S>
Tensor<S> random_tensor(mtcnn::Shape shape, std::mt19937_64& rng) {
  auto t = Tensor<S>::zeros(std::move(shape));
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (std::size_t i = 0; i < t.numel(); ++i) t.data()[i] = static_cast<S>(dist(rng));
  return t;
}

void BM_Conv1dForward(benchmark::State& state) {
  const std::size_t k = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  auto x = random_tensor<float>({64, 16, 100}, rng);
  auto kernel = random_tensor<float>({50, 16, k}, rng);
  auto bias = random_tensor<float>({50}, rng);
  for (auto _ : state) {
    Graph<float> g(false);
    auto out = mtcnn::conv1d(g, x, kernel, bias);
    benchmark::DoNotOptimize(out.data());
  }
  const std::size_t tout = 100 - k + 1;
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 64 * 50 * 16 * k * tout);
}
BENCHMARK(BM_Conv1dForward)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_Conv1dTrainStep(benchmark::State& state) {
  const std::size_t k = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  auto x = random_tensor<float>({64, 16, 100}, rng);
  x.set_requires_grad(true);
  auto kernel = random_tensor<float>({50, 16, k}, rng);
  kernel.set_requires_grad(true);
  auto bias = random_tensor<float>({50}, rng);
  bias.set_requires_grad(true);
  for (auto _ : state) {
    x.zero_grad();
    kernel.zero_grad();
    bias.zero_grad();
    Graph<float> g(true);
    auto out = mtcnn::conv1d(g, x, kernel, bias);
    auto loss = mtcnn::reduce_sum(g, out);
    g.backward(loss);
    benchmark::DoNotOptimize(kernel.grad());
  }
}
BENCHMARK(BM_Conv1dTrainStep)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

}  // namespace
