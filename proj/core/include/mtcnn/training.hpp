#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mtcnn/model.hpp"

namespace mtcnn {

/// Random Loss Weighting: softmax of a fresh standard-normal draw per
/// training iteration. Every weight vector is strictly positive and sums
/// to one.
class RlwSampler {
 public:
  RlwSampler(std::size_t tasks, std::uint64_t seed);
  std::vector<double> sample();
  std::size_t tasks() const { return tasks_; }

 private:
  std::size_t tasks_;
  std::mt19937_64 rng_;
};

/// softmax(xi) for an explicit draw; exposed for deterministic tests.
std::vector<double> rlw_softmax(const std::vector<double>& xi);

enum class WeightingKind { rlw, uniform, fixed };

struct Weighting {
  WeightingKind kind = WeightingKind::rlw;
  std::vector<double> fixed_weights;  // used when kind == fixed

  static Weighting parse(const std::string& s, std::size_t tasks);
  std::string to_string() const;
};

/// sum_t weights[t] * CE(logits[t], labels[:, t])
template <typename S>
Tensor<S> multitask_loss(Graph<S>& g, const std::vector<Tensor<S>>& logits, const std::vector<int>& labels,
                         std::size_t tasks, const std::vector<double>& weights);

/// Adam moment buffers for one named parameter set.
template <typename S>
struct AdamState {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step = 0;
  std::vector<std::vector<S>> m;  // parallel to the parameter list
  std::vector<std::vector<S>> v;

  void init(const std::vector<NamedParam<S>>& params);
};

/// One bias-corrected Adam update from the parameters' current gradients.
/// A non-finite gradient aborts the step with NumericError.
template <typename S>
void adam_step(std::vector<NamedParam<S>>& params, AdamState<S>& state);

struct TrainOptions {
  std::size_t batch_size = 64;
  std::size_t epochs = 5;
  double lr = 1e-4;
  Weighting weighting;
  std::uint64_t seed = 42;
};

struct EpochLog {
  std::size_t epoch = 0;
  std::vector<double> task_ce;  // unweighted per-task CE, epoch mean
  std::vector<double> val_ks;   // empty when no validation split
  double wall_s = 0.0;
};

std::string epoch_log_json(const EpochLog& log);

/// Mini-batch training loop: forward (train) -> task weights -> weighted
/// loss -> backward -> Adam. Deterministic under (seed, data, config).
template <typename S>
std::vector<EpochLog> train(MtcnnModel<S>& model, const EncodedBatch& train_set, const EncodedBatch* val_set,
                            const TrainOptions& options,
                            const std::function<void(const EpochLog&)>& on_epoch = nullptr);

}  // namespace mtcnn
