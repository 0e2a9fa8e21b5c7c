#include "mtcnn/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "mtcnn/kvconfig.hpp"
#include "mtcnn/metrics.hpp"

namespace mtcnn {

RlwSampler::RlwSampler(std::size_t tasks, std::uint64_t seed) : tasks_(tasks), rng_(seed) {
  if (tasks == 0) throw ConfigError("RlwSampler: tasks must be >= 1");
}

std::vector<double> rlw_softmax(const std::vector<double>& xi) {
  double m = *std::max_element(xi.begin(), xi.end());
  std::vector<double> w(xi.size());
  double sum = 0;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    w[i] = std::exp(xi[i] - m);
    sum += w[i];
  }
  for (auto& v : w) v /= sum;
  return w;
}

std::vector<double> RlwSampler::sample() {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> xi(tasks_);
  for (auto& v : xi) v = normal(rng_);
  return rlw_softmax(xi);
}

Weighting Weighting::parse(const std::string& s, std::size_t tasks) {
  Weighting w;
  if (s == "rlw") {
    w.kind = WeightingKind::rlw;
  } else if (s == "uniform") {
    w.kind = WeightingKind::uniform;
  } else if (s.rfind("fixed:", 0) == 0) {
    w.kind = WeightingKind::fixed;
    for (const auto& p : split(s.substr(6), ',')) {
      try {
        w.fixed_weights.push_back(std::stod(trim(p)));
      } catch (const std::exception&) {
        throw ConfigError("weighting: bad fixed weight '" + p + "'");
      }
    }
    if (w.fixed_weights.size() != tasks)
      throw ConfigError("weighting: fixed weights count " + std::to_string(w.fixed_weights.size()) +
                        " != tasks " + std::to_string(tasks));
  } else {
    throw ConfigError("weighting: expected rlw, uniform, or fixed:<w1,..,wT>, got '" + s + "'");
  }
  return w;
}

std::string Weighting::to_string() const {
  switch (kind) {
    case WeightingKind::rlw: return "rlw";
    case WeightingKind::uniform: return "uniform";
    case WeightingKind::fixed: {
      std::string s = "fixed:";
      for (std::size_t i = 0; i < fixed_weights.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(fixed_weights[i]);
      }
      return s;
    }
  }
  return "?";
}

template <typename S>
Tensor<S> multitask_loss(Graph<S>& g, const std::vector<Tensor<S>>& logits, const std::vector<int>& labels,
                         std::size_t tasks, const std::vector<double>& weights) {
  if (logits.size() != tasks)
    throw ShapeError("multitask_loss: " + std::to_string(logits.size()) + " logit tensors for " +
                     std::to_string(tasks) + " tasks");
  if (weights.size() != tasks)
    throw ShapeError("multitask_loss: " + std::to_string(weights.size()) + " weights for " +
                     std::to_string(tasks) + " tasks");
  const std::size_t batch = logits[0].dim(0);
  if (labels.size() != batch * tasks)
    throw ShapeError("multitask_loss: labels size " + std::to_string(labels.size()) + " != B*T");

  std::vector<Tensor<S>> per_task;
  std::vector<int> task_labels(batch);
  for (std::size_t t = 0; t < tasks; ++t) {
    for (std::size_t i = 0; i < batch; ++i) task_labels[i] = labels[i * tasks + t];
    per_task.push_back(softmax_cross_entropy(g, logits[t], task_labels));
  }
  return weighted_sum(g, per_task, weights);
}

template <typename S>
void AdamState<S>::init(const std::vector<NamedParam<S>>& params) {
  step = 0;
  m.clear();
  v.clear();
  for (const auto& p : params) {
    m.emplace_back(p.tensor.numel(), S(0));
    v.emplace_back(p.tensor.numel(), S(0));
  }
}

template <typename S>
void adam_step(std::vector<NamedParam<S>>& params, AdamState<S>& state) {
  if (state.m.size() != params.size()) throw ConfigError("adam_step: state not initialized for parameters");
  for (auto& p : params)
    if (p.tensor.has_grad())
      for (std::size_t i = 0; i < p.tensor.numel(); ++i)
        if (!std::isfinite(static_cast<double>(p.tensor.grad()[i])))
          throw NumericError("adam_step: non-finite gradient in '" + p.name + "'");

  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const S b1 = static_cast<S>(state.beta1), b2 = static_cast<S>(state.beta2);
  const S one_m_b1 = static_cast<S>(1.0 - state.beta1), one_m_b2 = static_cast<S>(1.0 - state.beta2);
  const S step_size = static_cast<S>(state.lr / bc1);
  const S inv_sqrt_bc2 = static_cast<S>(1.0 / std::sqrt(bc2));
  const S eps = static_cast<S>(state.eps);

  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor<S>& t = params[pi].tensor;
    const S* gp = t.grad();  // zero-filled if never touched
    S* mp = state.m[pi].data();
    S* vp = state.v[pi].data();
    S* data = t.data();
    for (std::size_t i = 0; i < t.numel(); ++i) {
      const S gv = gp[i];
      mp[i] = b1 * mp[i] + one_m_b1 * gv;
      vp[i] = b2 * vp[i] + one_m_b2 * gv * gv;
      data[i] -= step_size * mp[i] / (std::sqrt(vp[i]) * inv_sqrt_bc2 + eps);
    }
  }
}

std::string epoch_log_json(const EpochLog& log) {
  nlohmann::json j;
  j["epoch"] = log.epoch;
  j["task_ce"] = log.task_ce;
  j["val_ks"] = log.val_ks;
  j["wall_s"] = log.wall_s;
  return j.dump();
}

template <typename S>
std::vector<EpochLog> train(MtcnnModel<S>& model, const EncodedBatch& train_set, const EncodedBatch* val_set,
                            const TrainOptions& options,
                            const std::function<void(const EpochLog&)>& on_epoch) {
  if (train_set.batch == 0) throw ConfigError("train: empty dataset");
  const std::size_t tasks = model.config().tasks;
  if (train_set.tasks != tasks)
    throw ConfigError("train: dataset has " + std::to_string(train_set.tasks) + " tasks, model expects " +
                      std::to_string(tasks));
  if (options.weighting.kind == WeightingKind::fixed && options.weighting.fixed_weights.size() != tasks)
    throw ConfigError("train: fixed weights do not match task count");

  // independent streams derived from the run seed
  std::mt19937_64 master(options.seed);
  std::mt19937_64 shuffle_rng(master());
  std::mt19937_64 dropout_rng(master());
  RlwSampler rlw(tasks, master());

  auto params = model.named_params();
  AdamState<S> adam;
  adam.lr = options.lr;
  adam.init(params);

  const std::vector<double> uniform_w(tasks, 1.0 / static_cast<double>(tasks));

  std::vector<EpochLog> logs;
  std::vector<std::size_t> order(train_set.batch);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t global_step = 0;

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    std::vector<double> ce_sum(tasks, 0.0);
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t stop = std::min(order.size(), start + options.batch_size);
      std::vector<std::size_t> rows(order.begin() + start, order.begin() + stop);
      EncodedBatch mb = gather_rows(train_set, rows);
      ++global_step;

      Graph<S> g(true);
      auto fwd = model.forward(g, mb, Mode::train, &dropout_rng);

      std::vector<double> weights;
      switch (options.weighting.kind) {
        case WeightingKind::rlw: weights = rlw.sample(); break;
        case WeightingKind::uniform: weights = uniform_w; break;
        case WeightingKind::fixed: weights = options.weighting.fixed_weights; break;
      }

      // keep the per-task CE tensors so unweighted values can be logged
      std::vector<Tensor<S>> per_task;
      std::vector<int> task_labels(mb.batch);
      for (std::size_t t = 0; t < tasks; ++t) {
        for (std::size_t i = 0; i < mb.batch; ++i) task_labels[i] = mb.labels[i * tasks + t];
        per_task.push_back(softmax_cross_entropy(g, fwd.logits[t], task_labels));
        ce_sum[t] += static_cast<double>(per_task[t].item());
      }
      auto loss = weighted_sum(g, per_task, weights);
      if (!std::isfinite(static_cast<double>(loss.item())))
        throw NumericError("train: non-finite loss at step " + std::to_string(global_step));

      for (auto& p : params) p.tensor.zero_grad();
      g.backward(loss);
      try {
        adam_step(params, adam);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " at step " + std::to_string(global_step));
      }
      ++batches;
    }

    EpochLog log;
    log.epoch = epoch + 1;
    log.task_ce.resize(tasks);
    for (std::size_t t = 0; t < tasks; ++t) log.task_ce[t] = ce_sum[t] / static_cast<double>(batches);
    if (val_set && val_set->batch > 0) {
      auto scored = score_records(model, *val_set, /*with_vectors=*/false);
      log.val_ks.resize(tasks);
      for (std::size_t t = 0; t < tasks; ++t) {
        std::vector<double> s(scored.scores.size());
        std::vector<int> l(scored.scores.size());
        for (std::size_t i = 0; i < scored.scores.size(); ++i) {
          s[i] = scored.scores[i][t];
          l[i] = scored.labels[i * tasks + t];
        }
        bool has_pos = false, has_neg = false;
        for (int li : l) (li ? has_pos : has_neg) = true;
        log.val_ks[t] = (has_pos && has_neg) ? ks_statistic(s, l) : -1.0;
      }
    }
    log.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_epoch) on_epoch(log);
    logs.push_back(std::move(log));
  }
  return logs;
}

#define MTCNN_INSTANTIATE_TRAIN(S)                                                                     \
  template Tensor<S> multitask_loss<S>(Graph<S>&, const std::vector<Tensor<S>>&,                       \
                                       const std::vector<int>&, std::size_t,                           \
                                       const std::vector<double>&);                                    \
  template struct AdamState<S>;                                                                        \
  template void adam_step<S>(std::vector<NamedParam<S>>&, AdamState<S>&);                              \
  template std::vector<EpochLog> train<S>(MtcnnModel<S>&, const EncodedBatch&, const EncodedBatch*,    \
                                          const TrainOptions&,                                         \
                                          const std::function<void(const EpochLog&)>&);

MTCNN_INSTANTIATE_TRAIN(float)
MTCNN_INSTANTIATE_TRAIN(double)

#undef MTCNN_INSTANTIATE_TRAIN

}  // namespace mtcnn
