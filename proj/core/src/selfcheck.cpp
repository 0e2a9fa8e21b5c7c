#include "mtcnn/selfcheck.hpp"

#include <random>

#include "mtcnn/training.hpp"

namespace mtcnn {

ModelConfig gradcheck_config() {
  ModelConfig c;
  c.max_len = 12;
  c.d_page = 2;
  c.d_category = 1;
  c.d_time = 1;
  c.kernel_sizes = {2, 3};
  c.channels = {3, 3};
  c.fc1_dim = 8;
  c.shared_dim = 4;
  c.tasks = 2;
  c.dropout_rate = 0.0;
  c.pe_mode = PeMode::learnable;
  return c;
}

GradCheckResult run_model_gradcheck(std::uint64_t seed, std::size_t min_samples) {
  const ModelConfig config = gradcheck_config();
  const std::size_t vocab_pages = 5, vocab_categories = 3;
  MtcnnModel<double> model(config, vocab_pages, vocab_categories, seed);

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  const std::size_t batch = 6, n = config.max_len;
  EncodedBatch eb;
  eb.batch = batch;
  eb.length = n;
  eb.tasks = config.tasks;
  std::uniform_int_distribution<int> page(0, static_cast<int>(vocab_pages));
  std::uniform_int_distribution<int> cat(0, static_cast<int>(vocab_categories));
  std::uniform_real_distribution<double> dwell(-1.5, 1.5);
  std::uniform_int_distribution<int> coin(0, 1);
  const std::size_t valid_counts[batch] = {12, 9, 5, 2, 12, 7};
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      const bool valid = i >= n - valid_counts[b];
      eb.page_ids.push_back(valid ? page(rng) : 0);
      eb.category_ids.push_back(valid ? cat(rng) : 0);
      eb.dwell_norm.push_back(valid ? dwell(rng) : 0.0);
      eb.valid_mask.push_back(valid ? 1 : 0);
    }
    for (std::size_t t = 0; t < config.tasks; ++t) eb.labels.push_back(coin(rng));
    eb.amounts.push_back(1.0);
    eb.record_ids.push_back("g" + std::to_string(b));
  }

  const std::vector<double> weights(config.tasks, 1.0 / static_cast<double>(config.tasks));
  auto build_loss = [&](Graph<double>& g) {
    auto fwd = model.forward(g, eb, Mode::train, nullptr);
    return multitask_loss(g, fwd.logits, eb.labels, config.tasks, weights);
  };

  return check_gradients<double>(build_loss, model.named_params(), 1e-5, min_samples, seed);
}

}  // namespace mtcnn
