#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mtcnn/data.hpp"
#include "mtcnn/embedding.hpp"
#include "mtcnn/gradcheck.hpp"
#include "mtcnn/ops.hpp"
#include "mtcnn/tensor.hpp"

namespace mtcnn {

/// Architecture hyperparameters. Defaults follow the deployed configuration:
/// kernel sizes [8,16,32,64], 50 channels each, max length 100, dropout 0.5.
struct ModelConfig {
  std::size_t max_len = 100;                        // N
  std::size_t d_page = 8;
  std::size_t d_category = 6;
  std::size_t d_time = 2;
  std::vector<std::size_t> kernel_sizes = {8, 16, 32, 64};
  std::vector<std::size_t> channels = {50, 50, 50, 50};
  std::size_t fc1_dim = 128;
  std::size_t shared_dim = 32;                      // exported embedding size
  std::size_t tasks = 3;
  std::size_t classes_per_task = 2;
  double dropout_rate = 0.5;
  PeMode pe_mode = PeMode::fixed;

  std::size_t dim() const { return d_page + d_category + d_time; }
  std::size_t feature_dim() const;  // sum of channels
  void validate() const;

  /// Stable serialization for checkpoints and compatibility checks.
  std::map<std::string, std::string> to_map() const;
  static ModelConfig from_map(const std::map<std::string, std::string>& m);
  bool operator==(const ModelConfig& other) const;
};

/// Closed-form parameter counts per component.
struct ParamCount {
  std::vector<std::pair<std::string, std::size_t>> components;
  std::size_t total = 0;
};

ParamCount count_params(const ModelConfig& config, std::size_t vocab_pages, std::size_t vocab_categories);

template <typename S>
struct ForwardResult {
  Tensor<S> shared;                  // [B x shared_dim]
  std::vector<Tensor<S>> logits;     // T tensors of [B x classes]
};

/// The multi-range-kernel CNN encoder with per-task heads.
template <typename S>
class MtcnnModel {
 public:
  MtcnnModel() = default;
  MtcnnModel(ModelConfig config, std::size_t vocab_pages, std::size_t vocab_categories, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  std::size_t vocab_pages() const { return vocab_pages_; }
  std::size_t vocab_categories() const { return vocab_categories_; }

  /// One conv block: conv1d (valid) -> batchnorm -> masked max-over-time
  /// -> relu. Windows whose receptive field holds no valid position are
  /// excluded from the max.
  Tensor<S> conv_block(Graph<S>& g, const Tensor<S>& s, std::size_t block,
                       const std::vector<std::uint8_t>& valid_mask, Mode mode);

  /// Full forward pass; dropout_rng is required in train mode when
  /// dropout_rate > 0.
  ForwardResult<S> forward(Graph<S>& g, const EncodedBatch& batch, Mode mode,
                           std::mt19937_64* dropout_rng = nullptr);

  /// All trainable tensors, in a stable order with stable names.
  std::vector<NamedParam<S>> named_params();
  /// Non-trainable persistent state (BN running stats), for checkpoints.
  std::vector<std::pair<std::string, std::vector<S>*>> named_buffers();

  std::size_t parameter_count();

  EmbeddingTables<S>& embeddings() { return embed_; }
  PositionalEncoder<S>& positional() { return pe_; }
  BNState<S>& bn_state(std::size_t block) { return bn_state_[block]; }

 private:
  ModelConfig config_;
  std::size_t vocab_pages_ = 0;
  std::size_t vocab_categories_ = 0;

  EmbeddingTables<S> embed_;
  PositionalEncoder<S> pe_;
  std::vector<Tensor<S>> conv_w_, conv_b_;
  std::vector<Tensor<S>> bn_gamma_, bn_beta_;
  std::vector<BNState<S>> bn_state_;
  Tensor<S> fc1_w_, fc1_b_, fc2_w_, fc2_b_;
  std::vector<Tensor<S>> head_w_, head_b_;
};

/// Window validity for a conv block: window t is valid iff any input
/// position in [t, t+k) is valid. One byte per (row, window).
std::vector<std::uint8_t> window_mask(const std::vector<std::uint8_t>& valid_mask, std::size_t batch,
                                      std::size_t n, std::size_t kernel);

/// Per-record scores (positive-class softmax per task) and shared vectors,
/// computed in eval mode over minibatches.
struct ScoredRecords {
  std::vector<std::string> ids;
  std::size_t tasks = 0;
  std::vector<std::vector<double>> scores;   // [record][task]
  std::vector<std::vector<double>> vectors;  // [record][shared_dim], optional
  std::vector<int> labels;                   // [record * task]
  std::vector<double> amounts;
};

template <typename S>
ScoredRecords score_records(MtcnnModel<S>& model, const EncodedBatch& batch, bool with_vectors,
                            std::size_t minibatch = 256);

/// JSON-Lines embedding export: {"id", "scores": [..], "vector": [..]}.
template <typename S>
void export_embedding(MtcnnModel<S>& model, const EncodedBatch& batch, const std::string& path);

}  // namespace mtcnn
