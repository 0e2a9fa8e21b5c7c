#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mtcnn/tensor.hpp"

namespace mtcnn {

/// out[i,j] = sum_k x[i,k] * W[k,j] + b[j]
template <typename S>
Tensor<S> affine(Graph<S>& g, const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>& b);

/// Valid (no-padding) 1-D convolution.
/// x: [B x C_in x L], kernel: [C_out x C_in x k], bias: [C_out]
/// out: [B x C_out x (L - k + 1)]
template <typename S>
Tensor<S> conv1d(Graph<S>& g, const Tensor<S>& x, const Tensor<S>& kernel, const Tensor<S>& bias);

/// Per-channel max over the time axis. x: [B x C x T] -> [B x C].
/// mask, when given, has B*T entries; masked-out positions never win.
/// Backward routes the gradient to exactly one argmax position per (b, c),
/// first occurrence on ties.
template <typename S>
Tensor<S> max_over_time(Graph<S>& g, const Tensor<S>& x, const std::vector<std::uint8_t>* mask = nullptr);

/// Running statistics for batchnorm1d, one entry per channel.
template <typename S>
struct BNState {
  std::vector<S> running_mean;
  std::vector<S> running_var;

  explicit BNState(std::size_t channels = 0)
      : running_mean(channels, S(0)), running_var(channels, S(1)) {}
};

inline constexpr double kBnEps = 1e-5;
inline constexpr double kBnMomentum = 0.1;

/// Batch normalization over batch x time per channel. x: [B x C x T].
/// Train mode normalizes with batch statistics and updates the running
/// mean/var (momentum 0.1, unbiased var); eval mode uses the running stats.
template <typename S>
Tensor<S> batchnorm1d(Graph<S>& g, const Tensor<S>& x, const Tensor<S>& gamma, const Tensor<S>& beta,
                      BNState<S>& state, Mode mode);

template <typename S>
Tensor<S> relu(Graph<S>& g, const Tensor<S>& x);

/// Inverted dropout: train mode zeroes each element with probability `rate`
/// and scales survivors by 1/(1-rate); eval mode is the identity.
template <typename S>
Tensor<S> dropout(Graph<S>& g, const Tensor<S>& x, double rate, Mode mode, std::mt19937_64& rng);

/// Mean over the batch of -log softmax(logits)[label], log-sum-exp stabilized.
/// logits: [B x K], labels: B ints in [0, K).
template <typename S>
Tensor<S> softmax_cross_entropy(Graph<S>& g, const Tensor<S>& logits, const std::vector<int>& labels);

/// Scalar sum_i weights[i] * scalars[i]; weights are constants.
template <typename S>
Tensor<S> weighted_sum(Graph<S>& g, const std::vector<Tensor<S>>& scalars, const std::vector<double>& weights);

/// Scalar sum of all elements.
template <typename S>
Tensor<S> reduce_sum(Graph<S>& g, const Tensor<S>& x);

/// Concatenate rank-2 tensors [B x C_i] along the feature axis.
template <typename S>
Tensor<S> concat_cols(Graph<S>& g, const std::vector<Tensor<S>>& xs);

/// Row-wise softmax probabilities (no autograd; scoring only).
template <typename S>
std::vector<double> softmax_rows(const Tensor<S>& logits);

}  // namespace mtcnn
