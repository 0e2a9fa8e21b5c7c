#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mtcnn/tensor.hpp"

namespace mtcnn {

enum class PeMode { none, fixed, learnable };

PeMode pe_mode_from_string(const std::string& s);
std::string pe_mode_to_string(PeMode m);

/// Xavier-uniform fill with bound sqrt(6 / (fan_in + fan_out)).
template <typename S>
void xavier_uniform(Tensor<S>& t, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng);

/// Lookup tables for the two categorical variables plus the single base
/// vector for the continuous dwell variable. Row 0 of the categorical
/// tables is the PAD/missing/rare row.
template <typename S>
struct EmbeddingTables {
  Tensor<S> page_table;      // (V_p + 1) x d_p
  Tensor<S> category_table;  // (V_c + 1) x d_c
  Tensor<S> time_table;      // 1 x d_t

  EmbeddingTables() = default;
  EmbeddingTables(std::size_t pages, std::size_t categories, std::size_t d_p, std::size_t d_c,
                  std::size_t d_t, std::mt19937_64& rng);

  std::size_t dim() const { return page_table.dim(1) + category_table.dim(1) + time_table.dim(1); }
};

/// Additive positional encoding over the combined embedding dimension.
/// Fixed mode is the sinusoidal matrix, a pure function of (N, d);
/// learnable mode is a trainable matrix initialized uniform(-0.02, 0.02).
template <typename S>
struct PositionalEncoder {
  PeMode mode = PeMode::fixed;
  Tensor<S> matrix;  // N x d

  PositionalEncoder() = default;
  PositionalEncoder(PeMode mode, std::size_t n, std::size_t d, std::mt19937_64& rng);
};

/// Sinusoidal / learnable-init / zero positional matrix of shape [N x d].
template <typename S>
Tensor<S> positional_matrix(PeMode mode, std::size_t n, std::size_t d, std::mt19937_64& rng);

/// Row gather: ids index into table rows; out is [B x N x d_v].
/// Gradient accumulates into the looked-up rows only.
template <typename S>
Tensor<S> embed_categorical(Graph<S>& g, const std::vector<std::int32_t>& ids, std::size_t batch,
                            std::size_t n, const Tensor<S>& table);

/// Scaled continuous embedding: out[b,n,:] = t_norm[b,n] * time_table[0,:].
template <typename S>
Tensor<S> embed_continuous(Graph<S>& g, const std::vector<double>& t_norm, std::size_t batch,
                           std::size_t n, const Tensor<S>& time_table);

/// Feature-axis concatenation of the three [B x N x d_v] embeddings,
/// in order page, category, time.
template <typename S>
Tensor<S> combine(Graph<S>& g, const Tensor<S>& page_e, const Tensor<S>& cat_e, const Tensor<S>& time_e);

/// out[b] = s[b] + pe, broadcast over the batch.
template <typename S>
Tensor<S> apply_pe(Graph<S>& g, const Tensor<S>& s, const Tensor<S>& pe);

/// [B x N x d] -> [B x d x N] for the convolution stage.
template <typename S>
Tensor<S> to_channel_major(Graph<S>& g, const Tensor<S>& s);

}  // namespace mtcnn
