#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mtcnn/model.hpp"
#include "mtcnn/training.hpp"

namespace mtcnn {

/// Versioned binary container: magic "MTC1", a length-prefixed text config
/// block, then named little-endian parameter/buffer arrays with a declared
/// element width, and a trailing FNV-1a checksum. Round trips are bit-exact.
struct CheckpointMeta {
  std::uint32_t version = 1;
  ModelConfig config;
  std::string precision;  // "f32" | "f64"
  std::size_t vocab_pages = 0;
  std::size_t vocab_categories = 0;
  std::uint64_t vocab_hash = 0;
  bool has_optimizer = false;
  std::int64_t adam_step = 0;
  double adam_lr = 0.0;
};

template <typename S>
constexpr const char* precision_name() {
  if constexpr (sizeof(S) == 4)
    return "f32";
  else
    return "f64";
}

/// Reads only the header block (cheap; used to dispatch on precision).
CheckpointMeta read_checkpoint_meta(const std::string& path);

template <typename S>
void save_checkpoint(MtcnnModel<S>& model, const std::string& path, std::uint64_t vocab_hash,
                     const AdamState<S>* adam = nullptr);

template <typename S>
struct LoadedModel {
  MtcnnModel<S> model;
  CheckpointMeta meta;
  std::optional<AdamState<S>> adam;
};

/// Rebuilds the model from the self-describing container. The requested
/// element type must match the declared width (CompatError otherwise).
template <typename S>
LoadedModel<S> load_checkpoint(const std::string& path);

/// CompatError when the checkpoint does not match an expected configuration
/// or vocabulary (hash comparison).
void verify_compatible(const CheckpointMeta& meta, const ModelConfig& expected);
void verify_vocab(const CheckpointMeta& meta, std::uint64_t vocab_hash);

}  // namespace mtcnn
