#pragma once

#include <cstdint>
#include <string>

#include "mtcnn/kvconfig.hpp"
#include "mtcnn/model.hpp"
#include "mtcnn/training.hpp"

namespace mtcnn {

/// Run-level configuration shared by the CLI subcommands. Every field has a
/// default; values come from an optional key-value file with command-line
/// flags taking precedence. Unknown keys are rejected by name.
struct RunConfig {
  // paths
  std::string data;
  std::string val_data;
  std::string vocab;
  std::string checkpoint;
  std::string out;
  std::string gen_spec;

  ModelConfig model;
  std::size_t min_count = 1;      // vocabulary threshold
  std::size_t vocab_pages = 500;  // used when no vocabulary file is given
  std::size_t vocab_categories = 100;

  double lr = 1e-4;
  std::size_t batch = 64;
  std::size_t epochs = 5;
  std::string weighting = "rlw";  // rlw | uniform | fixed:<w1,..,wT>
  std::uint64_t seed = 42;
  std::string precision = "f32";  // f32 | f64

  // empty path -> defaults; `base` seeds the defaults (e.g. a checkpoint's
  // model config) so only keys present in the file act as overrides
  static RunConfig load(const std::string& config_path);
  static RunConfig load(const std::string& config_path, const RunConfig& base);
  static RunConfig from_kv(KvConfig& kv);
  static RunConfig from_kv(KvConfig& kv, const RunConfig& base);

  TrainOptions train_options() const;
};

}  // namespace mtcnn
