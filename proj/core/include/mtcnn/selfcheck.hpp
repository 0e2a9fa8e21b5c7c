#pragma once

#include <cstdint>

#include "mtcnn/gradcheck.hpp"
#include "mtcnn/model.hpp"

namespace mtcnn {

/// The tiny double-precision configuration used for finite-difference
/// verification of the full model: N=12, d=4 (2+1+1), kernels {2,3} with
/// 3 channels each, fc1=8, shared=4, 2 tasks, learnable PE, dropout off.
ModelConfig gradcheck_config();

/// Builds the tiny model plus a small synthetic batch and compares every
/// parameter tensor's reverse-mode gradient against central differences.
GradCheckResult run_model_gradcheck(std::uint64_t seed = 7, std::size_t min_samples = 200);

}  // namespace mtcnn
