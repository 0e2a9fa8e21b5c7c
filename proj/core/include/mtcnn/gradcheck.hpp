#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mtcnn/tensor.hpp"

namespace mtcnn {

template <typename S>
struct NamedParam {
  std::string name;
  Tensor<S> tensor;
};

struct GradCheckEntry {
  std::string name;
  double max_rel_err = 0.0;
  std::size_t checked = 0;
};

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;
  std::vector<GradCheckEntry> per_param;

  bool passed(double tol = 1e-4) const { return max_rel_err <= tol; }
};

/// Compares reverse-mode gradients against central finite differences
/// (f(p+h) - f(p-h)) / 2h for every parameter element, or a seeded random
/// subsample of at least `min_samples` elements per tensor when a tensor is
/// larger than that. Relative error uses denominator max(|a|, |b|, 1e-8).
/// The builder must rebuild the loss from scratch on every call; a non-finite
/// loss raises NumericError. Meant to run at 64-bit precision.
template <typename S>
GradCheckResult check_gradients(const std::function<Tensor<S>(Graph<S>&)>& build_loss,
                                const std::vector<NamedParam<S>>& params, double h = 1e-5,
                                std::size_t min_samples = 200, std::uint64_t seed = 0x5eed);

}  // namespace mtcnn
