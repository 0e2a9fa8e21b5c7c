#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mtcnn/errors.hpp"

namespace mtcnn {

enum class Mode { train, eval };

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& s);
std::size_t shape_numel(const Shape& s);

/// Dense row-major n-dimensional array with an optional gradient buffer.
///
/// Tensors are shared handles: copies alias the same storage, which is what
/// the tape-based backward pass relies on. Element type is float or double;
/// training defaults to float, gradient checking runs at double.
template <typename S>
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, S value);
  static Tensor from(Shape shape, std::vector<S> values);
  static Tensor scalar(S value) { return from({1}, {value}); }

  bool defined() const { return impl_ != nullptr; }

  const Shape& shape() const { return impl_->shape; }
  std::size_t rank() const { return impl_->shape.size(); }
  std::size_t dim(std::size_t i) const { return impl_->shape[i]; }
  std::size_t numel() const { return impl_->data.size(); }

  S* data() { return impl_->data.data(); }
  const S* data() const { return impl_->data.data(); }
  std::vector<S>& values() { return impl_->data; }
  const std::vector<S>& values() const { return impl_->data; }

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool v) { impl_->requires_grad = v; }

  /// Gradient buffer, allocated zero-filled on first use.
  S* grad();
  bool has_grad() const { return !impl_->grad.empty(); }
  const std::vector<S>& grad_values() const { return impl_->grad; }
  void zero_grad();

  // Flat and small-rank element accessors (tests and slow paths).
  S& at(std::size_t i) { return impl_->data[i]; }
  S at(std::size_t i) const { return impl_->data[i]; }
  S& at2(std::size_t i, std::size_t j) { return impl_->data[i * dim(1) + j]; }
  S at2(std::size_t i, std::size_t j) const { return impl_->data[i * dim(1) + j]; }
  S& at3(std::size_t i, std::size_t j, std::size_t k) {
    return impl_->data[(i * dim(1) + j) * dim(2) + k];
  }
  S at3(std::size_t i, std::size_t j, std::size_t k) const {
    return impl_->data[(i * dim(1) + j) * dim(2) + k];
  }

  S item() const;

  bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }

 private:
  struct Impl {
    Shape shape;
    std::vector<S> data;
    bool requires_grad = false;
    std::vector<S> grad;  // empty until first accumulation
  };
  std::shared_ptr<Impl> impl_;
};

/// Execution tape: ops append one record per executed operation, in order.
/// backward() seeds the scalar loss gradient with 1 and replays the records
/// in reverse, visiting each exactly once. A graph with gradients disabled
/// records nothing, which is how eval-mode forward passes run.
template <typename S>
class Graph {
 public:
  explicit Graph(bool grads_enabled = true) : grads_enabled_(grads_enabled) {}

  bool grads_enabled() const { return grads_enabled_; }

  void record(std::function<void()> backward_fn) {
    if (grads_enabled_) records_.push_back(std::move(backward_fn));
  }

  std::size_t size() const { return records_.size(); }

  void backward(Tensor<S>& loss);

 private:
  bool grads_enabled_;
  std::vector<std::function<void()>> records_;
};

// -- implementation --------------------------------------------------------

template <typename S>
Tensor<S> Tensor<S>::zeros(Shape shape) {
  Tensor t;
  t.impl_ = std::make_shared<Impl>();
  std::size_t n = shape_numel(shape);
  t.impl_->shape = std::move(shape);
  t.impl_->data.assign(n, S(0));
  return t;
}

template <typename S>
Tensor<S> Tensor<S>::full(Shape shape, S value) {
  Tensor t = zeros(std::move(shape));
  for (auto& v : t.impl_->data) v = value;
  return t;
}

template <typename S>
Tensor<S> Tensor<S>::from(Shape shape, std::vector<S> values) {
  if (shape_numel(shape) != values.size())
    throw ShapeError("tensor data length " + std::to_string(values.size()) +
                     " does not match shape " + shape_str(shape));
  Tensor t;
  t.impl_ = std::make_shared<Impl>();
  t.impl_->shape = std::move(shape);
  t.impl_->data = std::move(values);
  return t;
}

template <typename S>
S* Tensor<S>::grad() {
  if (impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), S(0));
  return impl_->grad.data();
}

template <typename S>
void Tensor<S>::zero_grad() {
  if (!impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), S(0));
}

template <typename S>
S Tensor<S>::item() const {
  if (numel() != 1) throw ShapeError("item() requires a scalar, got shape " + shape_str(shape()));
  return impl_->data[0];
}

template <typename S>
void Graph<S>::backward(Tensor<S>& loss) {
  if (!grads_enabled_) throw ConfigError("backward() on a graph with gradients disabled");
  if (loss.numel() != 1)
    throw ShapeError("backward() requires a scalar loss, got shape " + shape_str(loss.shape()));
  loss.grad()[0] = S(1);
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) (*it)();
}

}  // namespace mtcnn
