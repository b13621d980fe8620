#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hargan/core/rng.hpp"

namespace hargan {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

namespace detail {

struct TensorImpl;

// One recorded operation. The backward rule reads the output's data and
// gradient and accumulates into the gradients of `inputs`.
struct Node {
  const char* op = "";
  std::vector<std::shared_ptr<TensorImpl>> inputs;
  std::function<void(const TensorImpl& out)> backward;
  bool consumed = false;
};

struct TensorImpl {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty while absent
  bool requires_grad = false;
  std::shared_ptr<Node> node;  // null for leaves

  // Zero-filled gradient buffer, or nullptr when this tensor takes no gradient.
  double* grad_buffer();
};

}  // namespace detail

/// Dense row-major double-precision array that can participate in a
/// define-by-run gradient graph. Copies share storage; use clone() for a
/// deep copy.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor ones(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor randn(Shape shape, Rng& rng, double stddev = 1.0, bool requires_grad = false);
  static Tensor uniform(Shape shape, Rng& rng, double lo, double hi, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const;
  std::size_t dim() const { return shape().size(); }
  // Negative axes count from the end.
  std::size_t size(int axis) const;
  std::size_t numel() const;

  std::span<const double> data() const;
  // Direct write access; only meaningful on leaves (parameters, inputs).
  std::span<double> mutable_data();
  double item() const;
  double operator[](std::size_t flat) const { return data()[flat]; }

  bool requires_grad() const;
  Tensor& set_requires_grad(bool value);
  bool is_leaf() const;
  bool has_grad() const;
  std::span<const double> grad() const;
  // Drops the gradient buffer so the next backward() may populate it again.
  void clear_grad();

  /// Reverse-mode sweep from this scalar. Throws GraphError if the tensor is
  /// not a scalar, if the graph was already consumed by an earlier
  /// backward(), or if a reachable leaf still holds a gradient.
  void backward() const;

  // Same values, no history.
  Tensor detach() const;
  Tensor clone() const;

  detail::TensorImpl& impl() const;
  const std::shared_ptr<detail::TensorImpl>& impl_ptr() const { return impl_; }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorImpl> impl) : impl_(std::move(impl)) {}
  friend Tensor make_result(Shape, std::vector<double>, const std::vector<Tensor>&, const char*,
                            std::function<void(const detail::TensorImpl&)>);

  std::shared_ptr<detail::TensorImpl> impl_;
};

/// Builds an op output. When gradient recording is on and any input
/// requires a gradient, a Node carrying `backward` is attached.
Tensor make_result(Shape shape, std::vector<double> data, const std::vector<Tensor>& inputs,
                   const char* op, std::function<void(const detail::TensorImpl&)> backward);

bool grad_enabled();

// Disables graph recording on this thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

}  // namespace hargan
