#pragma once

#include <vector>

#include "hargan/core/tensor.hpp"

namespace hargan {

enum class UnaryOp { Tanh, Sigmoid, Exp, Log, Relu, Neg, Sqrt, Softplus };
enum class BinaryOp { Add, Sub, Mul, Div };
enum class ReduceOp { Sum, Mean, Max };

// Binary ops broadcast by trailing dimensions (numpy rules). The backward
// pass sums gradients over broadcast dimensions.
Shape broadcast_shapes(const Shape& a, const Shape& b);

Tensor elementwise(UnaryOp op, const Tensor& a);
Tensor elementwise(BinaryOp op, const Tensor& a, const Tensor& b);

inline Tensor add(const Tensor& a, const Tensor& b) { return elementwise(BinaryOp::Add, a, b); }
inline Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(BinaryOp::Sub, a, b); }
inline Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(BinaryOp::Mul, a, b); }
inline Tensor div(const Tensor& a, const Tensor& b) { return elementwise(BinaryOp::Div, a, b); }
inline Tensor tanh(const Tensor& a) { return elementwise(UnaryOp::Tanh, a); }
inline Tensor sigmoid(const Tensor& a) { return elementwise(UnaryOp::Sigmoid, a); }
inline Tensor exp(const Tensor& a) { return elementwise(UnaryOp::Exp, a); }
inline Tensor log(const Tensor& a) { return elementwise(UnaryOp::Log, a); }
inline Tensor relu(const Tensor& a) { return elementwise(UnaryOp::Relu, a); }
inline Tensor neg(const Tensor& a) { return elementwise(UnaryOp::Neg, a); }
inline Tensor sqrt(const Tensor& a) { return elementwise(UnaryOp::Sqrt, a); }
// log(1 + e^x), evaluated without overflow.
inline Tensor softplus(const Tensor& a) { return elementwise(UnaryOp::Softplus, a); }

Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double value);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator-(const Tensor& a) { return neg(a); }
inline Tensor operator*(const Tensor& a, double s) { return scale(a, s); }
inline Tensor operator*(double s, const Tensor& a) { return scale(a, s); }

/// Matrix product over the last two axes. `a` is [..., m, k]; `b` is either
/// [k, n] (shared across the leading batch) or [..., k, n] with the same
/// leading dimensions as `a`.
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor permute(const Tensor& a, const std::vector<std::size_t>& order);
Tensor transpose(const Tensor& a, int axis0, int axis1);
Tensor reshape(const Tensor& a, Shape shape);
// Slice [start, start + length) along one axis.
Tensor narrow(const Tensor& a, int axis, std::size_t start, std::size_t length);
Tensor concat(const std::vector<Tensor>& parts, int axis);
// Joins equal-shape tensors along a new axis.
Tensor stack(const std::vector<Tensor>& parts, int axis);

Tensor reduce(ReduceOp op, const Tensor& a, int axis, bool keepdim = false);
inline Tensor sum(const Tensor& a, int axis, bool keepdim = false) { return reduce(ReduceOp::Sum, a, axis, keepdim); }
inline Tensor mean(const Tensor& a, int axis, bool keepdim = false) { return reduce(ReduceOp::Mean, a, axis, keepdim); }
inline Tensor max(const Tensor& a, int axis, bool keepdim = false) { return reduce(ReduceOp::Max, a, axis, keepdim); }
// Reductions over every element, producing a scalar.
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

// Along the last axis.
Tensor softmax(const Tensor& a);
Tensor log_softmax(const Tensor& a);

/// Cross-correlation with zero padding and stride 1.
/// x: [batch, c_in, L] or [c_in, L]; weight: [c_out, c_in, k]; bias: [c_out]
/// or undefined. Output length is L + 2 * padding - k + 1.
Tensor conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t padding);

/// While alive, records on this thread whether each relu input was positive,
/// in evaluation order. Finite-difference checks use it to detect stencils
/// that straddle a kink.
class ReluSignTrace {
 public:
  ReluSignTrace();
  ~ReluSignTrace();
  ReluSignTrace(const ReluSignTrace&) = delete;
  ReluSignTrace& operator=(const ReluSignTrace&) = delete;

  const std::vector<bool>& signs() const { return signs_; }
  void reset() { signs_.clear(); }

 private:
  std::vector<bool> signs_;
  ReluSignTrace* previous_;
};

}  // namespace hargan
