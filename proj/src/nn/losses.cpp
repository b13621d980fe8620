#include "hargan/nn/losses.hpp"

#include <vector>

#include "hargan/core/errors.hpp"
#include "hargan/core/ops.hpp"

namespace hargan::nn {

Tensor bce_with_logits(const Tensor& logits, const Tensor& targets) {
  if (logits.shape() != targets.shape()) {
    throw ShapeError("bce targets " + shape_to_string(targets.shape()) + " do not match logits " +
                     shape_to_string(logits.shape()));
  }
  for (double t : targets.data()) {
    if (t != 0.0 && t != 1.0) throw ShapeError("bce target must be 0 or 1, got " + std::to_string(t));
  }
  return mean(softplus(logits) - logits * targets);
}

Tensor bce_with_logits(const Tensor& logits, double target) {
  return bce_with_logits(logits, Tensor::full(logits.shape(), target));
}

Tensor cross_entropy(const Tensor& logits, std::span<const std::size_t> targets) {
  const bool batched = logits.dim() == 2;
  if (!batched && logits.dim() != 1) throw ShapeError("cross entropy expects [batch, classes] logits");
  const std::size_t rows = batched ? logits.size(0) : 1;
  const std::size_t classes = logits.size(-1);
  if (targets.size() != rows) throw ShapeError("cross entropy target count differs from batch size");
  std::vector<double> pick(rows * classes, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    if (targets[r] >= classes) {
      throw ShapeError("class index " + std::to_string(targets[r]) + " out of range for " + std::to_string(classes) +
                       " classes");
    }
    pick[r * classes + targets[r]] = -1.0 / static_cast<double>(rows);
  }
  return sum(log_softmax(logits) * Tensor(logits.shape(), std::move(pick)));
}

Tensor cross_entropy(const Tensor& logits, std::size_t target) {
  const std::size_t t[] = {target};
  return cross_entropy(logits, t);
}

}  // namespace hargan::nn
