#pragma once

#include <cstddef>
#include <span>

#include "hargan/core/tensor.hpp"

namespace hargan::nn {

/// Mean binary cross-entropy on raw logits,
///   max(x, 0) - x * t + log(1 + exp(-|x|)),
/// finite for any finite logit. Targets must be exactly 0 or 1 and match the
/// logits' shape.
Tensor bce_with_logits(const Tensor& logits, const Tensor& targets);
Tensor bce_with_logits(const Tensor& logits, double target);

/// Mean cross-entropy of [batch, classes] logits (or a single [classes] row)
/// against class indices, via log-softmax.
Tensor cross_entropy(const Tensor& logits, std::span<const std::size_t> targets);
Tensor cross_entropy(const Tensor& logits, std::size_t target);

}  // namespace hargan::nn
