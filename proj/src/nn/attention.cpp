#include "hargan/nn/attention.hpp"

#include <cmath>

#include "hargan/core/errors.hpp"
#include "hargan/core/ops.hpp"

namespace hargan::nn {

Tensor attention_weights(const Tensor& q, const Tensor& k) {
  if (q.dim() < 2 || k.dim() < 2 || q.size(-1) != k.size(-1)) {
    throw ShapeError("attention query/key dimensions disagree: " + shape_to_string(q.shape()) + " vs " +
                     shape_to_string(k.shape()));
  }
  const double scale_factor = 1.0 / std::sqrt(static_cast<double>(q.size(-1)));
  // Scaling q rather than the L x L scores keeps one less large intermediate.
  return softmax(matmul(scale(q, scale_factor), transpose(k, -1, -2)));
}

Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v) {
  if (v.dim() < 2 || k.size(-2) != v.size(-2)) {
    throw ShapeError("attention key/value lengths disagree: " + shape_to_string(k.shape()) + " vs " +
                     shape_to_string(v.shape()));
  }
  return matmul(attention_weights(q, k), v);
}

MultiHeadAttention::MultiHeadAttention(ParameterSet& params, const std::string& name, std::size_t dim,
                                       std::size_t heads, Rng& rng)
    : dim_(dim), heads_(heads) {
  if (heads == 0 || dim % heads != 0) {
    throw ShapeError("model dimension " + std::to_string(dim) + " is not divisible by " + std::to_string(heads) +
                     " heads");
  }
  query_ = Linear(params, name + ".query", dim, dim, rng);
  // A key bias shifts every score of a query row equally and cancels in the softmax.
  key_ = Linear(params, name + ".key", dim, dim, rng, /*with_bias=*/false);
  value_ = Linear(params, name + ".value", dim, dim, rng);
  output_ = Linear(params, name + ".output", dim, dim, rng);
}

Tensor MultiHeadAttention::forward(const Tensor& x) const {
  const bool batched = x.dim() == 3;
  if ((!batched && x.dim() != 2) || x.size(-1) != dim_) {
    throw ShapeError("multi-head attention expects [..., L, " + std::to_string(dim_) + "], got " +
                     shape_to_string(x.shape()));
  }
  Tensor seq = batched ? x : reshape(x, {1, x.size(0), x.size(1)});
  const std::size_t batch = seq.size(0);
  const std::size_t len = seq.size(1);
  const std::size_t head_dim = dim_ / heads_;

  auto split = [&](const Tensor& t) {
    return permute(reshape(t, {batch, len, heads_, head_dim}), {0, 2, 1, 3});  // [B, h, L, d_k]
  };
  Tensor heads_out = attention(split(query_.forward(seq)), split(key_.forward(seq)), split(value_.forward(seq)));
  Tensor merged = reshape(permute(heads_out, {0, 2, 1, 3}), {batch, len, dim_});
  Tensor out = output_.forward(merged);
  return batched ? out : reshape(out, x.shape());
}

EncoderLayer::EncoderLayer(ParameterSet& params, const std::string& name, std::size_t dim, std::size_t heads,
                           std::size_t ff_hidden, Rng& rng)
    : attention_(params, name + ".attention", dim, heads, rng),
      norm1_(params, name + ".norm1", dim),
      feed_forward_(params, name + ".feed_forward", dim, ff_hidden, rng),
      norm2_(params, name + ".norm2", dim) {}

Tensor EncoderLayer::forward(const Tensor& x) const {
  Tensor y = norm1_.forward(x + attention_.forward(x));
  return norm2_.forward(y + feed_forward_.forward(y));
}

}  // namespace hargan::nn
