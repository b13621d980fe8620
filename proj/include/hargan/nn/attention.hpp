#pragma once

#include <cstddef>
#include <string>

#include "hargan/core/rng.hpp"
#include "hargan/core/tensor.hpp"
#include "hargan/nn/layers.hpp"
#include "hargan/nn/parameters.hpp"

namespace hargan::nn {

/// softmax(q k^T / sqrt(d_k)) over keys, [..., L_q, L_k]. Leading axes are
/// treated as batch and must agree between q and k.
Tensor attention_weights(const Tensor& q, const Tensor& k);

/// Scaled dot-product attention: softmax(q k^T / sqrt(d_k)) v.
/// q: [..., L_q, d_k], k: [..., L_k, d_k], v: [..., L_k, d_v].
Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v);

/// Self-attention with `heads` heads over [batch, L, d] (or [L, d]). The
/// query/key/value and output projections are position-wise (1x1
/// convolutions over the model dimension); each head attends over
/// d / heads channels.
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(ParameterSet& params, const std::string& name, std::size_t dim, std::size_t heads, Rng& rng);

  Tensor forward(const Tensor& x) const;

  std::size_t heads() const { return heads_; }
  const Linear& output_projection() const { return output_; }

 private:
  std::size_t dim_ = 0;
  std::size_t heads_ = 0;
  Linear query_;
  Linear key_;
  Linear value_;
  Linear output_;
};

/// Post-norm encoder layer:
///   x = norm1(x + attention(x)); x = norm2(x + feed_forward(x))
class EncoderLayer {
 public:
  EncoderLayer() = default;
  EncoderLayer(ParameterSet& params, const std::string& name, std::size_t dim, std::size_t heads,
               std::size_t ff_hidden, Rng& rng);

  Tensor forward(const Tensor& x) const;

 private:
  MultiHeadAttention attention_;
  LayerNorm norm1_;
  FeedForward feed_forward_;
  LayerNorm norm2_;
};

}  // namespace hargan::nn
