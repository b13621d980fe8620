#pragma once

#include <cstddef>
#include <string>

#include "hargan/core/rng.hpp"
#include "hargan/core/tensor.hpp"
#include "hargan/nn/parameters.hpp"

namespace hargan::nn {

enum class Mode { Train, Eval };

// Per-forward switches: dropout is active only in Train mode and then draws
// its masks from `rng`.
struct ForwardContext {
  Mode mode = Mode::Eval;
  Rng* rng = nullptr;
};

/// 1D convolution over [batch, channels, length] (or unbatched [channels,
/// length]). With odd kernel size k and padding (k - 1) / 2 the length is
/// preserved.
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(ParameterSet& params, const std::string& name, std::size_t in_channels, std::size_t out_channels,
         std::size_t kernel_size, std::size_t padding, Rng& rng);

  Tensor forward(const Tensor& x) const;

  std::size_t in_channels() const { return in_channels_; }
  std::size_t out_channels() const { return out_channels_; }
  const Tensor& weight() const { return weight_; }
  const Tensor& bias() const { return bias_; }

 private:
  std::size_t in_channels_ = 0;
  std::size_t out_channels_ = 0;
  std::size_t padding_ = 0;
  Tensor weight_;  // [out, in, k]
  Tensor bias_;    // [out]
};

// Affine map on the last axis: [..., in] -> [..., out].
class Linear {
 public:
  Linear() = default;
  Linear(ParameterSet& params, const std::string& name, std::size_t in_features, std::size_t out_features, Rng& rng,
         bool with_bias = true);

  Tensor forward(const Tensor& x) const;

  const Tensor& weight() const { return weight_; }
  const Tensor& bias() const { return bias_; }

 private:
  std::size_t in_features_ = 0;
  Tensor weight_;  // [in, out]
  Tensor bias_;    // [out], undefined when built without bias
};

inline constexpr double kLayerNormEpsilon = 1e-5;

// Normalizes the last axis to zero mean / unit variance, then applies gain and bias.
class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(ParameterSet& params, const std::string& name, std::size_t dim);

  Tensor forward(const Tensor& x) const;

 private:
  std::size_t dim_ = 0;
  Tensor gain_;
  Tensor bias_;
};

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double epsilon = kLayerNormEpsilon);

// linear(d -> d_ff) -> relu -> linear(d_ff -> d)
class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(ParameterSet& params, const std::string& name, std::size_t dim, std::size_t hidden, Rng& rng);

  Tensor forward(const Tensor& x) const;

  const Linear& inner() const { return inner_; }
  const Linear& outer() const { return outer_; }

 private:
  Linear inner_;
  Linear outer_;
};

/// Inverted dropout: in Train mode each element is zeroed with probability
/// `rate` and survivors are scaled by 1 / (1 - rate). Eval mode is identity.
Tensor dropout(const Tensor& x, double rate, const ForwardContext& ctx);

/// Sinusoidal position signal, [length, dim]:
///   PE[pos, 2i] = sin(pos / 10000^(2i / dim)), PE[pos, 2i + 1] = cos(same).
Tensor positional_encoding(std::size_t length, std::size_t dim);

}  // namespace hargan::nn
