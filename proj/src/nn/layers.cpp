#include "hargan/nn/layers.hpp"

#include <cmath>

#include "hargan/core/errors.hpp"
#include "hargan/core/ops.hpp"

namespace hargan::nn {

Conv1d::Conv1d(ParameterSet& params, const std::string& name, std::size_t in_channels, std::size_t out_channels,
               std::size_t kernel_size, std::size_t padding, Rng& rng)
    : in_channels_(in_channels), out_channels_(out_channels), padding_(padding) {
  if (in_channels == 0 || out_channels == 0 || kernel_size == 0) throw ShapeError("conv1d '" + name + "' has a zero dimension");
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_channels * kernel_size));
  weight_ = params.add(name + ".weight", Tensor::uniform({out_channels, in_channels, kernel_size}, rng, -bound, bound));
  bias_ = params.add(name + ".bias", Tensor::uniform({out_channels}, rng, -bound, bound));
}

Tensor Conv1d::forward(const Tensor& x) const { return conv1d(x, weight_, bias_, padding_); }

Linear::Linear(ParameterSet& params, const std::string& name, std::size_t in_features, std::size_t out_features,
               Rng& rng, bool with_bias)
    : in_features_(in_features) {
  if (in_features == 0 || out_features == 0) throw ShapeError("linear '" + name + "' has a zero dimension");
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_features));
  weight_ = params.add(name + ".weight", Tensor::uniform({in_features, out_features}, rng, -bound, bound));
  if (with_bias) bias_ = params.add(name + ".bias", Tensor::uniform({out_features}, rng, -bound, bound));
}

Tensor Linear::forward(const Tensor& x) const {
  if (x.dim() == 0 || x.size(-1) != in_features_) {
    throw ShapeError("linear expects last dimension " + std::to_string(in_features_) + ", got " +
                     shape_to_string(x.shape()));
  }
  Tensor y = x.dim() == 1 ? reshape(matmul(reshape(x, {1, in_features_}), weight_), {weight_.size(1)})
                          : matmul(x, weight_);
  return bias_.defined() ? y + bias_ : y;
}

LayerNorm::LayerNorm(ParameterSet& params, const std::string& name, std::size_t dim) : dim_(dim) {
  if (dim < 2) throw ShapeError("layer norm over dimension < 2 is degenerate");
  gain_ = params.add(name + ".gain", Tensor::ones({dim}));
  bias_ = params.add(name + ".bias", Tensor::zeros({dim}));
}

Tensor LayerNorm::forward(const Tensor& x) const { return layer_norm(x, gain_, bias_); }

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double epsilon) {
  if (x.dim() == 0 || x.size(-1) < 2) throw ShapeError("layer norm over dimension < 2 is degenerate");
  const std::size_t d = x.size(-1);
  if (gain.shape() != Shape{d} || bias.shape() != Shape{d}) {
    throw ShapeError("layer norm affine parameters must be [" + std::to_string(d) + "]");
  }
  Tensor centered = x - mean(x, -1, true);
  Tensor variance = mean(centered * centered, -1, true);
  Tensor normalized = centered / sqrt(add_scalar(variance, epsilon));
  return normalized * gain + bias;
}

FeedForward::FeedForward(ParameterSet& params, const std::string& name, std::size_t dim, std::size_t hidden, Rng& rng)
    : inner_(params, name + ".inner", dim, hidden, rng), outer_(params, name + ".outer", hidden, dim, rng) {}

Tensor FeedForward::forward(const Tensor& x) const { return outer_.forward(relu(inner_.forward(x))); }

Tensor dropout(const Tensor& x, double rate, const ForwardContext& ctx) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ShapeError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  if (ctx.mode == Mode::Eval || rate == 0.0) return x;
  if (ctx.rng == nullptr) throw ShapeError("train-mode dropout needs an rng");
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(x.numel());
  for (double& m : mask) m = ctx.rng->bernoulli(rate) ? 0.0 : keep_scale;
  return x * Tensor(x.shape(), std::move(mask));
}

Tensor positional_encoding(std::size_t length, std::size_t dim) {
  if (length == 0 || dim == 0) throw ShapeError("positional encoding needs length and dim >= 1");
  std::vector<double> pe(length * dim);
  for (std::size_t pos = 0; pos < length; ++pos) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double pair = static_cast<double>(j - j % 2);
      const double angle = static_cast<double>(pos) / std::pow(10000.0, pair / static_cast<double>(dim));
      pe[pos * dim + j] = j % 2 == 0 ? std::sin(angle) : std::cos(angle);
    }
  }
  return Tensor({length, dim}, std::move(pe));
}

}  // namespace hargan::nn
