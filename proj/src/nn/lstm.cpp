#include "hargan/nn/lstm.hpp"

#include <cmath>

#include "hargan/core/errors.hpp"
#include "hargan/core/ops.hpp"

namespace hargan::nn {

Lstm::Lstm(ParameterSet& params, const std::string& name, std::size_t input_size, std::size_t hidden_size,
           std::size_t num_layers, Rng& rng)
    : input_size_(input_size), hidden_size_(hidden_size) {
  if (input_size == 0 || hidden_size == 0 || num_layers == 0) {
    throw ShapeError("lstm '" + name + "' needs positive input size, hidden size and layer count");
  }
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size));
  const std::size_t gates = 4 * hidden_size;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const std::string prefix = name + ".l" + std::to_string(l);
    const std::size_t in = l == 0 ? input_size : hidden_size;
    LayerWeights w;
    w.input_weight = params.add(prefix + ".input_weight", Tensor::uniform({in, gates}, rng, -bound, bound));
    w.recurrent_weight =
        params.add(prefix + ".recurrent_weight", Tensor::uniform({hidden_size, gates}, rng, -bound, bound));
    w.bias = params.add(prefix + ".bias", Tensor::uniform({gates}, rng, -bound, bound));
    layers_.push_back(std::move(w));
  }
}

LstmOutput Lstm::forward(const Tensor& x) const {
  const bool batched = x.dim() == 3;
  if ((!batched && x.dim() != 2) || x.size(-1) != input_size_) {
    throw ShapeError("lstm expects [batch, L, " + std::to_string(input_size_) + "] or [L, " +
                     std::to_string(input_size_) + "], got " + shape_to_string(x.shape()));
  }
  Tensor seq = batched ? x : reshape(x, {1, x.size(0), x.size(1)});
  const std::size_t batch = seq.size(0);
  const std::size_t steps = seq.size(1);
  const std::size_t H = hidden_size_;
  if (steps == 0) throw ShapeError("lstm over an empty sequence");

  Tensor h;
  for (const LayerWeights& w : layers_) {
    // Input contributions for all timesteps at once.
    Tensor projected = matmul(seq, w.input_weight) + w.bias;  // [B, L, 4H]
    Tensor c;
    std::vector<Tensor> outputs;
    outputs.reserve(steps);
    for (std::size_t t = 0; t < steps; ++t) {
      Tensor gates = reshape(narrow(projected, 1, t, 1), {batch, 4 * H});
      if (t > 0) gates = gates + matmul(h, w.recurrent_weight);
      Tensor in_gate = sigmoid(narrow(gates, 1, 0, H));
      Tensor forget_gate = sigmoid(narrow(gates, 1, H, H));
      Tensor candidate = tanh(narrow(gates, 1, 2 * H, H));
      Tensor out_gate = sigmoid(narrow(gates, 1, 3 * H, H));
      c = t > 0 ? forget_gate * c + in_gate * candidate : in_gate * candidate;
      h = out_gate * tanh(c);
      outputs.push_back(h);
    }
    seq = stack(outputs, 1);
  }

  if (!batched) return {reshape(seq, {steps, H}), reshape(h, {H})};
  return {seq, h};
}

}  // namespace hargan::nn
