#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hargan/core/rng.hpp"
#include "hargan/core/tensor.hpp"
#include "hargan/nn/parameters.hpp"

namespace hargan::nn {

struct LstmOutput {
  Tensor outputs;       // [batch, L, hidden] (or [L, hidden] unbatched), last layer
  Tensor final_hidden;  // [batch, hidden] (or [hidden]), last layer at t = L
};

/// Stacked LSTM with zero initial state. Per layer and timestep, with the
/// gate pre-activations split as [i | f | g | o]:
///   c_t = sigmoid(f) * c_{t-1} + sigmoid(i) * tanh(g)
///   h_t = sigmoid(o) * tanh(c_t)
class Lstm {
 public:
  Lstm() = default;
  Lstm(ParameterSet& params, const std::string& name, std::size_t input_size, std::size_t hidden_size,
       std::size_t num_layers, Rng& rng);

  // x: [batch, L, input_size] or [L, input_size].
  LstmOutput forward(const Tensor& x) const;

  std::size_t input_size() const { return input_size_; }
  std::size_t hidden_size() const { return hidden_size_; }
  std::size_t num_layers() const { return layers_.size(); }

 private:
  struct LayerWeights {
    Tensor input_weight;      // [in, 4H]
    Tensor recurrent_weight;  // [H, 4H]
    Tensor bias;              // [4H]
  };

  std::size_t input_size_ = 0;
  std::size_t hidden_size_ = 0;
  std::vector<LayerWeights> layers_;
};

}  // namespace hargan::nn
