#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "hargan/core/rng.hpp"
#include "hargan/core/tensor.hpp"
#include "hargan/data/profile.hpp"
#include "hargan/nn/layers.hpp"
#include "hargan/nn/parameters.hpp"
#include "json.hpp"

namespace hargan::models {

enum class Architecture {
  RganGenerator,
  RganDiscriminator,
  TganGenerator,
  TganDiscriminator,
  ConvLstmClassifier,
  TransformerClassifier,
};

std::string to_string(Architecture a);
Architecture architecture_from_string(const std::string& tag);

/// A network together with its named parameters and the configuration it
/// was built from. Models own their parameters and are not copyable.
class Model {
 public:
  virtual ~Model() = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  virtual Architecture architecture() const = 0;
  virtual nlohmann::json config() const = 0;
  virtual const data::DatasetProfile& profile() const = 0;
  // Batched input gives batched output; a single unbatched sample gives an
  // unbatched result.
  virtual Tensor forward(const Tensor& x, const nn::ForwardContext& ctx = {}) const = 0;

  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }

 protected:
  Model() = default;
  nn::ParameterSet params_;
};

// z: [B, noise_len] or [noise_len] -> [B, C, L] or [C, L].
class Generator : public Model {
 public:
  virtual std::size_t noise_length() const = 0;
  // Draws n standard-normal noise vectors and generates [n, C, L].
  Tensor sample(std::size_t n, Rng& rng, const nn::ForwardContext& ctx = {}) const;
};

// x: [B, C, L] or [C, L] -> real/synthetic logits [B] or a scalar.
class Discriminator : public Model {};

// x: [B, C, L] or [C, L] -> class logits [B, N] or [N].
class Classifier : public Model {
 public:
  std::size_t num_classes() const { return profile().num_classes(); }
  // Eval mode, no graph; argmax per window.
  std::vector<std::size_t> predict(const Tensor& x, std::size_t batch_size = 256) const;
};

std::size_t count_params(const nn::ParameterSet& params);
inline std::size_t count_params(const Model& m) { return count_params(m.params()); }

// Deep copy of every parameter's values, in registration order.
using ParamSnapshot = std::vector<std::vector<double>>;
ParamSnapshot snapshot(const nn::ParameterSet& params);
void restore(nn::ParameterSet& params, const ParamSnapshot& values);

namespace detail {

// Adds a leading batch axis of 1 when `x` has shape `sample`. Throws
// ShapeError unless x is `sample` or [B, sample...].
Tensor as_batch(const Tensor& x, const Shape& sample, const char* what, bool& unbatched);

}  // namespace detail

}  // namespace hargan::models
