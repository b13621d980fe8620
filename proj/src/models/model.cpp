#include "hargan/models/model.hpp"

#include <algorithm>

#include "hargan/core/errors.hpp"
#include "hargan/core/ops.hpp"

namespace hargan::models {

namespace {

const std::pair<Architecture, const char*> kTags[] = {
    {Architecture::RganGenerator, "rgan_generator"},
    {Architecture::RganDiscriminator, "rgan_discriminator"},
    {Architecture::TganGenerator, "tgan_generator"},
    {Architecture::TganDiscriminator, "tgan_discriminator"},
    {Architecture::ConvLstmClassifier, "conv_lstm_classifier"},
    {Architecture::TransformerClassifier, "transformer_classifier"},
};

}  // namespace

std::string to_string(Architecture a) {
  for (auto [arch, tag] : kTags) {
    if (arch == a) return tag;
  }
  return "unknown";
}

Architecture architecture_from_string(const std::string& tag) {
  for (auto [arch, t] : kTags) {
    if (tag == t) return arch;
  }
  throw DataError("unknown architecture tag '" + tag + "'");
}

Tensor Generator::sample(std::size_t n, Rng& rng, const nn::ForwardContext& ctx) const {
  return forward(Tensor::randn({n, noise_length()}, rng), ctx);
}

std::vector<std::size_t> Classifier::predict(const Tensor& x, std::size_t batch_size) const {
  NoGradGuard guard;
  bool unbatched = false;
  const Tensor xb = detail::as_batch(x, {profile().channels, profile().length}, "classifier input", unbatched);
  const std::size_t B = xb.size(0), N = num_classes();
  std::vector<std::size_t> out;
  out.reserve(B);
  for (std::size_t start = 0; start < B; start += batch_size) {
    const std::size_t n = std::min(batch_size, B - start);
    const Tensor logits = forward(narrow(xb, 0, start, n));
    const auto v = logits.data();
    for (std::size_t b = 0; b < n; ++b) {
      const auto row = v.subspan(b * N, N);
      out.push_back(static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin()));
    }
  }
  return out;
}

std::size_t count_params(const nn::ParameterSet& params) { return params.scalar_count(); }

ParamSnapshot snapshot(const nn::ParameterSet& params) {
  ParamSnapshot out;
  out.reserve(params.size());
  for (const auto& [name, t] : params.entries()) out.emplace_back(t.data().begin(), t.data().end());
  return out;
}

void restore(nn::ParameterSet& params, const ParamSnapshot& values) {
  if (values.size() != params.size()) throw ShapeError("snapshot does not match the parameter set");
  for (std::size_t i = 0; i < values.size(); ++i) {
    Tensor t = params.entries()[i].second;
    if (values[i].size() != t.numel()) throw ShapeError("snapshot entry size mismatch for " + params.entries()[i].first);
    std::copy(values[i].begin(), values[i].end(), t.mutable_data().begin());
  }
}

namespace detail {

Tensor as_batch(const Tensor& x, const Shape& sample, const char* what, bool& unbatched) {
  if (x.shape() == sample) {
    unbatched = true;
    Shape s{1};
    s.insert(s.end(), sample.begin(), sample.end());
    return reshape(x, s);
  }
  if (x.dim() == sample.size() + 1 && std::equal(sample.begin(), sample.end(), x.shape().begin() + 1)) {
    unbatched = false;
    return x;
  }
  throw ShapeError(std::string(what) + ": expected " + shape_to_string(sample) + " or [B x ...], got " +
                   shape_to_string(x.shape()));
}

}  // namespace detail

}  // namespace hargan::models
