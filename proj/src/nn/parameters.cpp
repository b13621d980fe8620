#include "hargan/nn/parameters.hpp"

#include "hargan/core/errors.hpp"

namespace hargan::nn {

Tensor ParameterSet::add(std::string name, Tensor value) {
  if (index_.contains(name)) throw ShapeError("duplicate parameter name '" + name + "'");
  value.set_requires_grad(true);
  index_.emplace(name, entries_.size());
  entries_.emplace_back(std::move(name), value);
  return value;
}

const Tensor& ParameterSet::get(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw ShapeError("unknown parameter '" + std::string(name) + "'");
  return entries_[it->second].second;
}

bool ParameterSet::contains(std::string_view name) const { return index_.contains(std::string(name)); }

std::vector<Tensor> ParameterSet::tensors() const {
  std::vector<Tensor> out;
  out.reserve(entries_.size());
  for (const auto& [name, t] : entries_) out.push_back(t);
  return out;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : entries_) n += t.numel();
  return n;
}

void ParameterSet::clear_grads() {
  for (auto& [name, t] : entries_) t.clear_grad();
}

}  // namespace hargan::nn
