#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hargan/core/tensor.hpp"

namespace hargan::nn {

/// Named trainable tensors in registration order. Entries share storage with
/// the layers that registered them, so writing through either is visible to
/// both.
class ParameterSet {
 public:
  using Entry = std::pair<std::string, Tensor>;

  // Registers a leaf and marks it as requiring grad. Names must be unique.
  Tensor add(std::string name, Tensor value);

  const Tensor& get(std::string_view name) const;
  bool contains(std::string_view name) const;

  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Tensor> tensors() const;
  std::size_t size() const { return entries_.size(); }
  // Total number of scalars across all tensors.
  std::size_t scalar_count() const;

  void clear_grads();

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace hargan::nn
