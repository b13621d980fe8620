#pragma once

#include <stdexcept>
#include <string>

namespace hargan {

// Incompatible shapes, bad axes, malformed configurations.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable or malformed input data and artifacts.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite losses or gradients during training.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Misuse of the autodiff graph (double backward, non-scalar loss, ...).
class GraphError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hargan
