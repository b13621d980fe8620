#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "doctest.h"
#include "hargan/core/grad_check.hpp"
#include "hargan/core/ops.hpp"
#include "hargan/core/rng.hpp"
#include "hargan/core/tensor.hpp"

namespace hargan::testing {

inline Tensor seeded(Shape shape, std::uint64_t seed, double stddev = 1.0) {
  Rng rng(seed);
  return Tensor::randn(std::move(shape), rng, stddev);
}

// Scalar probe sum(y * w) with fixed random weights, so every output
// coordinate carries a distinct gradient.
inline Tensor probe(const Tensor& y, std::uint64_t seed = 99) {
  return sum(y * seeded(y.shape(), seed));
}

// Max relative gradient error at a point whose stencils cross no relu kink;
// a crossing makes the point itself invalid and fails the test as such.
inline double checked_grad_error(const std::function<Tensor()>& f, std::vector<Tensor> params, double eps = 1e-3) {
  const GradCheckReport report = grad_check_report(f, std::move(params), eps);
  INFO("coordinates whose stencil crosses a relu kink: " << report.kinked_coordinates);
  REQUIRE(report.kinked_coordinates == 0);
  return report.max_relative_error;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("hargan_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }
inline std::vector<double> grads(const Tensor& t) { return {t.grad().begin(), t.grad().end()}; }

}  // namespace hargan::testing
