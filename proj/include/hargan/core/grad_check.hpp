#pragma once

#include <functional>
#include <vector>

#include "hargan/core/tensor.hpp"

namespace hargan {

// |analytic - numeric| / max(1e-8, |analytic| + |numeric|)
double relative_error(double analytic, double numeric);

/// Compares the reverse-mode gradient of scalar `f` at `x` against central
/// differences with step `eps`, using the fourth-order stencil
///   (8 (f(x+h) - f(x-h)) - (f(x+2h) - f(x-2h))) / 12h
/// so truncation error stays far below the tolerance even for coordinates
/// with small gradients. Returns the largest relative error over all
/// coordinates; any non-finite value yields +infinity.
double grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& x, double eps);

struct GradCheckReport {
  double max_relative_error = 0.0;
  // Coordinates whose stencil changed the sign of some relu input; the
  // finite-difference estimate is not a valid oracle there.
  std::size_t kinked_coordinates = 0;
};

GradCheckReport grad_check_report(const std::function<Tensor()>& f, std::vector<Tensor> params, double eps);

/// Same check over every coordinate of `params` (leaves that require grad),
/// perturbing them in place and restoring them afterwards. Any gradients
/// held by the parameters are cleared.
double grad_check_params(const std::function<Tensor()>& f, std::vector<Tensor> params, double eps);

}  // namespace hargan
