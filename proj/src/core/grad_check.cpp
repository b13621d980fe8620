#include "hargan/core/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hargan/core/errors.hpp"
#include "hargan/core/ops.hpp"

namespace hargan {

double relative_error(double analytic, double numeric) {
  if (!std::isfinite(analytic) || !std::isfinite(numeric)) return std::numeric_limits<double>::infinity();
  return std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

double grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& x, double eps) {
  Tensor leaf = x.detach();
  leaf.set_requires_grad(true);
  return grad_check_params([&] { return f(leaf); }, {leaf}, eps);
}

double grad_check_params(const std::function<Tensor()>& f, std::vector<Tensor> params, double eps) {
  return grad_check_report(f, std::move(params), eps).max_relative_error;
}

GradCheckReport grad_check_report(const std::function<Tensor()>& f, std::vector<Tensor> params, double eps) {
  for (Tensor& p : params) {
    if (!p.is_leaf() || !p.requires_grad()) throw GraphError("grad_check parameters must be leaves requiring grad");
    p.clear_grad();
  }
  ReluSignTrace trace;
  Tensor y = f();
  const std::vector<bool> base_signs = trace.signs();
  if (y.numel() != 1) throw GraphError("grad_check needs a scalar-valued function");
  y.backward();

  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (Tensor& p : params) {
    analytic.emplace_back(p.grad().begin(), p.grad().end());
    if (analytic.back().empty()) analytic.back().assign(p.numel(), 0.0);
    p.clear_grad();
  }

  NoGradGuard no_grad;
  GradCheckReport report;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto values = params[k].mutable_data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      bool kinked = false;
      auto at = [&](double offset) {
        values[i] = original + offset;
        trace.reset();
        const double v = f().item();
        kinked = kinked || trace.signs() != base_signs;
        return v;
      };
      const double numeric = (8.0 * (at(eps) - at(-eps)) - (at(2.0 * eps) - at(-2.0 * eps))) / (12.0 * eps);
      values[i] = original;
      report.max_relative_error = std::max(report.max_relative_error, relative_error(analytic[k][i], numeric));
      if (kinked) ++report.kinked_coordinates;
    }
  }
  return report;
}

}  // namespace hargan
