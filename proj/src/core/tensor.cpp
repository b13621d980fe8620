#include "hargan/core/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "hargan/core/errors.hpp"

namespace hargan {

namespace {
thread_local bool g_grad_enabled = true;
}

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

double* detail::TensorImpl::grad_buffer() {
  if (!requires_grad) return nullptr;
  if (grad.empty()) grad.assign(data.size(), 0.0);
  return grad.data();
}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad) {
  if (shape_numel(shape) != data.size()) {
    throw ShapeError("tensor shape " + shape_to_string(shape) + " does not match " +
                     std::to_string(data.size()) + " values");
  }
  impl_ = std::make_shared<detail::TensorImpl>();
  impl_->shape = std::move(shape);
  impl_->data = std::move(data);
  impl_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }
Tensor Tensor::ones(Shape shape, bool requires_grad) { return full(std::move(shape), 1.0, requires_grad); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) { return Tensor({}, {value}, requires_grad); }

Tensor Tensor::randn(Shape shape, Rng& rng, double stddev, bool requires_grad) {
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = stddev * rng.normal();
  return Tensor(std::move(shape), std::move(v), requires_grad);
}

Tensor Tensor::uniform(Shape shape, Rng& rng, double lo, double hi, bool requires_grad) {
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = rng.uniform(lo, hi);
  return Tensor(std::move(shape), std::move(v), requires_grad);
}

detail::TensorImpl& Tensor::impl() const {
  if (!impl_) throw GraphError("use of an undefined tensor");
  return *impl_;
}

const Shape& Tensor::shape() const { return impl().shape; }

std::size_t Tensor::size(int axis) const {
  const int rank = static_cast<int>(dim());
  const int a = axis < 0 ? axis + rank : axis;
  if (a < 0 || a >= rank) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " + shape_to_string(shape()));
  }
  return shape()[static_cast<std::size_t>(a)];
}

std::size_t Tensor::numel() const { return impl().data.size(); }
std::span<const double> Tensor::data() const { return impl().data; }
std::span<double> Tensor::mutable_data() { return impl().data; }

double Tensor::item() const {
  if (numel() != 1) throw ShapeError("item() on tensor of shape " + shape_to_string(shape()));
  return impl().data[0];
}

bool Tensor::requires_grad() const { return impl().requires_grad; }

Tensor& Tensor::set_requires_grad(bool value) {
  if (!is_leaf()) throw GraphError("requires_grad can only be changed on leaf tensors");
  impl().requires_grad = value;
  return *this;
}

bool Tensor::is_leaf() const { return impl().node == nullptr; }
bool Tensor::has_grad() const { return !impl().grad.empty(); }
std::span<const double> Tensor::grad() const { return impl().grad; }
void Tensor::clear_grad() { impl().grad.clear(); }

Tensor Tensor::detach() const { return Tensor(shape(), impl().data, false); }

Tensor Tensor::clone() const {
  Tensor t(shape(), impl().data, false);
  if (is_leaf()) t.impl().requires_grad = requires_grad();
  return t;
}

Tensor make_result(Shape shape, std::vector<double> data, const std::vector<Tensor>& inputs, const char* op,
                   std::function<void(const detail::TensorImpl&)> backward) {
  auto impl = std::make_shared<detail::TensorImpl>();
  impl->shape = std::move(shape);
  impl->data = std::move(data);
  if (g_grad_enabled) {
    const bool any = std::any_of(inputs.begin(), inputs.end(), [](const Tensor& t) { return t.requires_grad(); });
    if (any) {
      auto node = std::make_shared<detail::Node>();
      node->op = op;
      node->inputs.reserve(inputs.size());
      for (const Tensor& t : inputs) node->inputs.push_back(t.impl_ptr());
      node->backward = std::move(backward);
      impl->node = std::move(node);
      impl->requires_grad = true;
    }
  }
  return Tensor(std::move(impl));
}

void Tensor::backward() const {
  detail::TensorImpl& root = impl();
  if (root.data.size() != 1) {
    throw GraphError("backward() needs a scalar loss, got shape " + shape_to_string(root.shape));
  }
  if (!root.requires_grad) throw GraphError("backward() on a tensor that does not require grad");

  // Iterative post-order DFS; `order` ends up topologically sorted (inputs first).
  std::vector<detail::TensorImpl*> order;
  std::unordered_set<const detail::TensorImpl*> visited;
  std::vector<std::pair<detail::TensorImpl*, std::size_t>> stack{{&root, 0}};
  visited.insert(&root);
  while (!stack.empty()) {
    auto& [t, next] = stack.back();
    if (t->node && next < t->node->inputs.size()) {
      detail::TensorImpl* child = t->node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) stack.emplace_back(child, 0);
      continue;
    }
    order.push_back(t);
    stack.pop_back();
  }

  for (const detail::TensorImpl* t : order) {
    if (t->node) {
      if (t->node->consumed) {
        throw GraphError(std::string("graph already consumed by a previous backward() (op '") + t->node->op + "')");
      }
    } else if (!t->grad.empty()) {
      throw GraphError("leaf tensor " + shape_to_string(t->shape) +
                       " already holds a gradient; clear it before another backward()");
    }
  }

  for (detail::TensorImpl* t : order) {
    if (t->node) t->grad.clear();
  }
  root.grad.assign(1, 1.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::TensorImpl* t = *it;
    if (!t->node || t->grad.empty()) continue;
    t->node->backward(*t);
  }
  for (detail::TensorImpl* t : order) {
    if (!t->node) continue;
    t->node->consumed = true;
    t->node->backward = nullptr;
    t->node->inputs.clear();
  }
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

}  // namespace hargan
