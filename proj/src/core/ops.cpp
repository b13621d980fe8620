#include "hargan/core/ops.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "hargan/core/errors.hpp"

namespace hargan {

namespace {

using detail::TensorImpl;

thread_local ReluSignTrace* g_relu_trace = nullptr;
thread_local std::vector<bool>* g_relu_signs = nullptr;

std::size_t normalize_axis(int axis, std::size_t rank) {
  const int r = static_cast<int>(rank);
  const int a = axis < 0 ? axis + r : axis;
  if (a < 0 || a >= r) {
    throw ShapeError("axis " + std::to_string(axis) + " invalid for rank " + std::to_string(rank));
  }
  return static_cast<std::size_t>(a);
}

// C[m x n] += A[m x k] * B[k x n], all row-major. Four rows of B per pass
// over a row of C.
void gemm_accumulate(double* C, const double* A, const double* B, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = C + i * n;
    const double* arow = A + i * k;
    std::size_t q = 0;
    for (; q + 4 <= k; q += 4) {
      const double a0 = arow[q], a1 = arow[q + 1], a2 = arow[q + 2], a3 = arow[q + 3];
      const double* b0 = B + q * n;
      const double* b1 = b0 + n;
      const double* b2 = b1 + n;
      const double* b3 = b2 + n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += a0 * b0[j] + a1 * b1[j] + a2 * b2[j] + a3 * b3[j];
    }
    for (; q < k; ++q) {
      const double a = arow[q];
      const double* b = B + q * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += a * b[j];
    }
  }
}

void transpose_into(std::vector<double>& out, const double* X, std::size_t rows, std::size_t cols) {
  out.resize(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[c * rows + r] = X[r * cols + c];
  }
}

std::size_t product(const Shape& s, std::size_t begin, std::size_t end) {
  std::size_t n = 1;
  for (std::size_t i = begin; i < end; ++i) n *= s[i];
  return n;
}

// Flat source offsets of `in` for each element of the broadcast output.
std::vector<std::size_t> broadcast_offsets(const Shape& in, const Shape& out) {
  const std::size_t rank = out.size();
  const std::size_t shift = rank - in.size();
  std::vector<std::size_t> stride(rank, 0);
  std::size_t s = 1;
  for (std::size_t d = in.size(); d-- > 0;) {
    stride[d + shift] = in[d] == 1 ? 0 : s;
    s *= in[d];
  }
  const std::size_t n = shape_numel(out);
  std::vector<std::size_t> offsets(n);
  std::vector<std::size_t> index(rank, 0);
  std::size_t off = 0;
  for (std::size_t i = 0; i < n; ++i) {
    offsets[i] = off;
    for (std::size_t d = rank; d-- > 0;) {
      ++index[d];
      off += stride[d];
      if (index[d] < out[d]) break;
      off -= stride[d] * index[d];
      index[d] = 0;
    }
  }
  return offsets;
}

double unary_forward(UnaryOp op, double x) {
  switch (op) {
    case UnaryOp::Tanh: return std::tanh(x);
    case UnaryOp::Sigmoid: return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    case UnaryOp::Exp: return std::exp(x);
    case UnaryOp::Log: return std::log(x);
    case UnaryOp::Relu: return x > 0 ? x : 0.0;
    case UnaryOp::Neg: return -x;
    case UnaryOp::Sqrt: return std::sqrt(x);
    case UnaryOp::Softplus: return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
  }
  return 0.0;
}

// Derivative expressed through the input x and output y.
double unary_derivative(UnaryOp op, double x, double y) {
  switch (op) {
    case UnaryOp::Tanh: return 1.0 - y * y;
    case UnaryOp::Sigmoid: return y * (1.0 - y);
    case UnaryOp::Exp: return y;
    case UnaryOp::Log: return 1.0 / x;
    case UnaryOp::Relu: return x > 0 ? 1.0 : 0.0;
    case UnaryOp::Neg: return -1.0;
    case UnaryOp::Sqrt: return 0.5 / y;
    case UnaryOp::Softplus: return unary_forward(UnaryOp::Sigmoid, x);
  }
  return 0.0;
}

const char* unary_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Tanh: return "tanh";
    case UnaryOp::Sigmoid: return "sigmoid";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Log: return "log";
    case UnaryOp::Relu: return "relu";
    case UnaryOp::Neg: return "neg";
    case UnaryOp::Sqrt: return "sqrt";
    case UnaryOp::Softplus: return "softplus";
  }
  return "unary";
}

// Output positions t for which t + shift lies inside [0, len).
struct TapRange {
  std::size_t begin;
  std::size_t end;
};

TapRange tap_range(std::ptrdiff_t shift, std::size_t len, std::size_t out_len) {
  const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
  const std::ptrdiff_t hi =
      std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(out_len), static_cast<std::ptrdiff_t>(len) - shift);
  if (hi <= lo) return {0, 0};
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

}  // namespace

Shape broadcast_shapes(const Shape& a, const Shape& b) {
  const std::size_t rank = std::max(a.size(), b.size());
  Shape out(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    const std::size_t da = i < rank - a.size() ? 1 : a[i - (rank - a.size())];
    const std::size_t db = i < rank - b.size() ? 1 : b[i - (rank - b.size())];
    if (da != db && da != 1 && db != 1) {
      throw ShapeError("shape mismatch: cannot broadcast " + shape_to_string(a) + " with " + shape_to_string(b));
    }
    out[i] = std::max(da, db);
  }
  return out;
}

Tensor elementwise(UnaryOp op, const Tensor& a) {
  const auto& x = a.impl().data;
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = unary_forward(op, x[i]);
  if (op == UnaryOp::Relu && g_relu_signs) {
    for (double v : x) g_relu_signs->push_back(v > 0);
  }
  auto ai = a.impl_ptr();
  return make_result(a.shape(), std::move(y), {a}, unary_name(op), [ai, op](const TensorImpl& out) {
    double* g = ai->grad_buffer();
    if (!g) return;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
      g[i] += out.grad[i] * unary_derivative(op, ai->data[i], out.data[i]);
    }
  });
}

Tensor elementwise(BinaryOp op, const Tensor& a, const Tensor& b) {
  Shape out_shape = broadcast_shapes(a.shape(), b.shape());
  const std::size_t n = shape_numel(out_shape);
  auto ai = a.impl_ptr();
  auto bi = b.impl_ptr();

  // Offsets are only materialized when an operand is actually broadcast.
  std::shared_ptr<const std::vector<std::size_t>> oa, ob;
  if (a.shape() != out_shape) oa = std::make_shared<std::vector<std::size_t>>(broadcast_offsets(a.shape(), out_shape));
  if (b.shape() != out_shape) ob = std::make_shared<std::vector<std::size_t>>(broadcast_offsets(b.shape(), out_shape));

  const double* x = ai->data.data();
  const double* z = bi->data.data();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = x[oa ? (*oa)[i] : i];
    const double v = z[ob ? (*ob)[i] : i];
    switch (op) {
      case BinaryOp::Add: y[i] = u + v; break;
      case BinaryOp::Sub: y[i] = u - v; break;
      case BinaryOp::Mul: y[i] = u * v; break;
      case BinaryOp::Div: y[i] = u / v; break;
    }
  }
  static constexpr const char* names[] = {"add", "sub", "mul", "div"};
  return make_result(std::move(out_shape), std::move(y), {a, b}, names[static_cast<int>(op)],
                     [ai, bi, oa, ob, op](const TensorImpl& out) {
                       double* ga = ai->grad_buffer();
                       double* gb = bi->grad_buffer();
                       const double* x = ai->data.data();
                       const double* z = bi->data.data();
                       for (std::size_t i = 0; i < out.grad.size(); ++i) {
                         const std::size_t ia = oa ? (*oa)[i] : i;
                         const std::size_t ib = ob ? (*ob)[i] : i;
                         const double g = out.grad[i];
                         switch (op) {
                           case BinaryOp::Add:
                             if (ga) ga[ia] += g;
                             if (gb) gb[ib] += g;
                             break;
                           case BinaryOp::Sub:
                             if (ga) ga[ia] += g;
                             if (gb) gb[ib] -= g;
                             break;
                           case BinaryOp::Mul:
                             if (ga) ga[ia] += g * z[ib];
                             if (gb) gb[ib] += g * x[ia];
                             break;
                           case BinaryOp::Div:
                             if (ga) ga[ia] += g / z[ib];
                             if (gb) gb[ib] -= g * x[ia] / (z[ib] * z[ib]);
                             break;
                         }
                       }
                     });
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> y(a.data().begin(), a.data().end());
  for (double& v : y) v *= factor;
  auto ai = a.impl_ptr();
  return make_result(a.shape(), std::move(y), {a}, "scale", [ai, factor](const TensorImpl& out) {
    double* g = ai->grad_buffer();
    if (!g) return;
    for (std::size_t i = 0; i < out.grad.size(); ++i) g[i] += factor * out.grad[i];
  });
}

Tensor add_scalar(const Tensor& a, double value) {
  std::vector<double> y(a.data().begin(), a.data().end());
  for (double& v : y) v += value;
  auto ai = a.impl_ptr();
  return make_result(a.shape(), std::move(y), {a}, "add_scalar", [ai](const TensorImpl& out) {
    double* g = ai->grad_buffer();
    if (!g) return;
    for (std::size_t i = 0; i < out.grad.size(); ++i) g[i] += out.grad[i];
  });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  const Shape& as = a.shape();
  const Shape& bs = b.shape();
  if (as.size() < 2 || bs.size() < 2) {
    throw ShapeError("matmul needs rank >= 2 operands, got " + shape_to_string(as) + " and " + shape_to_string(bs));
  }
  const std::size_t m = as[as.size() - 2];
  const std::size_t k = as.back();
  const std::size_t kb = bs[bs.size() - 2];
  const std::size_t n = bs.back();
  if (k != kb) {
    throw ShapeError("matmul inner dimensions disagree: " + shape_to_string(as) + " x " + shape_to_string(bs));
  }
  const bool shared_b = bs.size() == 2;
  if (!shared_b && !std::equal(as.begin(), as.end() - 2, bs.begin(), bs.end() - 2)) {
    throw ShapeError("matmul batch dimensions disagree: " + shape_to_string(as) + " x " + shape_to_string(bs));
  }
  const std::size_t batch = product(as, 0, as.size() - 2);
  Shape out_shape(as.begin(), as.end() - 2);
  out_shape.push_back(m);
  out_shape.push_back(n);

  std::vector<double> c(batch * m * n, 0.0);
  const double* A = a.data().data();
  const double* B = b.data().data();
  for (std::size_t p = 0; p < batch; ++p) {
    const double* Ap = A + p * m * k;
    const double* Bp = shared_b ? B : B + p * k * n;
    gemm_accumulate(c.data() + p * m * n, Ap, Bp, m, k, n);
  }

  auto ai = a.impl_ptr();
  auto bi = b.impl_ptr();
  return make_result(std::move(out_shape), std::move(c), {a, b}, "matmul",
                     [ai, bi, batch, m, k, n, shared_b](const TensorImpl& out) {
                       double* ga = ai->grad_buffer();
                       double* gb = bi->grad_buffer();
                       const double* A = ai->data.data();
                       const double* B = bi->data.data();
                       const double* G = out.grad.data();
                       std::vector<double> bt, at;  // transposed operands of the current batch entry
                       for (std::size_t p = 0; p < batch; ++p) {
                         const double* Ap = A + p * m * k;
                         const double* Bp = shared_b ? B : B + p * k * n;
                         const double* Gp = G + p * m * n;
                         if (ga) {
                           // dA = dC * B^T
                           if (bt.empty() || !shared_b) transpose_into(bt, Bp, k, n);
                           gemm_accumulate(ga + p * m * k, Gp, bt.data(), m, n, k);
                         }
                         if (gb) {
                           // dB = A^T * dC
                           transpose_into(at, Ap, m, k);
                           gemm_accumulate(shared_b ? gb : gb + p * k * n, at.data(), Gp, k, m, n);
                         }
                       }
                     });
}

Tensor permute(const Tensor& a, const std::vector<std::size_t>& order) {
  const Shape& in = a.shape();
  const std::size_t rank = in.size();
  if (order.size() != rank) throw ShapeError("permute order length differs from rank of " + shape_to_string(in));
  std::vector<bool> seen(rank, false);
  for (std::size_t d : order) {
    if (d >= rank || seen[d]) throw ShapeError("permute order is not a permutation");
    seen[d] = true;
  }
  std::vector<std::size_t> in_stride(rank, 1);
  for (std::size_t d = rank; d-- > 1;) in_stride[d - 1] = in_stride[d] * in[d];
  Shape out(rank);
  std::vector<std::size_t> stride(rank);
  for (std::size_t d = 0; d < rank; ++d) {
    out[d] = in[order[d]];
    stride[d] = in_stride[order[d]];
  }
  const std::size_t n = a.numel();
  auto src = std::make_shared<std::vector<std::size_t>>(n);
  std::vector<std::size_t> index(rank, 0);
  std::size_t off = 0;
  for (std::size_t i = 0; i < n; ++i) {
    (*src)[i] = off;
    for (std::size_t d = rank; d-- > 0;) {
      ++index[d];
      off += stride[d];
      if (index[d] < out[d]) break;
      off -= stride[d] * index[d];
      index[d] = 0;
    }
  }
  const auto& x = a.impl().data;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x[(*src)[i]];
  auto ai = a.impl_ptr();
  return make_result(std::move(out), std::move(y), {a}, "permute", [ai, src](const TensorImpl& o) {
    double* g = ai->grad_buffer();
    if (!g) return;
    for (std::size_t i = 0; i < o.grad.size(); ++i) g[(*src)[i]] += o.grad[i];
  });
}

Tensor transpose(const Tensor& a, int axis0, int axis1) {
  const std::size_t rank = a.dim();
  std::vector<std::size_t> order(rank);
  std::iota(order.begin(), order.end(), 0);
  std::swap(order[normalize_axis(axis0, rank)], order[normalize_axis(axis1, rank)]);
  return permute(a, order);
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) {
    throw ShapeError("cannot reshape " + shape_to_string(a.shape()) + " to " + shape_to_string(shape));
  }
  auto ai = a.impl_ptr();
  return make_result(std::move(shape), ai->data, {a}, "reshape", [ai](const TensorImpl& out) {
    double* g = ai->grad_buffer();
    if (!g) return;
    for (std::size_t i = 0; i < out.grad.size(); ++i) g[i] += out.grad[i];
  });
}

Tensor narrow(const Tensor& a, int axis, std::size_t start, std::size_t length) {
  const Shape& in = a.shape();
  const std::size_t ax = normalize_axis(axis, in.size());
  if (start + length > in[ax]) {
    throw ShapeError("narrow [" + std::to_string(start) + ", " + std::to_string(start + length) +
                     ") out of range for " + shape_to_string(in));
  }
  const std::size_t outer = product(in, 0, ax);
  const std::size_t inner = product(in, ax + 1, in.size());
  const std::size_t extent = in[ax];
  Shape out = in;
  out[ax] = length;
  std::vector<double> y(outer * length * inner);
  const double* x = a.data().data();
  for (std::size_t o = 0; o < outer; ++o) {
    std::copy_n(x + (o * extent + start) * inner, length * inner, y.data() + o * length * inner);
  }
  auto ai = a.impl_ptr();
  return make_result(std::move(out), std::move(y), {a}, "narrow",
                     [ai, outer, inner, extent, start, length](const TensorImpl& o) {
                       double* g = ai->grad_buffer();
                       if (!g) return;
                       for (std::size_t b = 0; b < outer; ++b) {
                         double* dst = g + (b * extent + start) * inner;
                         const double* src = o.grad.data() + b * length * inner;
                         for (std::size_t i = 0; i < length * inner; ++i) dst[i] += src[i];
                       }
                     });
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  if (parts.empty()) throw ShapeError("concat of zero tensors");
  const Shape& first = parts.front().shape();
  const std::size_t ax = normalize_axis(axis, first.size());
  std::size_t total = 0;
  std::vector<std::size_t> extents;
  for (const Tensor& t : parts) {
    const Shape& s = t.shape();
    bool ok = s.size() == first.size();
    for (std::size_t d = 0; ok && d < s.size(); ++d) ok = d == ax || s[d] == first[d];
    if (!ok) throw ShapeError("concat shape mismatch: " + shape_to_string(first) + " vs " + shape_to_string(s));
    extents.push_back(s[ax]);
    total += s[ax];
  }
  const std::size_t outer = product(first, 0, ax);
  const std::size_t inner = product(first, ax + 1, first.size());
  Shape out = first;
  out[ax] = total;
  std::vector<double> y(outer * total * inner);
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const double* x = parts[p].data().data();
    const std::size_t len = extents[p] * inner;
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(x + o * len, len, y.data() + (o * total) * inner + offset * inner);
    }
    offset += extents[p];
  }
  std::vector<std::shared_ptr<TensorImpl>> impls;
  for (const Tensor& t : parts) impls.push_back(t.impl_ptr());
  return make_result(std::move(out), std::move(y), parts, "concat",
                     [impls, extents, outer, inner, total](const TensorImpl& o) {
                       std::size_t offset = 0;
                       for (std::size_t p = 0; p < impls.size(); ++p) {
                         double* g = impls[p]->grad_buffer();
                         const std::size_t len = extents[p] * inner;
                         if (g) {
                           for (std::size_t b = 0; b < outer; ++b) {
                             const double* src = o.grad.data() + (b * total) * inner + offset * inner;
                             for (std::size_t i = 0; i < len; ++i) g[b * len + i] += src[i];
                           }
                         }
                         offset += extents[p];
                       }
                     });
}

Tensor stack(const std::vector<Tensor>& parts, int axis) {
  if (parts.empty()) throw ShapeError("stack of zero tensors");
  const Shape& s = parts.front().shape();
  const int rank = static_cast<int>(s.size()) + 1;
  const std::size_t ax = normalize_axis(axis, static_cast<std::size_t>(rank));
  Shape unsq = s;
  unsq.insert(unsq.begin() + static_cast<std::ptrdiff_t>(ax), 1);
  std::vector<Tensor> expanded;
  expanded.reserve(parts.size());
  for (const Tensor& t : parts) {
    if (t.shape() != s) throw ShapeError("stack shape mismatch: " + shape_to_string(s) + " vs " + shape_to_string(t.shape()));
    expanded.push_back(reshape(t, unsq));
  }
  return concat(expanded, static_cast<int>(ax));
}

Tensor reduce(ReduceOp op, const Tensor& a, int axis, bool keepdim) {
  const Shape& in = a.shape();
  const std::size_t ax = normalize_axis(axis, in.size());
  const std::size_t outer = product(in, 0, ax);
  const std::size_t inner = product(in, ax + 1, in.size());
  const std::size_t extent = in[ax];
  Shape out = in;
  if (keepdim) {
    out[ax] = 1;
  } else {
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(ax));
  }
  const double* x = a.data().data();
  std::vector<double> y(outer * inner, 0.0);
  auto argmax = std::make_shared<std::vector<std::size_t>>();
  if (op == ReduceOp::Max) argmax->assign(outer * inner, 0);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      const double* p = x + o * extent * inner + i;
      double acc = op == ReduceOp::Max ? p[0] : 0.0;
      std::size_t best = 0;
      for (std::size_t j = 0; j < extent; ++j) {
        const double v = p[j * inner];
        if (op == ReduceOp::Max) {
          if (v > acc) {
            acc = v;
            best = j;
          }
        } else {
          acc += v;
        }
      }
      if (op == ReduceOp::Mean) acc /= static_cast<double>(extent);
      y[o * inner + i] = acc;
      if (op == ReduceOp::Max) (*argmax)[o * inner + i] = best;
    }
  }
  auto ai = a.impl_ptr();
  static constexpr const char* names[] = {"sum", "mean", "max"};
  return make_result(std::move(out), std::move(y), {a}, names[static_cast<int>(op)],
                     [ai, op, outer, inner, extent, argmax](const TensorImpl& o) {
                       double* g = ai->grad_buffer();
                       if (!g) return;
                       const double w = op == ReduceOp::Mean ? 1.0 / static_cast<double>(extent) : 1.0;
                       for (std::size_t b = 0; b < outer; ++b) {
                         for (std::size_t i = 0; i < inner; ++i) {
                           const double go = o.grad[b * inner + i];
                           double* p = g + b * extent * inner + i;
                           if (op == ReduceOp::Max) {
                             p[(*argmax)[b * inner + i] * inner] += go;
                           } else {
                             for (std::size_t j = 0; j < extent; ++j) p[j * inner] += go * w;
                           }
                         }
                       }
                     });
}

Tensor sum(const Tensor& a) { return reduce(ReduceOp::Sum, reshape(a, {a.numel()}), 0); }
Tensor mean(const Tensor& a) { return reduce(ReduceOp::Mean, reshape(a, {a.numel()}), 0); }

Tensor softmax(const Tensor& a) {
  if (a.dim() == 0) throw ShapeError("softmax of a scalar");
  const std::size_t n = a.shape().back();
  const std::size_t rows = a.numel() / n;
  const double* x = a.data().data();
  std::vector<double> y(a.numel());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x + r * n;
    double* yr = y.data() + r * n;
    const double mx = *std::max_element(xr, xr + n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += (yr[j] = std::exp(xr[j] - mx));
    for (std::size_t j = 0; j < n; ++j) yr[j] /= total;
  }
  auto ai = a.impl_ptr();
  return make_result(a.shape(), std::move(y), {a}, "softmax", [ai, rows, n](const TensorImpl& o) {
    double* g = ai->grad_buffer();
    if (!g) return;
    for (std::size_t r = 0; r < rows; ++r) {
      const double* yr = o.data.data() + r * n;
      const double* gr = o.grad.data() + r * n;
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += gr[j] * yr[j];
      for (std::size_t j = 0; j < n; ++j) g[r * n + j] += yr[j] * (gr[j] - dot);
    }
  });
}

Tensor log_softmax(const Tensor& a) {
  if (a.dim() == 0) throw ShapeError("log_softmax of a scalar");
  const std::size_t n = a.shape().back();
  const std::size_t rows = a.numel() / n;
  const double* x = a.data().data();
  std::vector<double> y(a.numel());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x + r * n;
    const double mx = *std::max_element(xr, xr + n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += std::exp(xr[j] - mx);
    const double lse = mx + std::log(total);
    for (std::size_t j = 0; j < n; ++j) y[r * n + j] = xr[j] - lse;
  }
  auto ai = a.impl_ptr();
  return make_result(a.shape(), std::move(y), {a}, "log_softmax", [ai, rows, n](const TensorImpl& o) {
    double* g = ai->grad_buffer();
    if (!g) return;
    for (std::size_t r = 0; r < rows; ++r) {
      const double* yr = o.data.data() + r * n;
      const double* gr = o.grad.data() + r * n;
      double total = 0.0;
      for (std::size_t j = 0; j < n; ++j) total += gr[j];
      for (std::size_t j = 0; j < n; ++j) g[r * n + j] += gr[j] - std::exp(yr[j]) * total;
    }
  });
}

ReluSignTrace::ReluSignTrace() : previous_(g_relu_trace) {
  g_relu_trace = this;
  g_relu_signs = &signs_;
}

ReluSignTrace::~ReluSignTrace() {
  g_relu_trace = previous_;
  g_relu_signs = previous_ ? &previous_->signs_ : nullptr;
}

Tensor conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t padding) {
  const bool batched = x.dim() == 3;
  if (!batched && x.dim() != 2) throw ShapeError("conv1d input must be [c, L] or [batch, c, L], got " + shape_to_string(x.shape()));
  if (weight.dim() != 3) throw ShapeError("conv1d weight must be [c_out, c_in, k], got " + shape_to_string(weight.shape()));
  const std::size_t batch = batched ? x.shape()[0] : 1;
  const std::size_t c_in = x.size(-2);
  const std::size_t len = x.size(-1);
  const std::size_t c_out = weight.shape()[0];
  const std::size_t k = weight.shape()[2];
  if (weight.shape()[1] != c_in) {
    throw ShapeError("conv1d channel mismatch: input has " + std::to_string(c_in) + " channels, weight expects " +
                     std::to_string(weight.shape()[1]));
  }
  if (bias.defined() && bias.shape() != Shape{c_out}) {
    throw ShapeError("conv1d bias must be [" + std::to_string(c_out) + "], got " + shape_to_string(bias.shape()));
  }
  if (len + 2 * padding < k) throw ShapeError("conv1d kernel longer than padded input");
  const std::size_t out_len = len + 2 * padding - k + 1;

  const double* X = x.data().data();
  const double* W = weight.data().data();
  std::vector<double> y(batch * c_out * out_len, 0.0);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < c_out; ++o) {
      double* yr = y.data() + (b * c_out + o) * out_len;
      if (bias.defined()) std::fill_n(yr, out_len, bias.data()[o]);
      for (std::size_t c = 0; c < c_in; ++c) {
        const double* xr = X + (b * c_in + c) * len;
        const double* wr = W + (o * c_in + c) * k;
        for (std::size_t q = 0; q < k; ++q) {
          const double w = wr[q];
          const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(q) - static_cast<std::ptrdiff_t>(padding);
          const auto [t0, t1] = tap_range(shift, len, out_len);
          for (std::size_t t = t0; t < t1; ++t) {
            yr[t] += w * xr[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(t) + shift)];
          }
        }
      }
    }
  }

  Shape out_shape = batched ? Shape{batch, c_out, out_len} : Shape{c_out, out_len};
  std::vector<Tensor> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);
  auto xi = x.impl_ptr();
  auto wi = weight.impl_ptr();
  auto bi = bias.defined() ? bias.impl_ptr() : nullptr;
  return make_result(std::move(out_shape), std::move(y), inputs, "conv1d",
                     [xi, wi, bi, batch, c_in, c_out, len, k, out_len, padding](const TensorImpl& out) {
                       double* gx = xi->grad_buffer();
                       double* gw = wi->grad_buffer();
                       double* gb = bi ? bi->grad_buffer() : nullptr;
                       const double* X = xi->data.data();
                       const double* W = wi->data.data();
                       for (std::size_t b = 0; b < batch; ++b) {
                         for (std::size_t o = 0; o < c_out; ++o) {
                           const double* gr = out.grad.data() + (b * c_out + o) * out_len;
                           if (gb) {
                             for (std::size_t t = 0; t < out_len; ++t) gb[o] += gr[t];
                           }
                           for (std::size_t c = 0; c < c_in; ++c) {
                             const std::size_t xoff = (b * c_in + c) * len;
                             const std::size_t woff = (o * c_in + c) * k;
                             for (std::size_t q = 0; q < k; ++q) {
                               const std::ptrdiff_t shift =
                                   static_cast<std::ptrdiff_t>(q) - static_cast<std::ptrdiff_t>(padding);
                               const auto [t0, t1] = tap_range(shift, len, out_len);
                               const std::size_t base = xoff;
                               double acc = 0.0;
                               const double w = W[woff + q];
                               for (std::size_t t = t0; t < t1; ++t) {
                                 const std::size_t xi = static_cast<std::size_t>(
                                     static_cast<std::ptrdiff_t>(base + t) + shift);
                                 acc += gr[t] * X[xi];
                                 if (gx) gx[xi] += gr[t] * w;
                               }
                               if (gw) gw[woff + q] += acc;
                             }
                           }
                         }
                       }
                     });
}

}  // namespace hargan
