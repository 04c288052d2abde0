#include "rwprior/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace rwprior {

std::pair<Tensor, Tensor> channel_split(const Tensor& x) {
  const Shape s = x.shape();
  if (s.c % 2 != 0)
    throw ShapeError("channel_split: channel count must be even, got shape " + to_string(s));
  return channel_split_at(x, s.c / 2);
}

std::pair<Tensor, Tensor> channel_split_at(const Tensor& x, std::size_t first) {
  const Shape s = x.shape();
  if (first > s.c)
    throw ShapeError("channel_split_at: split point " + std::to_string(first) + " exceeds shape " + to_string(s));
  const std::size_t rest = s.c - first;
  Tensor a({s.n, first, s.h, s.w});
  Tensor b({s.n, rest, s.h, s.w});
  for (std::size_t n = 0; n < s.n; ++n) {
    const double* src = x.plane(n, 0);
    std::copy_n(src, first * s.plane(), a.data() + n * first * s.plane());
    std::copy_n(src + first * s.plane(), rest * s.plane(), b.data() + n * rest * s.plane());
  }
  return {std::move(a), std::move(b)};
}

Tensor channel_concat(const Tensor& a, const Tensor& b) {
  const Shape sa = a.shape();
  const Shape sb = b.shape();
  if (sa.n != sb.n || sa.h != sb.h || sa.w != sb.w)
    throw ShapeError("channel_concat: incompatible shapes " + to_string(sa) + " and " + to_string(sb));
  Tensor out({sa.n, sa.c + sb.c, sa.h, sa.w});
  for (std::size_t n = 0; n < sa.n; ++n) {
    double* dst = out.plane(n, 0);
    std::copy_n(a.plane(n, 0), sa.c * sa.plane(), dst);
    std::copy_n(b.plane(n, 0), sb.c * sb.plane(), dst + sa.c * sa.plane());
  }
  return out;
}

Tensor space_to_depth(const Tensor& x) {
  const Shape s = x.shape();
  if (s.h % 2 != 0 || s.w % 2 != 0)
    throw ShapeError("space_to_depth: height and width must be divisible by 2, got shape " + to_string(s));
  Tensor out({s.n, 4 * s.c, s.h / 2, s.w / 2});
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c)
      for (std::size_t y = 0; y < s.h; ++y)
        for (std::size_t xx = 0; xx < s.w; ++xx)
          out.at(n, 4 * c + 2 * (y % 2) + xx % 2, y / 2, xx / 2) = x.at(n, c, y, xx);
  return out;
}

Tensor depth_to_space(const Tensor& x) {
  const Shape s = x.shape();
  if (s.c % 4 != 0)
    throw ShapeError("depth_to_space: channel count must be divisible by 4, got shape " + to_string(s));
  Tensor out({s.n, s.c / 4, 2 * s.h, 2 * s.w});
  const Shape so = out.shape();
  for (std::size_t n = 0; n < so.n; ++n)
    for (std::size_t c = 0; c < so.c; ++c)
      for (std::size_t y = 0; y < so.h; ++y)
        for (std::size_t xx = 0; xx < so.w; ++xx)
          out.at(n, c, y, xx) = x.at(n, 4 * c + 2 * (y % 2) + xx % 2, y / 2, xx / 2);
  return out;
}

Tensor stack_batch(std::span<const Tensor> items) {
  if (items.empty()) return {};
  const Shape first = items.front().shape();
  std::size_t total = 0;
  for (const Tensor& t : items) {
    const Shape s = t.shape();
    if (s.c != first.c || s.h != first.h || s.w != first.w)
      throw ShapeError("stack_batch: incompatible shapes " + to_string(first) + " and " + to_string(s));
    total += s.n;
  }
  Tensor out({total, first.c, first.h, first.w});
  double* dst = out.data();
  for (const Tensor& t : items) dst = std::copy(t.values().begin(), t.values().end(), dst);
  return out;
}

Tensor batch_item(const Tensor& x, std::size_t i) {
  const Shape s = x.shape();
  if (i >= s.n) throw ShapeError("batch_item: index " + std::to_string(i) + " out of range for " + to_string(s));
  Tensor out({1, s.c, s.h, s.w});
  std::copy_n(x.plane(i, 0), s.c * s.plane(), out.data());
  return out;
}

Tensor relu(const Tensor& x) {
  Tensor out = x;
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& pre, const Tensor& upstream) {
  require_same_shape(pre, upstream, "relu_backward");
  Tensor out = upstream;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!(pre[i] > 0.0)) out[i] = 0.0;
  return out;
}

double reduce_norm(const Tensor& a, const Tensor& b, Norm norm) {
  require_same_shape(a, b, "reduce_norm");
  if (a.empty()) throw ShapeError("reduce_norm: empty tensors");
  double acc = 0.0;
  if (norm == Norm::L1) {
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  } else {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      acc += d * d;
    }
  }
  return acc / static_cast<double>(a.size());
}

Tensor reduce_norm_grad(const Tensor& a, const Tensor& b, Norm norm) {
  require_same_shape(a, b, "reduce_norm_grad");
  if (a.empty()) throw ShapeError("reduce_norm_grad: empty tensors");
  const double inv = 1.0 / static_cast<double>(a.size());
  Tensor g(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (norm == Norm::L1)
      g[i] = d > 0.0 ? inv : (d < 0.0 ? -inv : 0.0);
    else
      g[i] = 2.0 * d * inv;
  }
  return g;
}

const char* to_string(Norm norm) { return norm == Norm::L1 ? "L1" : "L2"; }

Norm parse_norm(const std::string& s) {
  if (s == "L1") return Norm::L1;
  if (s == "L2") return Norm::L2;
  throw std::invalid_argument("unknown norm '" + s + "' (expected L1 or L2)");
}

}  // namespace rwprior
