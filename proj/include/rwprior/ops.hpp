#pragma once

#include <span>
#include <utility>

#include "rwprior/tensor.hpp"

namespace rwprior {

enum class Norm { L1, L2 };

/// Halves the channel axis: [0, C/2) and [C/2, C). C must be even.
std::pair<Tensor, Tensor> channel_split(const Tensor& x);
/// Splits channels into [0, first) and [first, C).
std::pair<Tensor, Tensor> channel_split_at(const Tensor& x, std::size_t first);
/// Inverse of channel_split; N, H, W must agree.
Tensor channel_concat(const Tensor& a, const Tensor& b);

/// (N, C, H, W) -> (N, 4C, H/2, W/2). Output channel 4c + 2dy + dx holds
/// input pixel (2y + dy, 2x + dx) of channel c.
Tensor space_to_depth(const Tensor& x);
Tensor depth_to_space(const Tensor& x);

/// Concatenate along the batch axis.
Tensor stack_batch(std::span<const Tensor> items);
/// Copy of batch item `i` as an N=1 tensor.
Tensor batch_item(const Tensor& x, std::size_t i);

Tensor relu(const Tensor& x);
/// upstream masked by (pre > 0).
Tensor relu_backward(const Tensor& pre, const Tensor& upstream);

/// Mean over elements of |a - b| (L1) or (a - b)^2 (L2).
double reduce_norm(const Tensor& a, const Tensor& b, Norm norm);
/// Gradient of reduce_norm with respect to `a`. The L1 subgradient at a == b is 0.
Tensor reduce_norm_grad(const Tensor& a, const Tensor& b, Norm norm);

const char* to_string(Norm norm);
Norm parse_norm(const std::string& s);

}  // namespace rwprior
