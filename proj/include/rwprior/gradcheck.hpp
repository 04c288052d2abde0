#pragma once

#include <functional>

#include "rwprior/tensor.hpp"

namespace rwprior {

/// Central-difference gradient of a scalar function:
///   g[i] = (f(x + step e_i) - f(x - step e_i)) / (2 step)
Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x, double step = 1e-5);

/// max_i |a_i - b_i| / max(max_i |b_i|, floor). Used to compare analytic and
/// numeric gradients on one scale.
double relative_error(const Tensor& a, const Tensor& b, double floor = 1e-8);

}  // namespace rwprior
