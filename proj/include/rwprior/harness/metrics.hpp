#pragma once

#include "rwprior/tensor.hpp"

namespace rwprior {

inline constexpr double kPsnrCap = 99.0;

/// 10 log10(1 / MSE) for images in [0, 1], capped at kPsnrCap when MSE < 1e-10.
double psnr(const Tensor& a, const Tensor& b);

/// Single-scale SSIM with an 11x11 Gaussian window (sigma 1.5), C1 = 0.01^2,
/// C2 = 0.03^2, averaged over all fully-inside window positions and all
/// (batch, channel) planes. H and W must be at least 11.
double ssim(const Tensor& a, const Tensor& b);

}  // namespace rwprior
