#pragma once

#include <vector>

#include "rwprior/conv.hpp"
#include "rwprior/random.hpp"

namespace rwprior {

/// A chain of convolutions with ReLU between consecutive layers and a linear
/// last layer. A non-zero `theta` turns every layer into a central difference
/// convolution (see cdc_layer).
struct ConvStack {
  std::vector<ConvKernel> layers;
  double theta = 0.0;
  Padding padding = Padding::Zero;

  /// Layer inputs recorded by the forward pass; inputs[l] feeds layer l.
  struct Trace {
    std::vector<Tensor> inputs;
  };

  std::size_t in_channels() const;
  std::size_t out_channels() const;

  Tensor forward(const Tensor& x) const;
  Tensor forward(const Tensor& x, Trace& trace) const;

  /// Gradient with respect to the stack input.
  Tensor backward(const Trace& trace, const Tensor& upstream) const;
  /// Same, also writing one gradient per layer into `layer_grads`.
  Tensor backward(const Trace& trace, const Tensor& upstream, std::vector<ConvKernel>& layer_grads) const;
};

/// Random stack: in -> width -> ... -> width -> out with `depth` layers of
/// size kernel x kernel. depth == 1 maps in -> out directly.
ConvStack make_conv_stack(SeededRng& rng, std::size_t in_channels, std::size_t width, std::size_t out_channels,
                          std::size_t depth, std::size_t kernel, InitScheme scheme, double theta = 0.0);

}  // namespace rwprior
