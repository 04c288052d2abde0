#include "rwprior/conv_stack.hpp"

#include "rwprior/manifolds/cdc.hpp"
#include "rwprior/ops.hpp"

namespace rwprior {

std::size_t ConvStack::in_channels() const { return layers.empty() ? 0 : layers.front().in_channels(); }
std::size_t ConvStack::out_channels() const { return layers.empty() ? 0 : layers.back().out_channels(); }

Tensor ConvStack::forward(const Tensor& x) const {
  Trace unused;
  return forward(x, unused);
}

Tensor ConvStack::forward(const Tensor& x, Trace& trace) const {
  if (layers.empty()) throw std::invalid_argument("ConvStack::forward: stack has no layers");
  trace.inputs.clear();
  trace.inputs.reserve(layers.size());
  Tensor h = x;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    trace.inputs.push_back(h);
    h = cdc_layer(h, layers[l], theta, padding);
    if (l + 1 < layers.size()) h = relu(h);
  }
  return h;
}

Tensor ConvStack::backward(const Trace& trace, const Tensor& upstream) const {
  Tensor g = upstream;
  for (std::size_t l = layers.size(); l-- > 0;) {
    if (l + 1 < layers.size()) g = relu_backward(trace.inputs[l + 1], g);
    g = cdc_layer_input_grad(layers[l], theta, g, padding);
  }
  return g;
}

Tensor ConvStack::backward(const Trace& trace, const Tensor& upstream, std::vector<ConvKernel>& layer_grads) const {
  layer_grads.resize(layers.size());
  Tensor g = upstream;
  for (std::size_t l = layers.size(); l-- > 0;) {
    if (l + 1 < layers.size()) g = relu_backward(trace.inputs[l + 1], g);
    layer_grads[l] = cdc_layer_kernel_grad(trace.inputs[l], layers[l], theta, g, padding);
    g = cdc_layer_input_grad(layers[l], theta, g, padding);
  }
  return g;
}

ConvStack make_conv_stack(SeededRng& rng, std::size_t in_channels, std::size_t width, std::size_t out_channels,
                          std::size_t depth, std::size_t kernel, InitScheme scheme, double theta) {
  if (depth == 0) throw std::invalid_argument("conv stack depth must be at least 1");
  ConvStack s;
  s.theta = theta;
  for (std::size_t l = 0; l < depth; ++l) {
    const std::size_t in = l == 0 ? in_channels : width;
    const std::size_t out = l + 1 == depth ? out_channels : width;
    s.layers.push_back(init_kernel(rng, out, in, kernel, kernel, scheme));
  }
  return s;
}

}  // namespace rwprior
