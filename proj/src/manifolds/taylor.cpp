#include "rwprior/manifolds/taylor.hpp"

#include "rwprior/ops.hpp"

namespace rwprior {

namespace {

void check_input(const TaylorNet& net, const Tensor& y) {
  if (y.shape().c != net.image_channels())
    throw ShapeError("taylor_forward: input shape " + to_string(y.shape()) + " has " +
                     std::to_string(y.shape().c) + " channels, network expects " +
                     std::to_string(net.image_channels()));
  if (net.derivative.in_channels() != net.feature_channels() + net.image_channels() ||
      net.derivative.out_channels() != net.feature_channels())
    throw ShapeError("taylor_forward: derivative part must map width + image channels to width");
}

}  // namespace

std::vector<Tensor> taylor_terms(const TaylorNet& net, const Tensor& y, std::size_t order) {
  check_input(net, y);
  std::vector<Tensor> terms;
  terms.reserve(order + 1);
  terms.push_back(net.mapping.forward(y));
  for (std::size_t k = 1; k <= order; ++k) terms.push_back(net.derivative.forward(channel_concat(terms.back(), y)));
  return terms;
}

Tensor taylor_forward(const TaylorNet& net, const Tensor& y, std::size_t order) {
  std::vector<Tensor> terms = taylor_terms(net, y, order);
  Tensor out = std::move(terms[0]);
  double inv_factorial = 1.0;
  for (std::size_t k = 1; k <= order; ++k) {
    inv_factorial /= static_cast<double>(k);
    out.add_scaled(terms[k], inv_factorial);
  }
  return out;
}

Tensor taylor_vjp(const TaylorNet& net, const Tensor& y, std::size_t order, const Tensor& upstream) {
  check_input(net, y);
  ConvStack::Trace mapping_trace;
  std::vector<ConvStack::Trace> traces(order);
  Tensor prev = net.mapping.forward(y, mapping_trace);
  for (std::size_t k = 0; k < order; ++k) prev = net.derivative.forward(channel_concat(prev, y), traces[k]);
  require_same_shape(prev, upstream, "taylor_vjp");

  std::vector<double> coeff(order + 1, 1.0);
  for (std::size_t k = 1; k <= order; ++k) coeff[k] = coeff[k - 1] / static_cast<double>(k);

  // grad_term holds d/d g^k, accumulated from the output sum and from g^(k+1).
  Tensor grad_term = upstream * coeff[order];
  Tensor grad_y(y.shape());
  for (std::size_t k = order; k >= 1; --k) {
    auto [grad_prev, grad_img] = channel_split_at(net.derivative.backward(traces[k - 1], grad_term),
                                                  net.feature_channels());
    grad_y += grad_img;
    grad_term = std::move(grad_prev);
    grad_term.add_scaled(upstream, coeff[k - 1]);
  }
  grad_y += net.mapping.backward(mapping_trace, grad_term);
  return grad_y;
}

TaylorNet make_taylor_net(SeededRng& rng, std::size_t image_channels, std::size_t width, std::size_t depth,
                          std::size_t kernel, std::size_t order, InitScheme scheme) {
  TaylorNet net;
  net.mapping = make_conv_stack(rng, image_channels, width, width, depth, kernel, scheme);
  net.derivative = make_conv_stack(rng, width + image_channels, width, width, depth, kernel, scheme);
  net.order = order;
  return net;
}

}  // namespace rwprior
