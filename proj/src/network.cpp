#include "advmod/network.hpp"

#include <stdexcept>

namespace advmod {

std::string role_name(Role role) {
  switch (role) {
    case Role::alice: return "alice";
    case Role::bob: return "bob";
    case Role::eve: return "eve";
  }
  return "?";
}

Role role_from_name(const std::string& name) {
  if (name == "alice") return Role::alice;
  if (name == "bob") return Role::bob;
  if (name == "eve") return Role::eve;
  throw std::invalid_argument("unknown role: " + name);
}

Tensor Network::forward(const Tensor& x) {
  if (x.rank() != 2 || x.shape[1] != input_width()) {
    throw std::invalid_argument(role_name(role) + ": expected input [batch, " +
                                std::to_string(input_width()) + "], got " +
                                shape_str(x.shape));
  }
  Tensor h = x;
  for (auto& layer : layers) h = layer->forward(h);
  return h;
}

Tensor Network::backward(const Tensor& upstream) {
  Tensor g = upstream;
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) g = (*it)->backward(g);
  return g;
}

std::vector<Tensor*> Network::params() {
  std::vector<Tensor*> out;
  for (auto& layer : layers) {
    for (Tensor* p : layer->params()) out.push_back(p);
  }
  return out;
}

std::vector<Tensor*> Network::grads() {
  std::vector<Tensor*> out;
  for (auto& layer : layers) {
    for (Tensor* g : layer->grads()) out.push_back(g);
  }
  return out;
}

void Network::zero_grads() {
  for (auto& layer : layers) layer->zero_grads();
}

namespace {

void append_conv_stack(Network& net, const ActivationKind& final_activation,
                       RngStream& rng) {
  net.layers.push_back(std::make_unique<ReshapeLayer>(ReshapeLayer::Mode::expand_depth));
  const ConvSpec stack[] = {
      {4, 1, 2, 1}, {2, 2, 4, 2}, {1, 4, 4, 1}, {1, 4, 1, 1}};
  for (std::size_t i = 0; i < 4; ++i) {
    net.layers.push_back(std::make_unique<Conv1dLayer>(stack[i], rng));
    const ActivationKind act = (i == 3) ? final_activation : ActivationKind::sigmoid();
    net.layers.push_back(std::make_unique<ActivationLayer>(act));
  }
  net.layers.push_back(
      std::make_unique<ReshapeLayer>(ReshapeLayer::Mode::squeeze_depth));
}

}  // namespace

Network build_network(Role role, std::size_t block_len,
                      const ActivationKind& output_activation, RngStream& rng) {
  if (block_len < 2 || block_len % 2 != 0) {
    throw std::invalid_argument("build_network: block length must be even and >= 2");
  }
  Network net;
  net.role = role;
  net.block_len = block_len;
  const std::size_t n = block_len;

  switch (role) {
    case Role::alice:
      net.output_activation = output_activation;
      net.layers.push_back(std::make_unique<FcLayer>(2 * n, 2 * n, rng));
      append_conv_stack(net, output_activation, rng);
      break;
    case Role::bob:
      net.output_activation = ActivationKind::sigmoid();
      net.layers.push_back(std::make_unique<FcLayer>(2 * n, 2 * n, rng));
      net.layers.push_back(std::make_unique<ActivationLayer>(ActivationKind::relu()));
      append_conv_stack(net, ActivationKind::sigmoid(), rng);
      break;
    case Role::eve:
      net.output_activation = ActivationKind::sigmoid();
      net.layers.push_back(std::make_unique<FcLayer>(n, 2 * n, rng));
      net.layers.push_back(std::make_unique<ActivationLayer>(ActivationKind::relu()));
      net.layers.push_back(std::make_unique<FcLayer>(2 * n, 2 * n, rng));
      net.layers.push_back(std::make_unique<ActivationLayer>(ActivationKind::relu()));
      append_conv_stack(net, ActivationKind::sigmoid(), rng);
      break;
  }
  return net;
}

}  // namespace advmod
