#pragma once

#include <memory>
#include <string>
#include <vector>

#include "advmod/layers.hpp"
#include "advmod/rng.hpp"
#include "advmod/tensor.hpp"

namespace advmod {

enum class Role { alice, bob, eve };

std::string role_name(Role role);
Role role_from_name(const std::string& name);

/**
 * An ordered layer stack for one of the three parties.
 *
 * Widths: Alice and Bob take [batch, 2N] (data or received cipher
 * concatenated with the key), Eve takes [batch, N]; all emit [batch, N].
 * Mutable during training and owned by a single updater; forward of a
 * frozen network is pure.
 */
struct Network {
  Role role = Role::alice;
  std::size_t block_len = 0;  // N
  ActivationKind output_activation = ActivationKind::sigmoid();
  std::vector<std::unique_ptr<Layer>> layers;

  Tensor forward(const Tensor& x);
  /// Propagates upstream [batch, N] back through the stack, accumulating
  /// parameter gradients; returns the gradient wrt the network input.
  Tensor backward(const Tensor& upstream);

  std::vector<Tensor*> params();
  std::vector<Tensor*> grads();
  void zero_grads();

  std::size_t input_width() const {
    return role == Role::eve ? block_len : 2 * block_len;
  }
};

/**
 * Builds the mix-and-transform stack for a role.
 *
 * Alice: FC(2N,2N) linear, then conv(4,1,2,1)/sigmoid, conv(2,2,4,2)/sigmoid,
 * conv(1,4,4,1)/sigmoid, conv(1,4,1,1) with `output_activation` (tanh for a
 * clear channel, tanh_discrete(L) for noisy ones). Bob: FC(2N,2N)/relu then
 * the same conv stack ending in sigmoid. Eve: FC(N,2N)/relu, FC(2N,2N)/relu,
 * then the conv stack ending in sigmoid. Weights are Xavier-initialized,
 * biases zero. `output_activation` only applies to Alice.
 */
Network build_network(Role role, std::size_t block_len,
                      const ActivationKind& output_activation, RngStream& rng);

}  // namespace advmod
