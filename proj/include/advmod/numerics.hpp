#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "advmod/rng.hpp"
#include "advmod/tensor.hpp"

namespace advmod {

/**
 * Xavier (Glorot) uniform initialization: a [fan_in, fan_out] weight matrix
 * with entries drawn from U(-b, b), b = sqrt(6 / (fan_in + fan_out)).
 */
Tensor xavier_init(std::size_t fan_in, std::size_t fan_out, RngStream& rng);

/// Same draw for an arbitrary-shaped parameter with explicit fan counts
/// (used by conv kernels, whose fans are window * depth).
Tensor xavier_init_shaped(std::vector<std::size_t> dims, std::size_t fan_in,
                          std::size_t fan_out, RngStream& rng);

/**
 * Adam optimizer state for one parameter set. Moments are allocated lazily
 * on the first step and stay shape-congruent with the parameters.
 */
struct AdamState {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  std::size_t step_count = 0;       // t, strictly +1 per step
  std::vector<Tensor> first_moment;  // m, one per parameter tensor
  std::vector<Tensor> second_moment; // v
};

/**
 * One Adam step with bias correction. `params` and `grads` are parallel
 * lists of shape-congruent tensors; mismatch is a hard error.
 */
void adam_step(const std::vector<Tensor*>& params,
               const std::vector<Tensor*>& grads, AdamState& state);

/**
 * Central-difference gradient of a scalar function: per coordinate
 * (f(x + h e_i) - f(x - h e_i)) / (2 h). Aborts with a diagnostic naming
 * the coordinate if f returns a non-finite value.
 */
Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f,
                        const Tensor& x, double h);

}  // namespace advmod
