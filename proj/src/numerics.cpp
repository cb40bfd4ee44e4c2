#include "advmod/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace advmod {

Tensor xavier_init(std::size_t fan_in, std::size_t fan_out, RngStream& rng) {
  return xavier_init_shaped({fan_in, fan_out}, fan_in, fan_out, rng);
}

Tensor xavier_init_shaped(std::vector<std::size_t> dims, std::size_t fan_in,
                          std::size_t fan_out, RngStream& rng) {
  if (fan_in == 0 || fan_out == 0) {
    throw std::invalid_argument("xavier_init: fan counts must be positive");
  }
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t(std::move(dims));
  for (double& v : t.data) v = rng.uniform(-bound, bound);
  return t;
}

void adam_step(const std::vector<Tensor*>& params,
               const std::vector<Tensor*>& grads, AdamState& state) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("adam_step: parameter/gradient count mismatch");
  }
  if (state.first_moment.empty()) {
    for (const Tensor* p : params) {
      state.first_moment.push_back(Tensor::zeros(p->shape));
      state.second_moment.push_back(Tensor::zeros(p->shape));
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw std::invalid_argument("adam_step: state tracks a different parameter set");
  }

  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = *grads[i];
    Tensor& m = state.first_moment[i];
    Tensor& v = state.second_moment[i];
    if (!p.same_shape(g) || !p.same_shape(m)) {
      throw std::invalid_argument("adam_step: shape mismatch at parameter " +
                                  std::to_string(i));
    }
    for (std::size_t k = 0; k < p.size(); ++k) {
      m.data[k] = state.beta1 * m.data[k] + (1.0 - state.beta1) * g.data[k];
      v.data[k] = state.beta2 * v.data[k] + (1.0 - state.beta2) * g.data[k] * g.data[k];
      const double m_hat = m.data[k] / bc1;
      const double v_hat = v.data[k] / bc2;
      p.data[k] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f,
                        const Tensor& x, double h) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("finite_diff_grad: step size must be positive");
  }
  Tensor probe = x;
  Tensor grad = Tensor::zeros(x.shape);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = probe.data[i];
    probe.data[i] = saved + h;
    const double up = f(probe);
    probe.data[i] = saved - h;
    const double down = f(probe);
    probe.data[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw std::runtime_error("finite_diff_grad: non-finite value at coordinate " +
                               std::to_string(i));
    }
    grad.data[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace advmod
