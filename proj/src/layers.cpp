#include "advmod/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "advmod/numerics.hpp"

namespace advmod {

ActivationKind ActivationKind::tanh_discrete(int levels) {
  if (levels < 2) {
    throw std::invalid_argument("tanh_discrete: needs at least 2 levels");
  }
  return {Fn::tanh_discrete, levels};
}

std::string ActivationKind::name() const {
  switch (fn) {
    case Fn::sigmoid: return "sigmoid";
    case Fn::tanh: return "tanh";
    case Fn::relu: return "relu";
    case Fn::tanh_discrete: return "tanh_discrete";
  }
  return "?";
}

Tensor fc_forward(const Tensor& x, const Tensor& weights, const Tensor& bias) {
  if (x.rank() != 2 || weights.rank() != 2 || x.shape[1] != weights.shape[0] ||
      bias.size() != weights.shape[1]) {
    throw std::invalid_argument("fc_forward: shape mismatch " + shape_str(x.shape) +
                                " x " + shape_str(weights.shape));
  }
  Tensor out = matmul(x, weights);
  const std::size_t rows = out.shape[0], cols = out.shape[1];
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out.at(r, c) += bias.data[c];
  }
  return out;
}

std::size_t conv_output_length(std::size_t len, std::size_t stride) {
  return (len + stride - 1) / stride;
}

namespace {

// Left pad for "same" padding; the remainder lands on the right.
std::size_t same_pad_left(std::size_t len, const ConvSpec& spec) {
  const std::size_t out_len = conv_output_length(len, spec.stride);
  const std::size_t span = (out_len - 1) * spec.stride + spec.window;
  const std::size_t total = span > len ? span - len : 0;
  return total / 2;
}

void check_conv_shapes(const Tensor& x, const ConvSpec& spec, const Tensor& kernel,
                       const Tensor& bias) {
  if (x.rank() != 3 || x.shape[1] == 0 || x.shape[2] != spec.d_in) {
    throw std::invalid_argument("conv1d: input " + shape_str(x.shape) +
                                " does not match depth " + std::to_string(spec.d_in));
  }
  if (kernel.rank() != 3 || kernel.shape[0] != spec.window ||
      kernel.shape[1] != spec.d_in || kernel.shape[2] != spec.d_out ||
      bias.size() != spec.d_out) {
    throw std::invalid_argument("conv1d: kernel " + shape_str(kernel.shape) +
                                " does not match spec");
  }
}

}  // namespace

Tensor conv1d_forward(const Tensor& x, const ConvSpec& spec, const Tensor& kernel,
                      const Tensor& bias) {
  check_conv_shapes(x, spec, kernel, bias);
  const std::size_t batch = x.shape[0], len = x.shape[1];
  const std::size_t out_len = conv_output_length(len, spec.stride);
  const std::size_t pad_left = same_pad_left(len, spec);
  Tensor out({batch, out_len, spec.d_out});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < out_len; ++o) {
      for (std::size_t f = 0; f < spec.d_out; ++f) {
        double acc = bias.data[f];
        for (std::size_t k = 0; k < spec.window; ++k) {
          const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(o * spec.stride + k) -
                                   static_cast<std::ptrdiff_t>(pad_left);
          if (i < 0 || i >= static_cast<std::ptrdiff_t>(len)) continue;
          for (std::size_t c = 0; c < spec.d_in; ++c) {
            acc += x.at(b, static_cast<std::size_t>(i), c) * kernel.at(k, c, f);
          }
        }
        out.at(b, o, f) = acc;
      }
    }
  }
  return out;
}

Tensor activation_forward(const Tensor& x, const ActivationKind& kind) {
  switch (kind.fn) {
    case ActivationKind::Fn::sigmoid: {
      Tensor y(x.shape);
      for (std::size_t i = 0; i < x.size(); ++i)
        y.data[i] = 1.0 / (1.0 + std::exp(-x.data[i]));
      return y;
    }
    case ActivationKind::Fn::tanh: {
      Tensor y(x.shape);
      for (std::size_t i = 0; i < x.size(); ++i) y.data[i] = std::tanh(x.data[i]);
      return y;
    }
    case ActivationKind::Fn::relu: {
      Tensor y(x.shape);
      for (std::size_t i = 0; i < x.size(); ++i)
        y.data[i] = x.data[i] > 0.0 ? x.data[i] : 0.0;
      return y;
    }
    case ActivationKind::Fn::tanh_discrete:
      return tanh_discrete_forward(x, kind.levels);
  }
  throw std::logic_error("activation_forward: unknown kind");
}

Tensor activation_backward(const Tensor& upstream, const Tensor& x,
                           const ActivationKind& kind) {
  if (!upstream.same_shape(x)) {
    throw std::invalid_argument("activation_backward: upstream shape mismatch");
  }
  Tensor g(x.shape);
  switch (kind.fn) {
    case ActivationKind::Fn::sigmoid:
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double s = 1.0 / (1.0 + std::exp(-x.data[i]));
        g.data[i] = upstream.data[i] * s * (1.0 - s);
      }
      return g;
    case ActivationKind::Fn::tanh:
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = std::tanh(x.data[i]);
        g.data[i] = upstream.data[i] * (1.0 - t * t);
      }
      return g;
    case ActivationKind::Fn::relu:
      for (std::size_t i = 0; i < x.size(); ++i) {
        g.data[i] = x.data[i] > 0.0 ? upstream.data[i] : 0.0;
      }
      return g;
    case ActivationKind::Fn::tanh_discrete:
      return tanh_discrete_backward(upstream, x);
  }
  throw std::logic_error("activation_backward: unknown kind");
}

double tanh_discrete_scalar(double x, int levels) {
  const double y = std::tanh(x);
  const double y_min = -1.0;
  const double step = 2.0 / (levels - 1);
  const double q = std::floor((y - y_min) / step + 0.5) * step + y_min;
  return std::clamp(q, -1.0, 1.0);
}

Tensor tanh_discrete_forward(const Tensor& x, int levels) {
  if (levels < 2) {
    throw std::invalid_argument("tanh_discrete: needs at least 2 levels");
  }
  Tensor y(x.shape);
  for (std::size_t i = 0; i < x.size(); ++i)
    y.data[i] = tanh_discrete_scalar(x.data[i], levels);
  return y;
}

Tensor tanh_discrete_backward(const Tensor& upstream, const Tensor& x) {
  if (!upstream.same_shape(x)) {
    throw std::invalid_argument("tanh_discrete_backward: upstream shape mismatch");
  }
  Tensor g(x.shape);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = std::tanh(x.data[i]);
    g.data[i] = upstream.data[i] * (1.0 - t * t);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Layer classes
// ---------------------------------------------------------------------------

void Layer::zero_grads() {
  for (Tensor* g : grads()) {
    std::fill(g->data.begin(), g->data.end(), 0.0);
  }
}

void Layer::require_cache(bool have, const char* who) const {
  if (!have) {
    throw std::logic_error(std::string(who) + ": backward called without a forward");
  }
}

FcLayer::FcLayer(std::size_t d_in, std::size_t d_out, RngStream& rng)
    : weights_(xavier_init(d_in, d_out, rng)),
      bias_(Tensor::zeros({d_out})),
      grad_weights_(Tensor::zeros({d_in, d_out})),
      grad_bias_(Tensor::zeros({d_out})) {}

FcLayer::FcLayer(Tensor weights, Tensor bias)
    : weights_(std::move(weights)),
      bias_(std::move(bias)),
      grad_weights_(Tensor::zeros(weights_.shape)),
      grad_bias_(Tensor::zeros(bias_.shape)) {}

Tensor FcLayer::forward(const Tensor& x) {
  Tensor out = fc_forward(x, weights_, bias_);
  cached_input_ = x;
  has_cache_ = true;
  return out;
}

Tensor FcLayer::backward(const Tensor& upstream) {
  require_cache(has_cache_, "fc");
  const Tensor& x = cached_input_;
  const std::size_t batch = x.shape[0], d_in = x.shape[1], d_out = weights_.shape[1];
  if (upstream.rank() != 2 || upstream.shape[0] != batch || upstream.shape[1] != d_out) {
    throw std::invalid_argument("fc backward: upstream shape mismatch");
  }
  // dW = x^T upstream, db = column sums, dx = upstream W^T
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t i = 0; i < d_in; ++i) {
      const double xv = x.at(b, i);
      for (std::size_t j = 0; j < d_out; ++j) {
        grad_weights_.at(i, j) += xv * upstream.at(b, j);
      }
    }
    for (std::size_t j = 0; j < d_out; ++j) grad_bias_.data[j] += upstream.at(b, j);
  }
  Tensor dx({batch, d_in});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t j = 0; j < d_out; ++j) {
      const double up = upstream.at(b, j);
      for (std::size_t i = 0; i < d_in; ++i) {
        dx.at(b, i) += up * weights_.at(i, j);
      }
    }
  }
  return dx;
}

Conv1dLayer::Conv1dLayer(const ConvSpec& spec, RngStream& rng)
    : spec_(spec),
      kernel_(xavier_init_shaped({spec.window, spec.d_in, spec.d_out},
                                 spec.window * spec.d_in, spec.window * spec.d_out,
                                 rng)),
      bias_(Tensor::zeros({spec.d_out})),
      grad_kernel_(Tensor::zeros({spec.window, spec.d_in, spec.d_out})),
      grad_bias_(Tensor::zeros({spec.d_out})) {}

Conv1dLayer::Conv1dLayer(const ConvSpec& spec, Tensor kernel, Tensor bias)
    : spec_(spec),
      kernel_(std::move(kernel)),
      bias_(std::move(bias)),
      grad_kernel_(Tensor::zeros(kernel_.shape)),
      grad_bias_(Tensor::zeros(bias_.shape)) {}

Tensor Conv1dLayer::forward(const Tensor& x) {
  Tensor out = conv1d_forward(x, spec_, kernel_, bias_);
  cached_input_ = x;
  has_cache_ = true;
  return out;
}

Tensor Conv1dLayer::backward(const Tensor& upstream) {
  require_cache(has_cache_, "conv1d");
  const Tensor& x = cached_input_;
  const std::size_t batch = x.shape[0], len = x.shape[1];
  const std::size_t out_len = conv_output_length(len, spec_.stride);
  if (upstream.rank() != 3 || upstream.shape[0] != batch ||
      upstream.shape[1] != out_len || upstream.shape[2] != spec_.d_out) {
    throw std::invalid_argument("conv1d backward: upstream shape mismatch");
  }
  const std::size_t pad_left = same_pad_left(len, spec_);
  Tensor dx({batch, len, spec_.d_in});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < out_len; ++o) {
      for (std::size_t f = 0; f < spec_.d_out; ++f) {
        const double up = upstream.at(b, o, f);
        grad_bias_.data[f] += up;
        for (std::size_t k = 0; k < spec_.window; ++k) {
          const std::ptrdiff_t i =
              static_cast<std::ptrdiff_t>(o * spec_.stride + k) -
              static_cast<std::ptrdiff_t>(pad_left);
          if (i < 0 || i >= static_cast<std::ptrdiff_t>(len)) continue;
          const std::size_t idx = static_cast<std::size_t>(i);
          for (std::size_t c = 0; c < spec_.d_in; ++c) {
            grad_kernel_.at(k, c, f) += x.at(b, idx, c) * up;
            dx.at(b, idx, c) += kernel_.at(k, c, f) * up;
          }
        }
      }
    }
  }
  return dx;
}

Tensor ActivationLayer::forward(const Tensor& x) {
  Tensor out = activation_forward(x, kind_);
  cached_input_ = x;
  has_cache_ = true;
  return out;
}

Tensor ActivationLayer::backward(const Tensor& upstream) {
  require_cache(has_cache_, kind_.name().c_str());
  return activation_backward(upstream, cached_input_, kind_);
}

Tensor ReshapeLayer::forward(const Tensor& x) {
  cached_shape_ = x.shape;
  has_cache_ = true;
  if (mode_ == Mode::expand_depth) {
    if (x.rank() != 2) throw std::invalid_argument("reshape: expected [batch, width]");
    return x.reshaped({x.shape[0], x.shape[1], 1});
  }
  if (x.rank() != 3 || x.shape[2] != 1) {
    throw std::invalid_argument("reshape: expected [batch, width, 1]");
  }
  return x.reshaped({x.shape[0], x.shape[1]});
}

Tensor ReshapeLayer::backward(const Tensor& upstream) {
  require_cache(has_cache_, "reshape");
  return upstream.reshaped(cached_shape_);
}

}  // namespace advmod
