#pragma once

#include <memory>
#include <string>
#include <vector>

#include "advmod/rng.hpp"
#include "advmod/tensor.hpp"

namespace advmod {

/// conv(W, d_in, d_out, s): window, input depth, output depth, stride.
/// Padding is always "same": output length = ceil(input length / stride),
/// with the extra pad cell on the right when the total is odd.
struct ConvSpec {
  std::size_t window = 1;
  std::size_t d_in = 1;
  std::size_t d_out = 1;
  std::size_t stride = 1;
};

struct ActivationKind {
  enum class Fn { sigmoid, tanh, relu, tanh_discrete };
  Fn fn = Fn::sigmoid;
  int levels = 0;  // tanh_discrete only, >= 2

  static ActivationKind sigmoid() { return {Fn::sigmoid, 0}; }
  static ActivationKind tanh() { return {Fn::tanh, 0}; }
  static ActivationKind relu() { return {Fn::relu, 0}; }
  static ActivationKind tanh_discrete(int levels);

  std::string name() const;
  bool operator==(const ActivationKind&) const = default;
};

// ---------------------------------------------------------------------------
// Stateless kernels. The Layer classes below add caching for backward.
// ---------------------------------------------------------------------------

/// Affine map x W + b for x [batch, d_in], weights [d_in, d_out], bias [d_out].
Tensor fc_forward(const Tensor& x, const Tensor& weights, const Tensor& bias);

/// Same-padded strided cross-correlation over the length axis.
/// x [batch, len, d_in], kernel [W, d_in, d_out], bias [d_out]
/// -> [batch, ceil(len/stride), d_out].
Tensor conv1d_forward(const Tensor& x, const ConvSpec& spec, const Tensor& kernel,
                      const Tensor& bias);

Tensor activation_forward(const Tensor& x, const ActivationKind& kind);

/// upstream times the elementwise derivative at the original input x.
/// tanh_discrete uses the surrogate 1 - tanh(x)^2 of the continuous tanh.
Tensor activation_backward(const Tensor& upstream, const Tensor& x,
                           const ActivationKind& kind);

/// Quantized tanh: y = tanh(x) snapped to the grid {-1 + k*step},
/// step = 2/(levels-1), then clamped to [-1, 1].
Tensor tanh_discrete_forward(const Tensor& x, int levels);
double tanh_discrete_scalar(double x, int levels);

/// Surrogate gradient: upstream * (1 - tanh(x)^2), quantization ignored.
Tensor tanh_discrete_backward(const Tensor& upstream, const Tensor& x);

std::size_t conv_output_length(std::size_t len, std::size_t stride);

// ---------------------------------------------------------------------------
// Layer stack. forward() caches what backward() needs; backward() reports
// parameter gradients into separate accumulators and never touches the
// parameters themselves. backward() before forward() is a hard error.
// ---------------------------------------------------------------------------

class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& x) = 0;
  virtual Tensor backward(const Tensor& upstream) = 0;
  virtual std::string kind() const = 0;
  virtual std::vector<Tensor*> params() { return {}; }
  virtual std::vector<Tensor*> grads() { return {}; }
  void zero_grads();

 protected:
  void require_cache(bool have, const char* who) const;
};

class FcLayer : public Layer {
 public:
  FcLayer(std::size_t d_in, std::size_t d_out, RngStream& rng);
  FcLayer(Tensor weights, Tensor bias);  // checkpoint restore

  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& upstream) override;
  std::string kind() const override { return "fc"; }
  std::vector<Tensor*> params() override { return {&weights_, &bias_}; }
  std::vector<Tensor*> grads() override { return {&grad_weights_, &grad_bias_}; }

  const Tensor& weights() const { return weights_; }
  const Tensor& bias() const { return bias_; }

 private:
  Tensor weights_, bias_;
  Tensor grad_weights_, grad_bias_;
  Tensor cached_input_;
  bool has_cache_ = false;
};

class Conv1dLayer : public Layer {
 public:
  Conv1dLayer(const ConvSpec& spec, RngStream& rng);
  Conv1dLayer(const ConvSpec& spec, Tensor kernel, Tensor bias);

  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& upstream) override;
  std::string kind() const override { return "conv1d"; }
  std::vector<Tensor*> params() override { return {&kernel_, &bias_}; }
  std::vector<Tensor*> grads() override { return {&grad_kernel_, &grad_bias_}; }

  const ConvSpec& spec() const { return spec_; }
  const Tensor& kernel() const { return kernel_; }
  const Tensor& bias() const { return bias_; }

 private:
  ConvSpec spec_;
  Tensor kernel_, bias_;
  Tensor grad_kernel_, grad_bias_;
  Tensor cached_input_;
  bool has_cache_ = false;
};

class ActivationLayer : public Layer {
 public:
  explicit ActivationLayer(const ActivationKind& kind) : kind_(kind) {}

  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& upstream) override;
  std::string kind() const override { return kind_.name(); }

  const ActivationKind& activation() const { return kind_; }

 private:
  ActivationKind kind_;
  Tensor cached_input_;
  bool has_cache_ = false;
};

/// Metadata-only bridge between the FC stage ([batch, width]) and the conv
/// stack ([batch, width, 1]).
class ReshapeLayer : public Layer {
 public:
  enum class Mode { expand_depth, squeeze_depth };

  explicit ReshapeLayer(Mode mode) : mode_(mode) {}

  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& upstream) override;
  std::string kind() const override { return "reshape"; }

  Mode mode() const { return mode_; }

 private:
  Mode mode_;
  std::vector<std::size_t> cached_shape_;
  bool has_cache_ = false;
};

}  // namespace advmod
