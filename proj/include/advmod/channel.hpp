#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "advmod/rng.hpp"
#include "advmod/tensor.hpp"

namespace advmod {

/// A batch of complex sample blocks stored as paired real/imag arrays,
/// row-major. One block holds M = ceil(N/2) symbols.
struct ComplexVec {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> re, im;

  ComplexVec() = default;
  ComplexVec(std::size_t rows, std::size_t cols);

  std::size_t size() const { return rows * cols; }
  double& real_at(std::size_t r, std::size_t c) { return re[r * cols + c]; }
  double& imag_at(std::size_t r, std::size_t c) { return im[r * cols + c]; }
  double real_at(std::size_t r, std::size_t c) const { return re[r * cols + c]; }
  double imag_at(std::size_t r, std::size_t c) const { return im[r * cols + c]; }
  bool same_shape(const ComplexVec& other) const {
    return rows == other.rows && cols == other.cols;
  }
};

struct ChannelKind {
  enum class Kind { clear, awgn, rayleigh };
  Kind kind = Kind::clear;
  double snr_db = 0.0;
  /// Rayleigh gain scale; the default sqrt(2/pi) makes E[|h|] = 1.
  double rayleigh_scale = 0.79788456080286541;

  static ChannelKind clear() { return {Kind::clear, 0.0}; }
  static ChannelKind awgn(double snr_db) { return {Kind::awgn, snr_db}; }
  static ChannelKind rayleigh(double snr_db) { return {Kind::rayleigh, snr_db}; }

  ChannelKind with_snr(double db) const;
  bool is_noisy() const { return kind != Kind::clear; }
  std::string name() const;
};

ChannelKind channel_from_name(const std::string& name, double snr_db);

/// Whether fading gains are drawn per complex sample or held constant across
/// each block (row). Noise is always per sample.
enum class FadingGranularity { per_sample, per_block };

FadingGranularity fading_from_name(const std::string& name);
std::string fading_name(FadingGranularity granularity);

/// Frozen draws for one forward/backward pass: y = h*x + noise elementwise.
struct ChannelRealization {
  ComplexVec h;
  ComplexVec noise;
  double sigma_sq = 0.0;
};

/// Pairs consecutive reals into complex symbols: x_m = c[2m] + j*c[2m+1].
/// Accepts [N] (one block) or [batch, N]; odd N zero-pads the last imaginary.
ComplexVec modulate(const Tensor& c);

/// Inverse of modulate; returns [N] for a single block, [rows, N] otherwise.
/// For odd N the zero-pad slot is discarded.
Tensor demodulate(const ComplexVec& y, std::size_t n);

/// Mean |x|^2 over every sample in the batch. Errors on an empty batch.
double measure_signal_power(const ComplexVec& x);

/// Noise variance sigma^2 = signal_power / 10^(snr_db/10), total complex
/// variance (split evenly across the two real dimensions). Noisy kinds
/// reject signal_power <= 0.
ChannelRealization draw_channel(const ChannelKind& kind, std::size_t rows,
                                std::size_t cols, double signal_power,
                                FadingGranularity granularity, RngStream& rng);

/// Single-block, per-sample convenience form.
ChannelRealization draw_channel(const ChannelKind& kind, std::size_t symbols,
                                double signal_power, RngStream& rng);

ComplexVec apply_channel(const ComplexVec& x, const ChannelRealization& r);

/// Gradient wrt x of apply_channel under the frozen realization: the adjoint
/// of the per-symbol rotation-scaling h, i.e. conj(h) * upstream. Noise
/// contributes nothing.
ComplexVec channel_backward(const ComplexVec& upstream,
                            const ChannelRealization& r);

}  // namespace advmod
