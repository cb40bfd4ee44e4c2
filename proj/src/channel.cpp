#include "advmod/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace advmod {

ComplexVec::ComplexVec(std::size_t rows, std::size_t cols)
    : rows(rows), cols(cols), re(rows * cols, 0.0), im(rows * cols, 0.0) {}

ChannelKind ChannelKind::with_snr(double db) const {
  ChannelKind out = *this;
  out.snr_db = db;
  return out;
}

std::string ChannelKind::name() const {
  switch (kind) {
    case Kind::clear: return "clear";
    case Kind::awgn: return "awgn";
    case Kind::rayleigh: return "rayleigh";
  }
  return "?";
}

ChannelKind channel_from_name(const std::string& name, double snr_db) {
  if (name == "clear") return ChannelKind::clear();
  if (name == "awgn") return ChannelKind::awgn(snr_db);
  if (name == "rayleigh") return ChannelKind::rayleigh(snr_db);
  throw std::invalid_argument("unknown channel kind: " + name);
}

FadingGranularity fading_from_name(const std::string& name) {
  if (name == "per_sample") return FadingGranularity::per_sample;
  if (name == "per_block") return FadingGranularity::per_block;
  throw std::invalid_argument("unknown fading granularity: " + name);
}

std::string fading_name(FadingGranularity granularity) {
  return granularity == FadingGranularity::per_sample ? "per_sample"
                                                      : "per_block";
}

ComplexVec modulate(const Tensor& c) {
  if (c.rank() != 1 && c.rank() != 2) {
    throw std::invalid_argument("modulate expects [N] or [batch, N], got " +
                                shape_str(c.shape));
  }
  const std::size_t rows = c.rank() == 2 ? c.dim(0) : 1;
  const std::size_t n = c.rank() == 2 ? c.dim(1) : c.dim(0);
  const std::size_t m = (n + 1) / 2;
  ComplexVec x(rows, m);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < m; ++k) {
      x.real_at(r, k) = c.data[r * n + 2 * k];
      x.imag_at(r, k) = 2 * k + 1 < n ? c.data[r * n + 2 * k + 1] : 0.0;
    }
  }
  return x;
}

Tensor demodulate(const ComplexVec& y, std::size_t n) {
  if (y.cols != (n + 1) / 2) {
    throw std::invalid_argument("demodulate: " + std::to_string(y.cols) +
                                " symbols cannot carry N=" + std::to_string(n));
  }
  Tensor c = y.rows == 1 ? Tensor({n}) : Tensor({y.rows, n});
  for (std::size_t r = 0; r < y.rows; ++r) {
    for (std::size_t k = 0; k < y.cols; ++k) {
      c.data[r * n + 2 * k] = y.real_at(r, k);
      if (2 * k + 1 < n) c.data[r * n + 2 * k + 1] = y.imag_at(r, k);
    }
  }
  return c;
}

double measure_signal_power(const ComplexVec& x) {
  if (x.size() == 0) throw std::invalid_argument("measure_signal_power: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += x.re[i] * x.re[i] + x.im[i] * x.im[i];
  }
  return total / static_cast<double>(x.size());
}

ChannelRealization draw_channel(const ChannelKind& kind, std::size_t rows,
                                std::size_t cols, double signal_power,
                                FadingGranularity granularity, RngStream& rng) {
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument("draw_channel: empty batch");
  }
  if (kind.is_noisy() && !(signal_power > 0.0)) {
    throw std::invalid_argument("draw_channel: signal power must be positive for " +
                                kind.name());
  }

  ChannelRealization r;
  r.h = ComplexVec(rows, cols);
  r.noise = ComplexVec(rows, cols);
  std::fill(r.h.re.begin(), r.h.re.end(), 1.0);

  if (kind.kind == ChannelKind::Kind::clear) return r;

  r.sigma_sq = signal_power / std::pow(10.0, kind.snr_db / 10.0);
  const double noise_dim = std::sqrt(r.sigma_sq / 2.0);

  if (kind.kind == ChannelKind::Kind::rayleigh) {
    for (std::size_t row = 0; row < rows; ++row) {
      for (std::size_t col = 0; col < cols; ++col) {
        if (granularity == FadingGranularity::per_block && col > 0) {
          r.h.real_at(row, col) = r.h.real_at(row, 0);
          r.h.imag_at(row, col) = r.h.imag_at(row, 0);
          continue;
        }
        const auto [z1, z2] = rng.normal_pair();
        r.h.real_at(row, col) = kind.rayleigh_scale * z1;
        r.h.imag_at(row, col) = kind.rayleigh_scale * z2;
      }
    }
  }
  for (std::size_t i = 0; i < r.noise.size(); ++i) {
    const auto [g1, g2] = rng.normal_pair();
    r.noise.re[i] = noise_dim * g1;
    r.noise.im[i] = noise_dim * g2;
  }
  return r;
}

ChannelRealization draw_channel(const ChannelKind& kind, std::size_t symbols,
                                double signal_power, RngStream& rng) {
  return draw_channel(kind, 1, symbols, signal_power,
                      FadingGranularity::per_sample, rng);
}

ComplexVec apply_channel(const ComplexVec& x, const ChannelRealization& r) {
  if (!x.same_shape(r.h)) {
    throw std::invalid_argument("apply_channel: shape mismatch");
  }
  ComplexVec y(x.rows, x.cols);
  for (std::size_t i = 0; i < x.size(); ++i) {
    y.re[i] = r.h.re[i] * x.re[i] - r.h.im[i] * x.im[i] + r.noise.re[i];
    y.im[i] = r.h.im[i] * x.re[i] + r.h.re[i] * x.im[i] + r.noise.im[i];
  }
  return y;
}

ComplexVec channel_backward(const ComplexVec& upstream,
                            const ChannelRealization& r) {
  if (!upstream.same_shape(r.h)) {
    throw std::invalid_argument("channel_backward: shape mismatch");
  }
  ComplexVec g(upstream.rows, upstream.cols);
  for (std::size_t i = 0; i < upstream.size(); ++i) {
    g.re[i] = r.h.re[i] * upstream.re[i] + r.h.im[i] * upstream.im[i];
    g.im[i] = r.h.re[i] * upstream.im[i] - r.h.im[i] * upstream.re[i];
  }
  return g;
}

}  // namespace advmod
