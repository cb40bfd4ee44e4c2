#include "advmod/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "advmod/layers.hpp"
#include "advmod/numerics.hpp"
#include "advmod/rng.hpp"
#include "advmod/tensor.hpp"

namespace advmod {

namespace {

constexpr double kFdStep = 1e-5;
constexpr double kRelFloor = 1e-4;

Tensor random_tensor(std::vector<std::size_t> dims, RngStream& rng, double lo,
                     double hi) {
  Tensor t(std::move(dims));
  for (auto& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

double weighted_sum(const Tensor& y, const Tensor& weights) {
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) total += y[i] * weights[i];
  return total;
}

void fold_in(GradCheckEntry& entry, const Tensor& analytic, const Tensor& fd,
             const std::string& tag) {
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double diff = std::abs(analytic[i] - fd[i]);
    const double scale =
        std::max({std::abs(analytic[i]), std::abs(fd[i]), kRelFloor});
    const double rel = diff / scale;
    if (rel > entry.worst_rel_err) {
      entry.worst_rel_err = rel;
      entry.worst_coordinate = tag + "[" + std::to_string(i) + "]";
    }
  }
}

GradCheckEntry check_fc(RngStream& rng) {
  GradCheckEntry entry{"fc", 0.0, ""};
  const std::size_t batch = 3, d_in = 6, d_out = 4;
  const Tensor x = random_tensor({batch, d_in}, rng, -1.0, 1.0);
  const Tensor w = random_tensor({d_in, d_out}, rng, -0.7, 0.7);
  const Tensor b = random_tensor({d_out}, rng, -0.5, 0.5);
  const Tensor up = random_tensor({batch, d_out}, rng, -1.0, 1.0);

  FcLayer layer{Tensor(w), Tensor(b)};
  layer.forward(x);
  const Tensor dx = layer.backward(up);

  fold_in(entry, *layer.grads()[0],
          finite_diff_grad(
              [&](const Tensor& wt) { return weighted_sum(fc_forward(x, wt, b), up); },
              w, kFdStep),
          "weights");
  fold_in(entry, *layer.grads()[1],
          finite_diff_grad(
              [&](const Tensor& bt) { return weighted_sum(fc_forward(x, w, bt), up); },
              b, kFdStep),
          "bias");
  fold_in(entry, dx,
          finite_diff_grad(
              [&](const Tensor& xt) { return weighted_sum(fc_forward(xt, w, b), up); },
              x, kFdStep),
          "input");
  return entry;
}

GradCheckEntry check_conv(const ConvSpec& spec, std::size_t len, RngStream& rng) {
  GradCheckEntry entry;
  entry.kind = "conv1d(" + std::to_string(spec.window) + "," +
               std::to_string(spec.d_in) + "," + std::to_string(spec.d_out) +
               "," + std::to_string(spec.stride) + ")";
  const std::size_t batch = 2;
  const std::size_t out_len = conv_output_length(len, spec.stride);
  const Tensor x = random_tensor({batch, len, spec.d_in}, rng, -1.0, 1.0);
  const Tensor k =
      random_tensor({spec.window, spec.d_in, spec.d_out}, rng, -0.7, 0.7);
  const Tensor b = random_tensor({spec.d_out}, rng, -0.5, 0.5);
  const Tensor up = random_tensor({batch, out_len, spec.d_out}, rng, -1.0, 1.0);

  Conv1dLayer layer(spec, Tensor(k), Tensor(b));
  layer.forward(x);
  const Tensor dx = layer.backward(up);

  fold_in(entry, *layer.grads()[0],
          finite_diff_grad(
              [&](const Tensor& kt) {
                return weighted_sum(conv1d_forward(x, spec, kt, b), up);
              },
              k, kFdStep),
          "kernel");
  fold_in(entry, *layer.grads()[1],
          finite_diff_grad(
              [&](const Tensor& bt) {
                return weighted_sum(conv1d_forward(x, spec, k, bt), up);
              },
              b, kFdStep),
          "bias");
  fold_in(entry, dx,
          finite_diff_grad(
              [&](const Tensor& xt) {
                return weighted_sum(conv1d_forward(xt, spec, k, b), up);
              },
              x, kFdStep),
          "input");
  return entry;
}

GradCheckEntry check_activation(const ActivationKind& kind, RngStream& rng) {
  GradCheckEntry entry{kind.name(), 0.0, ""};
  Tensor x = random_tensor({4, 5}, rng, -2.0, 2.0);
  if (kind.fn == ActivationKind::Fn::relu) {
    // Central differences straddle the kink at 0; keep clear of it.
    for (auto& v : x.data) {
      if (std::abs(v) < 0.05) v = v < 0.0 ? v - 0.1 : v + 0.1;
    }
  }
  const Tensor up = random_tensor(x.shape, rng, -1.0, 1.0);

  ActivationLayer layer(kind);
  layer.forward(x);
  const Tensor dx = layer.backward(up);

  // The quantizer's surrogate is the derivative of the continuous tanh, so
  // that is the function finite differences must probe.
  const ActivationKind fd_kind = kind.fn == ActivationKind::Fn::tanh_discrete
                                     ? ActivationKind::tanh()
                                     : kind;
  fold_in(entry, dx,
          finite_diff_grad(
              [&](const Tensor& xt) {
                return weighted_sum(activation_forward(xt, fd_kind), up);
              },
              x, kFdStep),
          "input");
  return entry;
}

}  // namespace

bool GradCheckReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [&](const auto& e) {
    return e.worst_rel_err < threshold;
  });
}

const GradCheckEntry* GradCheckReport::worst() const {
  const auto it = std::max_element(
      entries.begin(), entries.end(),
      [](const auto& a, const auto& b) { return a.worst_rel_err < b.worst_rel_err; });
  return it == entries.end() ? nullptr : &*it;
}

GradCheckReport run_gradcheck(std::uint64_t seed, bool corrupt_one) {
  RngStream rng(seed);
  GradCheckReport report;

  if (corrupt_one) {
    // Negative control: break the FC weight gradient and recheck.
    GradCheckEntry entry{"fc", 0.0, ""};
    const Tensor x = random_tensor({3, 6}, rng, -1.0, 1.0);
    const Tensor w = random_tensor({6, 4}, rng, -0.7, 0.7);
    const Tensor b = random_tensor({4}, rng, -0.5, 0.5);
    const Tensor up = random_tensor({3, 4}, rng, -1.0, 1.0);
    FcLayer layer{Tensor(w), Tensor(b)};
    layer.forward(x);
    layer.backward(up);
    Tensor broken = *layer.grads()[0];
    broken[0] += 0.01;
    fold_in(entry, broken,
            finite_diff_grad(
                [&](const Tensor& wt) {
                  return weighted_sum(fc_forward(x, wt, b), up);
                },
                w, kFdStep),
            "weights");
    report.entries.push_back(entry);
    return report;
  }

  report.entries.push_back(check_fc(rng));
  report.entries.push_back(check_conv({4, 1, 2, 1}, 8, rng));
  report.entries.push_back(check_conv({2, 2, 4, 2}, 8, rng));
  report.entries.push_back(check_conv({1, 4, 4, 1}, 4, rng));
  report.entries.push_back(check_conv({1, 4, 1, 1}, 4, rng));
  report.entries.push_back(check_activation(ActivationKind::sigmoid(), rng));
  report.entries.push_back(check_activation(ActivationKind::tanh(), rng));
  report.entries.push_back(check_activation(ActivationKind::relu(), rng));
  report.entries.push_back(
      check_activation(ActivationKind::tanh_discrete(13), rng));
  return report;
}

}  // namespace advmod
