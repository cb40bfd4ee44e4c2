#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "advmod/channel.hpp"
#include "advmod/network.hpp"
#include "advmod/numerics.hpp"
#include "advmod/rng.hpp"
#include "advmod/tensor.hpp"

namespace advmod {

/// How Alice and Bob score against Eve. `subtractive` minimizes
/// L_B - L_E; `uncertainty` minimizes L_B + (0.5 - L_E/sqrt(N))^2,
/// driving Eve toward coin-flip confidence instead of mere failure.
enum class LossVariant { subtractive, uncertainty };

LossVariant loss_variant_from_name(const std::string& name);
std::string loss_variant_name(LossVariant variant);

/// Field defaults are the full-scale operating point (N=96, 20000 symbols,
/// batch 8000, lr 0.001, L=13, ratio 0.005, 25 dB); bundled desk-scale
/// configs override them for fast runs.
struct TrainingConfig {
  std::size_t block_len = 96;  // N, must be even
  std::size_t train_symbols = 20000;
  std::size_t test_symbols = 1000;
  std::size_t batch_size = 8000;
  double learning_rate = 0.001;
  std::size_t epochs = 4000;

  std::string channel = "clear";  // clear | awgn | rayleigh
  double train_snr_db = 25.0;
  FadingGranularity fading_granularity = FadingGranularity::per_sample;
  double rayleigh_scale = 0.79788456080286541;  // sqrt(2/pi): E[|h|] = 1

  /// Alice's final activation: "auto" picks tanh on the clear channel and
  /// tanh_discrete elsewhere; "tanh" / "tanh_discrete" force the choice.
  std::string output_activation = "auto";
  int levels = 13;  // tanh_discrete grid size L

  double key_to_data_ratio = 0.005;
  LossVariant loss_variant = LossVariant::uncertainty;

  std::uint64_t data_seed = 1;
  std::uint64_t key_seed = 2;
  std::uint64_t init_seed = 3;

  /// Eve's turn normally draws its own batch; set to reuse phase 1's.
  bool reuse_phase1_batch = false;
  /// Walk the train_symbols set in order instead of resampling per epoch.
  bool cycle_dataset = false;

  std::size_t key_pool_size() const;  // round(ratio * train_symbols)
  ChannelKind channel_kind() const;   // at train_snr_db
  ActivationKind alice_activation() const;
  void validate() const;  // throws std::invalid_argument
};

TrainingConfig config_from_json(const std::string& text);
std::string config_to_json(const TrainingConfig& config);
TrainingConfig load_config(const std::filesystem::path& path);

/// One minibatch of plaintext and key bits, both [batch, N] in {0,1}.
struct Batch {
  Tensor plain;
  Tensor key;
};

/// `count` distinct uniform key rows, [count, N]. Errors when count is zero
/// or exceeds the 2^N distinct possibilities.
Tensor make_key_pool(std::size_t count, std::size_t n, RngStream& rng);

/// Fresh plaintext rows plus keys picked uniformly from the pool.
Batch gen_batch(std::size_t batch_size, std::size_t n, const Tensor& key_pool,
                RngStream& data_rng, RngStream& key_rng);

/// Euclidean distance between two equal-length rank-1 tensors.
double distance(const Tensor& a, const Tensor& b);

/// Mean per-row distance over [batch, N] predictions (rank-1 treated as a
/// single row). loss_bob / loss_eve are this metric on the party's output.
double mean_row_distance(const Tensor& target, const Tensor& predicted);
double loss_bob(const Tensor& plain, const Tensor& bob_out);
double loss_eve(const Tensor& plain, const Tensor& eve_out);

/// Gradient of mean_row_distance wrt `predicted`; zero rows where the
/// distance is zero.
Tensor distance_grad(const Tensor& target, const Tensor& predicted);

double joint_loss(double l_b, double l_e, LossVariant variant, std::size_t n);
/// d(joint)/dL_E for the chain rule; d(joint)/dL_B is always 1.
double joint_loss_dle(double l_e, LossVariant variant, std::size_t n);

/// Everything one forward pass produces, kept for backward.
struct PipelineOutputs {
  Tensor cipher;        // Alice's output C, [batch, N]
  ComplexVec modulated;  // X
  double signal_power = 0.0;
  ChannelRealization realization;
  Tensor received;  // C', [batch, N]
  Tensor bob_out;   // [batch, N]
  Tensor eve_out;   // [batch, N]
};

/// Alice -> modulate -> channel (drawn here against the measured batch
/// power) -> demodulate -> Bob and Eve.
PipelineOutputs run_pipeline(Network& alice, Network& bob, Network& eve,
                             const Batch& batch, const ChannelKind& kind,
                             FadingGranularity granularity,
                             RngStream& channel_rng);

/// Same pass against an already-drawn realization (finite-difference tests).
PipelineOutputs run_pipeline(Network& alice, Network& bob, Network& eve,
                             const Batch& batch, const ChannelRealization& r);

/// Seeds Bob's and Eve's outputs with d_loss_bob / d_loss_eve times the
/// distance gradient and backpropagates to Alice through the frozen
/// realization. Gradients accumulate in all three networks; zero what you
/// are not updating.
void backward_pipeline(Network& alice, Network& bob, Network& eve,
                       const Batch& batch, const PipelineOutputs& out,
                       double d_loss_bob, double d_loss_eve);

struct LossReport {
  std::size_t epoch = 0;
  double loss_bob = 0.0;
  double loss_eve = 0.0;
  double loss_eve_norm = 0.0;  // L_E / sqrt(N)
  double joint = 0.0;
};

struct NonFiniteLossError : std::runtime_error {
  std::size_t epoch;
  int phase;
  NonFiniteLossError(std::size_t epoch, int phase);
};

/**
 * Owns the three networks, the optimizers, and every RNG stream. One epoch:
 *
 *   phase 1: fresh batch and realization; Alice+Bob step on the joint loss
 *            with gradient flowing through frozen Eve;
 *   phase 2: fresh batch and realization; Eve alone steps on loss_eve.
 *
 * Streams are forked per purpose so adding draws to one never shifts
 * another: plaintext from data_seed, channel from fork 2 of data_seed, key
 * pool from key_seed, key picks from fork 1 of key_seed, per-role init from
 * forks 0/1/2 of init_seed.
 */
class Trainer {
 public:
  explicit Trainer(const TrainingConfig& config);

  LossReport run_epoch(std::size_t epoch_index);

  Network& alice() { return alice_; }
  Network& bob() { return bob_; }
  Network& eve() { return eve_; }
  const Tensor& key_pool() const { return key_pool_; }
  const TrainingConfig& config() const { return config_; }

 private:
  Batch next_batch();

  TrainingConfig config_;
  Network alice_, bob_, eve_;
  AdamState adam_alice_, adam_bob_, adam_eve_;
  Tensor key_pool_;
  RngStream data_rng_, key_rng_, channel_rng_;
  Tensor cycle_plain_;             // cycle_dataset only
  std::vector<std::size_t> cycle_keys_;
  std::size_t cycle_cursor_ = 0;
};

struct TrainResult {
  Network alice, bob, eve;
  Tensor key_pool;
  std::vector<LossReport> history;
};

/// Runs the full schedule. Throws NonFiniteLossError when a loss leaves the
/// finite range, tagged with the epoch and phase.
TrainResult train(const TrainingConfig& config);

}  // namespace advmod
