#include "advmod/trainer.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

namespace advmod {

namespace {

using nlohmann::json;

TrainingConfig validated(TrainingConfig config) {
  config.validate();
  return config;
}

bool losses_finite(double a, double b, double c) {
  return std::isfinite(a) && std::isfinite(b) && std::isfinite(c);
}

}  // namespace

LossVariant loss_variant_from_name(const std::string& name) {
  if (name == "subtractive") return LossVariant::subtractive;
  if (name == "uncertainty") return LossVariant::uncertainty;
  throw std::invalid_argument("unknown loss variant: " + name);
}

std::string loss_variant_name(LossVariant variant) {
  return variant == LossVariant::subtractive ? "subtractive" : "uncertainty";
}

std::size_t TrainingConfig::key_pool_size() const {
  return static_cast<std::size_t>(
      std::llround(key_to_data_ratio * static_cast<double>(train_symbols)));
}

ChannelKind TrainingConfig::channel_kind() const {
  ChannelKind kind = channel_from_name(channel, train_snr_db);
  kind.rayleigh_scale = rayleigh_scale;
  return kind;
}

ActivationKind TrainingConfig::alice_activation() const {
  if (output_activation == "tanh") return ActivationKind::tanh();
  if (output_activation == "tanh_discrete")
    return ActivationKind::tanh_discrete(levels);
  if (output_activation == "auto") {
    return channel == "clear" ? ActivationKind::tanh()
                              : ActivationKind::tanh_discrete(levels);
  }
  throw std::invalid_argument("unknown output_activation: " + output_activation);
}

void TrainingConfig::validate() const {
  if (block_len < 2 || block_len % 2 != 0) {
    throw std::invalid_argument("block_len must be even and at least 2");
  }
  if (train_symbols == 0) throw std::invalid_argument("train_symbols must be positive");
  if (test_symbols == 0) throw std::invalid_argument("test_symbols must be positive");
  if (batch_size == 0 || batch_size > train_symbols) {
    throw std::invalid_argument("batch_size must be in [1, train_symbols]");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  if (!(key_to_data_ratio > 0.0) || key_to_data_ratio > 1.0) {
    throw std::invalid_argument("key_to_data_ratio must be in (0, 1]");
  }
  if (key_pool_size() == 0) {
    throw std::invalid_argument("key_to_data_ratio * train_symbols rounds to zero keys");
  }
  if (!std::isfinite(train_snr_db)) {
    throw std::invalid_argument("train_snr_db must be finite");
  }
  if (!(rayleigh_scale > 0.0)) {
    throw std::invalid_argument("rayleigh_scale must be positive");
  }
  channel_from_name(channel, train_snr_db);
  const ActivationKind out = alice_activation();  // validates the name
  if (out.fn == ActivationKind::Fn::tanh_discrete && levels < 2) {
    throw std::invalid_argument("levels must be at least 2");
  }
}

TrainingConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }

  static const std::set<std::string> known = {
      "block_len",       "train_symbols",    "test_symbols",
      "batch_size",      "learning_rate",    "epochs",
      "channel",         "train_snr_db",     "fading_granularity",
      "rayleigh_scale",  "output_activation", "levels",
      "key_to_data_ratio", "loss_variant",   "data_seed",
      "key_seed",        "init_seed",        "reuse_phase1_batch",
      "cycle_dataset"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw std::invalid_argument("unknown config key: " + key);
  }

  TrainingConfig c;
  try {
    if (j.contains("block_len")) c.block_len = j["block_len"].get<std::size_t>();
    if (j.contains("train_symbols")) c.train_symbols = j["train_symbols"].get<std::size_t>();
    if (j.contains("test_symbols")) c.test_symbols = j["test_symbols"].get<std::size_t>();
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<std::size_t>();
    if (j.contains("learning_rate")) c.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("epochs")) c.epochs = j["epochs"].get<std::size_t>();
    if (j.contains("channel")) c.channel = j["channel"].get<std::string>();
    if (j.contains("train_snr_db")) c.train_snr_db = j["train_snr_db"].get<double>();
    if (j.contains("fading_granularity")) {
      c.fading_granularity = fading_from_name(j["fading_granularity"].get<std::string>());
    }
    if (j.contains("rayleigh_scale")) c.rayleigh_scale = j["rayleigh_scale"].get<double>();
    if (j.contains("output_activation")) c.output_activation = j["output_activation"].get<std::string>();
    if (j.contains("levels")) c.levels = j["levels"].get<int>();
    if (j.contains("key_to_data_ratio")) c.key_to_data_ratio = j["key_to_data_ratio"].get<double>();
    if (j.contains("loss_variant")) {
      c.loss_variant = loss_variant_from_name(j["loss_variant"].get<std::string>());
    }
    if (j.contains("data_seed")) c.data_seed = j["data_seed"].get<std::uint64_t>();
    if (j.contains("key_seed")) c.key_seed = j["key_seed"].get<std::uint64_t>();
    if (j.contains("init_seed")) c.init_seed = j["init_seed"].get<std::uint64_t>();
    if (j.contains("reuse_phase1_batch")) c.reuse_phase1_batch = j["reuse_phase1_batch"].get<bool>();
    if (j.contains("cycle_dataset")) c.cycle_dataset = j["cycle_dataset"].get<bool>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config type error: ") + e.what());
  }
  c.validate();
  return c;
}

std::string config_to_json(const TrainingConfig& c) {
  json j;
  j["block_len"] = c.block_len;
  j["train_symbols"] = c.train_symbols;
  j["test_symbols"] = c.test_symbols;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["channel"] = c.channel;
  j["train_snr_db"] = c.train_snr_db;
  j["fading_granularity"] = fading_name(c.fading_granularity);
  j["rayleigh_scale"] = c.rayleigh_scale;
  j["output_activation"] = c.output_activation;
  j["levels"] = c.levels;
  j["key_to_data_ratio"] = c.key_to_data_ratio;
  j["loss_variant"] = loss_variant_name(c.loss_variant);
  j["data_seed"] = c.data_seed;
  j["key_seed"] = c.key_seed;
  j["init_seed"] = c.init_seed;
  j["reuse_phase1_batch"] = c.reuse_phase1_batch;
  j["cycle_dataset"] = c.cycle_dataset;
  return j.dump(2);
}

TrainingConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return config_from_json(text);
}

Tensor make_key_pool(std::size_t count, std::size_t n, RngStream& rng) {
  if (count == 0) throw std::invalid_argument("key pool must not be empty");
  if (n < 64 && count > (std::uint64_t{1} << n)) {
    throw std::invalid_argument("more keys requested than distinct bit patterns");
  }
  Tensor pool({count, n});
  std::set<std::vector<std::uint8_t>> seen;
  std::vector<std::uint8_t> row(n);
  for (std::size_t r = 0; r < count; ++r) {
    do {
      for (std::size_t j = 0; j < n; ++j) row[j] = static_cast<std::uint8_t>(rng.bit());
    } while (!seen.insert(row).second);
    for (std::size_t j = 0; j < n; ++j) pool.at(r, j) = static_cast<double>(row[j]);
  }
  return pool;
}

Batch gen_batch(std::size_t batch_size, std::size_t n, const Tensor& key_pool,
                RngStream& data_rng, RngStream& key_rng) {
  if (key_pool.rank() != 2 || key_pool.dim(0) == 0 || key_pool.dim(1) != n) {
    throw std::invalid_argument("gen_batch: bad key pool for N=" + std::to_string(n));
  }
  Batch batch{Tensor({batch_size, n}), Tensor({batch_size, n})};
  for (auto& v : batch.plain.data) v = static_cast<double>(data_rng.bit());
  const std::size_t pool_rows = key_pool.dim(0);
  for (std::size_t r = 0; r < batch_size; ++r) {
    const std::size_t pick = key_rng.below(pool_rows);
    for (std::size_t j = 0; j < n; ++j) batch.key.at(r, j) = key_pool.at(pick, j);
  }
  return batch;
}

double distance(const Tensor& a, const Tensor& b) {
  if (a.rank() != 1 || !a.same_shape(b)) {
    throw std::invalid_argument("distance expects two equal-length vectors");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

double mean_row_distance(const Tensor& target, const Tensor& predicted) {
  if (!target.same_shape(predicted)) {
    throw std::invalid_argument("mean_row_distance: shape mismatch " +
                                shape_str(target.shape) + " vs " +
                                shape_str(predicted.shape));
  }
  const std::size_t rows = target.rank() == 2 ? target.dim(0) : 1;
  const std::size_t n = target.rank() == 2 ? target.dim(1) : target.dim(0);
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double diff = target.data[r * n + j] - predicted.data[r * n + j];
      sum += diff * diff;
    }
    total += std::sqrt(sum);
  }
  return total / static_cast<double>(rows);
}

double loss_bob(const Tensor& plain, const Tensor& bob_out) {
  return mean_row_distance(plain, bob_out);
}

double loss_eve(const Tensor& plain, const Tensor& eve_out) {
  return mean_row_distance(plain, eve_out);
}

Tensor distance_grad(const Tensor& target, const Tensor& predicted) {
  if (!target.same_shape(predicted)) {
    throw std::invalid_argument("distance_grad: shape mismatch");
  }
  const std::size_t rows = target.rank() == 2 ? target.dim(0) : 1;
  const std::size_t n = target.rank() == 2 ? target.dim(1) : target.dim(0);
  Tensor grad(predicted.shape);
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double diff = predicted.data[r * n + j] - target.data[r * n + j];
      sum += diff * diff;
    }
    const double dist = std::sqrt(sum);
    if (dist == 0.0) continue;
    const double scale = 1.0 / (dist * static_cast<double>(rows));
    for (std::size_t j = 0; j < n; ++j) {
      grad.data[r * n + j] =
          (predicted.data[r * n + j] - target.data[r * n + j]) * scale;
    }
  }
  return grad;
}

double joint_loss(double l_b, double l_e, LossVariant variant, std::size_t n) {
  if (variant == LossVariant::subtractive) return l_b - l_e;
  const double gap = 0.5 - l_e / std::sqrt(static_cast<double>(n));
  return l_b + gap * gap;
}

double joint_loss_dle(double l_e, LossVariant variant, std::size_t n) {
  if (variant == LossVariant::subtractive) return -1.0;
  const double root_n = std::sqrt(static_cast<double>(n));
  return -2.0 * (0.5 - l_e / root_n) / root_n;
}

namespace {

PipelineOutputs pipeline_with(
    Network& alice, Network& bob, Network& eve, const Batch& batch,
    const std::function<ChannelRealization(std::size_t, std::size_t, double)>&
        realize) {
  const std::size_t rows = batch.plain.dim(0);
  const std::size_t n = batch.plain.dim(1);

  PipelineOutputs out;
  out.cipher = alice.forward(hcat(batch.plain, batch.key));
  out.modulated = modulate(out.cipher);
  out.signal_power = measure_signal_power(out.modulated);
  out.realization = realize(out.modulated.rows, out.modulated.cols, out.signal_power);
  const ComplexVec received_symbols = apply_channel(out.modulated, out.realization);
  out.received = demodulate(received_symbols, n).reshaped({rows, n});
  out.bob_out = bob.forward(hcat(out.received, batch.key));
  out.eve_out = eve.forward(out.received);
  return out;
}

}  // namespace

PipelineOutputs run_pipeline(Network& alice, Network& bob, Network& eve,
                             const Batch& batch, const ChannelKind& kind,
                             FadingGranularity granularity,
                             RngStream& channel_rng) {
  return pipeline_with(alice, bob, eve, batch,
                       [&](std::size_t rows, std::size_t cols, double power) {
                         return draw_channel(kind, rows, cols, power,
                                             granularity, channel_rng);
                       });
}

PipelineOutputs run_pipeline(Network& alice, Network& bob, Network& eve,
                             const Batch& batch, const ChannelRealization& r) {
  return pipeline_with(alice, bob, eve, batch,
                       [&](std::size_t rows, std::size_t cols, double) {
                         if (r.h.rows != rows || r.h.cols != cols) {
                           throw std::invalid_argument(
                               "run_pipeline: realization shape mismatch");
                         }
                         return r;
                       });
}

void backward_pipeline(Network& alice, Network& bob, Network& eve,
                       const Batch& batch, const PipelineOutputs& out,
                       double d_loss_bob, double d_loss_eve) {
  const std::size_t rows = batch.plain.dim(0);
  const std::size_t n = batch.plain.dim(1);

  Tensor g_bob = distance_grad(batch.plain, out.bob_out);
  scale_inplace(g_bob, d_loss_bob);
  Tensor d_received = col_slice(bob.backward(g_bob), 0, n);

  Tensor g_eve = distance_grad(batch.plain, out.eve_out);
  scale_inplace(g_eve, d_loss_eve);
  add_inplace(d_received, eve.backward(g_eve));

  const ComplexVec d_symbols = modulate(d_received);
  const ComplexVec d_sent = channel_backward(d_symbols, out.realization);
  alice.backward(demodulate(d_sent, n).reshaped({rows, n}));
}

NonFiniteLossError::NonFiniteLossError(std::size_t epoch, int phase)
    : std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) +
                         ", phase " + std::to_string(phase)),
      epoch(epoch),
      phase(phase) {}

Trainer::Trainer(const TrainingConfig& config)
    : config_(validated(config)),
      data_rng_(config_.data_seed),
      key_rng_(RngStream(config_.key_seed).fork(1)),
      channel_rng_(RngStream(config_.data_seed).fork(2)) {
  RngStream init_rng(config_.init_seed);
  RngStream rng_a = init_rng.fork(0);
  RngStream rng_b = init_rng.fork(1);
  RngStream rng_e = init_rng.fork(2);
  alice_ = build_network(Role::alice, config_.block_len,
                         config_.alice_activation(), rng_a);
  bob_ = build_network(Role::bob, config_.block_len, ActivationKind::sigmoid(),
                       rng_b);
  eve_ = build_network(Role::eve, config_.block_len, ActivationKind::sigmoid(),
                       rng_e);

  adam_alice_.learning_rate = config_.learning_rate;
  adam_bob_.learning_rate = config_.learning_rate;
  adam_eve_.learning_rate = config_.learning_rate;

  RngStream pool_rng(config_.key_seed);
  key_pool_ = make_key_pool(config_.key_pool_size(), config_.block_len, pool_rng);

  if (config_.cycle_dataset) {
    cycle_plain_ = Tensor({config_.train_symbols, config_.block_len});
    for (auto& v : cycle_plain_.data) v = static_cast<double>(data_rng_.bit());
    cycle_keys_.resize(config_.train_symbols);
    for (auto& k : cycle_keys_) k = key_rng_.below(key_pool_.dim(0));
  }
}

Batch Trainer::next_batch() {
  const std::size_t n = config_.block_len;
  if (!config_.cycle_dataset) {
    return gen_batch(config_.batch_size, n, key_pool_, data_rng_, key_rng_);
  }
  Batch batch{Tensor({config_.batch_size, n}), Tensor({config_.batch_size, n})};
  for (std::size_t r = 0; r < config_.batch_size; ++r) {
    const std::size_t row = (cycle_cursor_ + r) % config_.train_symbols;
    for (std::size_t j = 0; j < n; ++j) {
      batch.plain.at(r, j) = cycle_plain_.at(row, j);
      batch.key.at(r, j) = key_pool_.at(cycle_keys_[row], j);
    }
  }
  cycle_cursor_ = (cycle_cursor_ + config_.batch_size) % config_.train_symbols;
  return batch;
}

LossReport Trainer::run_epoch(std::size_t epoch_index) {
  const ChannelKind kind = config_.channel_kind();
  const std::size_t n = config_.block_len;

  // Phase 1: Alice and Bob step on the joint loss; Eve only carries gradient.
  const Batch batch1 = next_batch();
  const PipelineOutputs out1 = run_pipeline(alice_, bob_, eve_, batch1, kind,
                                            config_.fading_granularity,
                                            channel_rng_);
  LossReport report;
  report.epoch = epoch_index;
  report.loss_bob = loss_bob(batch1.plain, out1.bob_out);
  report.loss_eve = loss_eve(batch1.plain, out1.eve_out);
  report.loss_eve_norm = report.loss_eve / std::sqrt(static_cast<double>(n));
  report.joint = joint_loss(report.loss_bob, report.loss_eve,
                            config_.loss_variant, n);
  if (!losses_finite(report.loss_bob, report.loss_eve, report.joint)) {
    throw NonFiniteLossError(epoch_index, 1);
  }

  alice_.zero_grads();
  bob_.zero_grads();
  eve_.zero_grads();
  backward_pipeline(alice_, bob_, eve_, batch1, out1, 1.0,
                    joint_loss_dle(report.loss_eve, config_.loss_variant, n));
  adam_step(alice_.params(), alice_.grads(), adam_alice_);
  adam_step(bob_.params(), bob_.grads(), adam_bob_);

  // Phase 2: Eve alone steps on her own loss against the updated Alice.
  const Batch batch2 = config_.reuse_phase1_batch ? batch1 : next_batch();
  const PipelineOutputs out2 = run_pipeline(alice_, bob_, eve_, batch2, kind,
                                            config_.fading_granularity,
                                            channel_rng_);
  const double l_e2 = loss_eve(batch2.plain, out2.eve_out);
  if (!std::isfinite(l_e2)) throw NonFiniteLossError(epoch_index, 2);

  eve_.zero_grads();
  eve_.backward(distance_grad(batch2.plain, out2.eve_out));
  adam_step(eve_.params(), eve_.grads(), adam_eve_);

  return report;
}

TrainResult train(const TrainingConfig& config) {
  Trainer trainer(config);
  std::vector<LossReport> history;
  history.reserve(config.epochs);
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    history.push_back(trainer.run_epoch(epoch));
  }
  return TrainResult{std::move(trainer.alice()), std::move(trainer.bob()),
                     std::move(trainer.eve()), trainer.key_pool(),
                     std::move(history)};
}

}  // namespace advmod
