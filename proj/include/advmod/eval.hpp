#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "advmod/channel.hpp"
#include "advmod/network.hpp"
#include "advmod/trainer.hpp"

namespace advmod {

/// Threshold real predictions to bits; value >= threshold maps to 1
/// (the tie at exactly threshold is pinned to 1).
Tensor harden(const Tensor& values, double threshold = 0.5);

/// Fraction of positions where two equal-shape bit tensors differ.
double ber(const Tensor& a, const Tensor& b);

/// The keyless baseline attacker: received cipher value >= 0 maps to bit 1.
Tensor hard_decision_eve(const Tensor& received);

struct BerRow {
  double snr_db = 0.0;
  double ber_bob = 0.0;
  double ber_eve_trained = 0.0;
  double ber_eve_hard_decision = 0.0;
};

struct BerTable {
  std::vector<BerRow> rows;
};

/// Fresh evaluation data: plaintext and key-pool picks from streams forked
/// away from every training stream (forks 1000 and 1001).
Batch make_test_set(const TrainingConfig& config, const Tensor& key_pool);

/**
 * Runs the frozen system over the test set once per SNR point and records
 * Bob's, trained Eve's, and hard-decision Eve's BER. The clear channel has
 * no SNR axis and yields a single row. Each point uses an independent
 * channel stream forked from channel_seed by SNR index, so points are
 * reproducible in isolation.
 */
BerTable snr_sweep(Network& alice, Network& bob, Network& eve,
                   const ChannelKind& base_kind, const std::vector<double>& snrs,
                   const Batch& test_set, FadingGranularity granularity,
                   std::uint64_t channel_seed);

/// Uniform-bin histogram split by decoding correctness.
struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> count_correct;
  std::vector<std::size_t> count_incorrect;

  std::size_t bins() const { return count_correct.size(); }
  double bin_left(std::size_t i) const;
  double bin_right(std::size_t i) const;
};

/// `correct` marks each value's decode as right or wrong; out-of-range
/// values land in the nearest edge bin. Zero bins is an error.
Histogram make_histogram(const Tensor& values, const std::vector<bool>& correct,
                         std::size_t bins, double lo, double hi);

// CSV exports. Floats are written as shortest-roundtrip decimals so reruns
// diff clean; every file starts with its header row.
void write_ber_csv(const BerTable& table, const std::filesystem::path& path);
void write_histogram_csv(const Histogram& hist, const std::filesystem::path& path);
void write_constellation_csv(const ComplexVec& points,
                             const std::filesystem::path& path);
void write_loss_history_csv(const std::vector<LossReport>& history,
                            const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly the same double.
std::string double_str(double value);

}  // namespace advmod
