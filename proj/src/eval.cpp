#include "advmod/eval.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace advmod {

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

Tensor harden(const Tensor& values, double threshold) {
  Tensor bits(values.shape);
  for (std::size_t i = 0; i < values.size(); ++i) {
    bits[i] = values[i] >= threshold ? 1.0 : 0.0;
  }
  return bits;
}

double ber(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument("ber: shape mismatch " + shape_str(a.shape) +
                                " vs " + shape_str(b.shape));
  }
  if (a.size() == 0) throw std::invalid_argument("ber: empty input");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(a.size());
}

Tensor hard_decision_eve(const Tensor& received) {
  return harden(received, 0.0);
}

Batch make_test_set(const TrainingConfig& config, const Tensor& key_pool) {
  RngStream data_rng = RngStream(config.data_seed).fork(1000);
  RngStream key_rng = RngStream(config.key_seed).fork(1001);
  return gen_batch(config.test_symbols, config.block_len, key_pool, data_rng,
                   key_rng);
}

BerTable snr_sweep(Network& alice, Network& bob, Network& eve,
                   const ChannelKind& base_kind, const std::vector<double>& snrs,
                   const Batch& test_set, FadingGranularity granularity,
                   std::uint64_t channel_seed) {
  if (alice.block_len != bob.block_len || alice.block_len != eve.block_len) {
    throw std::invalid_argument("snr_sweep: networks disagree on block length");
  }
  if (test_set.plain.rank() != 2 || test_set.plain.dim(1) != alice.block_len) {
    throw std::invalid_argument("snr_sweep: test set does not match networks");
  }

  std::vector<double> points = snrs;
  if (!base_kind.is_noisy()) points = {0.0};
  if (points.empty()) throw std::invalid_argument("snr_sweep: no SNR points");

  const RngStream seed_base{channel_seed};
  BerTable table;
  for (std::size_t i = 0; i < points.size(); ++i) {
    RngStream rng = seed_base.fork(2000 + i);
    const ChannelKind kind = base_kind.with_snr(points[i]);
    const PipelineOutputs out =
        run_pipeline(alice, bob, eve, test_set, kind, granularity, rng);
    BerRow row;
    row.snr_db = points[i];
    row.ber_bob = ber(harden(out.bob_out), test_set.plain);
    row.ber_eve_trained = ber(harden(out.eve_out), test_set.plain);
    row.ber_eve_hard_decision = ber(hard_decision_eve(out.received), test_set.plain);
    table.rows.push_back(row);
  }
  return table;
}

double Histogram::bin_left(std::size_t i) const {
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins());
}

double Histogram::bin_right(std::size_t i) const {
  return lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(bins());
}

Histogram make_histogram(const Tensor& values, const std::vector<bool>& correct,
                         std::size_t bins, double lo, double hi) {
  if (bins == 0) throw std::invalid_argument("make_histogram: zero bins");
  if (!(hi > lo)) throw std::invalid_argument("make_histogram: empty range");
  if (values.size() != correct.size()) {
    throw std::invalid_argument("make_histogram: mask length mismatch");
  }
  Histogram hist;
  hist.lo = lo;
  hist.hi = hi;
  hist.count_correct.assign(bins, 0);
  hist.count_incorrect.assign(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i < values.size(); ++i) {
    double idx = std::floor((values[i] - lo) / width);
    if (idx < 0.0) idx = 0.0;
    if (idx > static_cast<double>(bins - 1)) idx = static_cast<double>(bins - 1);
    const auto bin = static_cast<std::size_t>(idx);
    if (correct[i]) {
      ++hist.count_correct[bin];
    } else {
      ++hist.count_incorrect[bin];
    }
  }
  return hist;
}

std::string double_str(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

void write_ber_csv(const BerTable& table, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "snr_db,ber_bob,ber_eve_trained,ber_eve_hard_decision\n";
  for (const auto& row : table.rows) {
    out << double_str(row.snr_db) << ',' << double_str(row.ber_bob) << ','
        << double_str(row.ber_eve_trained) << ','
        << double_str(row.ber_eve_hard_decision) << '\n';
  }
}

void write_histogram_csv(const Histogram& hist,
                         const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "bin_left,bin_right,count_correct,count_incorrect\n";
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    out << double_str(hist.bin_left(i)) << ',' << double_str(hist.bin_right(i))
        << ',' << hist.count_correct[i] << ',' << hist.count_incorrect[i]
        << '\n';
  }
}

void write_constellation_csv(const ComplexVec& points,
                             const std::filesystem::path& path) {
  if (points.size() == 0) {
    throw std::invalid_argument("write_constellation_csv: empty batch");
  }
  auto out = open_csv(path);
  out << "re,im\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << double_str(points.re[i]) << ',' << double_str(points.im[i]) << '\n';
  }
}

void write_loss_history_csv(const std::vector<LossReport>& history,
                            const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "epoch,loss_bob,loss_eve,loss_eve_norm,joint\n";
  for (const auto& report : history) {
    out << report.epoch << ',' << double_str(report.loss_bob) << ','
        << double_str(report.loss_eve) << ',' << double_str(report.loss_eve_norm)
        << ',' << double_str(report.joint) << '\n';
  }
}

}  // namespace advmod
