#include "advmod/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "advmod/checkpoint.hpp"
#include "advmod/eval.hpp"
#include "advmod/gradcheck.hpp"
#include "advmod/manifest.hpp"
#include "advmod/trainer.hpp"

namespace advmod {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (true) {
    const std::size_t end = text.find(sep, begin);
    parts.push_back(text.substr(begin, end - begin));
    if (end == std::string::npos) return parts;
    begin = end + 1;
  }
}

double parse_double(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(value)) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  return value;
}

void apply_seed_override(TrainingConfig& config) {
  if (const auto seed = seed_override_from_env()) {
    config.data_seed = *seed;
    config.key_seed = *seed + 1;
    config.init_seed = *seed + 2;
  }
}

TrainingConfig config_from_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) {
    throw CheckpointError("no " + manifest_path.string() +
                          "; pass --config to supply the training config");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError("unreadable manifest " + manifest_path.string() + ": " +
                          e.what());
  }
  if (!j.contains("parameters") || !j["parameters"].is_object()) {
    throw CheckpointError("manifest " + manifest_path.string() +
                          " carries no training parameters");
  }
  return config_from_json(j["parameters"].dump());
}

std::vector<bool> correctness_mask(const Tensor& predictions, const Tensor& plain) {
  const Tensor bits = harden(predictions);
  std::vector<bool> mask(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) mask[i] = bits[i] == plain[i];
  return mask;
}

struct EvalArtifacts {
  BerTable table;
  std::vector<std::string> files;
};

/// Sweep plus the figure exports, written into out_dir. The histogram and
/// constellation snapshots come from a rerun of the sweep's final SNR point
/// (its per-point stream makes the rerun identical to the recorded row).
EvalArtifacts write_eval_outputs(Network& alice, Network& bob, Network& eve,
                                 const TrainingConfig& config,
                                 const ChannelKind& kind,
                                 const std::vector<double>& snrs,
                                 const Batch& test_set,
                                 const std::filesystem::path& out_dir) {
  EvalArtifacts art;
  art.table = snr_sweep(alice, bob, eve, kind, snrs, test_set,
                        config.fading_granularity, config.data_seed);
  write_ber_csv(art.table, out_dir / "ber_sweep.csv");

  const std::size_t last = art.table.rows.size() - 1;
  RngStream rng = RngStream(config.data_seed).fork(2000 + last);
  const PipelineOutputs out =
      run_pipeline(alice, bob, eve, test_set,
                   kind.with_snr(art.table.rows[last].snr_db),
                   config.fading_granularity, rng);

  write_histogram_csv(
      make_histogram(out.bob_out, correctness_mask(out.bob_out, test_set.plain),
                     50, 0.0, 1.0),
      out_dir / "hist_bob.csv");
  write_histogram_csv(
      make_histogram(out.eve_out, correctness_mask(out.eve_out, test_set.plain),
                     50, 0.0, 1.0),
      out_dir / "hist_eve.csv");
  write_histogram_csv(
      make_histogram(out.cipher, std::vector<bool>(out.cipher.size(), true), 50,
                     -1.0, 1.0),
      out_dir / "hist_cipher.csv");
  write_constellation_csv(out.modulated, out_dir / "constellation.csv");

  art.files = {"ber_sweep.csv", "hist_bob.csv", "hist_eve.csv",
               "hist_cipher.csv", "constellation.csv"};
  return art;
}

void print_ber_table(const BerTable& table) {
  std::cout << "snr_db  ber_bob  ber_eve_trained  ber_eve_hard_decision\n";
  for (const auto& row : table.rows) {
    std::cout << row.snr_db << "  " << row.ber_bob << "  " << row.ber_eve_trained
              << "  " << row.ber_eve_hard_decision << "\n";
  }
}

}  // namespace

std::vector<double> parse_snr_spec(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 1) return {parse_double(parts[0])};
  if (parts.size() != 3) {
    throw std::invalid_argument("snr spec must be 'value' or 'start:stop:step'");
  }
  const double start = parse_double(parts[0]);
  const double stop = parse_double(parts[1]);
  const double step = parse_double(parts[2]);
  if (step <= 0.0 || stop < start) {
    throw std::invalid_argument("snr spec needs stop >= start and step > 0");
  }
  std::vector<double> points;
  for (double v = start; v <= stop + 1e-9; v += step) points.push_back(v);
  return points;
}

std::vector<int> parse_levels_list(const std::string& spec) {
  std::vector<int> levels;
  for (const auto& part : split(spec, ',')) {
    int value = 0;
    const auto [ptr, ec] =
        std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc{} || ptr != part.data() + part.size()) {
      throw std::invalid_argument("bad levels entry: '" + part + "'");
    }
    levels.push_back(value);
  }
  return levels;
}

std::optional<std::uint64_t> seed_override_from_env() {
  const char* raw = std::getenv("ADVMOD_SEED_OVERRIDE");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(raw, raw + std::strlen(raw), value);
  if (ec != std::errc{} || *ptr != '\0') {
    throw std::invalid_argument("ADVMOD_SEED_OVERRIDE must be an unsigned integer");
  }
  return value;
}

int cmd_train(const std::filesystem::path& config_path,
              const std::filesystem::path& out_dir) {
  try {
    TrainingConfig config = load_config(config_path);
    apply_seed_override(config);
    config.validate();

    std::filesystem::create_directories(out_dir);
    RunManifest manifest;
    manifest.command = "train";
    manifest.started_at = iso8601_utc_now();
    manifest.parameters_json = config_to_json(config);

    TrainResult result;
    try {
      result = train(config);
    } catch (const NonFiniteLossError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitNonFiniteLoss;
    }

    save_network(result.alice, out_dir / "alice.json");
    save_network(result.bob, out_dir / "bob.json");
    save_network(result.eve, out_dir / "eve.json");
    write_loss_history_csv(result.history, out_dir / "loss_history.csv");
    manifest.output_files = {"alice.json", "bob.json", "eve.json",
                             "loss_history.csv"};
    write_manifest(manifest, out_dir);

    if (!result.history.empty()) {
      const auto& last = result.history.back();
      std::cout << "trained " << result.history.size() << " epochs on "
                << config.channel << ": loss_bob " << last.loss_bob
                << ", loss_eve_norm " << last.loss_eve_norm << "\n";
    }
    std::cout << "wrote " << out_dir.string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  }
}

int cmd_eval(const std::filesystem::path& model_dir,
             const std::string& channel_name, const std::string& snr_spec,
             const std::filesystem::path& out_dir,
             const std::filesystem::path& config_path) {
  try {
    TrainingConfig config = config_path.empty()
                                ? config_from_manifest(model_dir / "manifest.json")
                                : load_config(config_path);
    apply_seed_override(config);

    Network alice, bob, eve;
    try {
      alice = load_network(model_dir / "alice.json");
      bob = load_network(model_dir / "bob.json");
      eve = load_network(model_dir / "eve.json");
    } catch (const CheckpointError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitBadCheckpoint;
    }
    if (alice.block_len != config.block_len ||
        bob.block_len != config.block_len || eve.block_len != config.block_len) {
      std::cerr << "error: checkpoints disagree with the config block length\n";
      return kExitBadCheckpoint;
    }

    const std::string chan = channel_name.empty() ? config.channel : channel_name;
    ChannelKind kind = channel_from_name(chan, config.train_snr_db);
    kind.rayleigh_scale = config.rayleigh_scale;
    const std::vector<double> snrs =
        parse_snr_spec(snr_spec.empty() ? "0:40:5" : snr_spec);

    RngStream pool_rng(config.key_seed);
    const Tensor pool =
        make_key_pool(config.key_pool_size(), config.block_len, pool_rng);
    const Batch test_set = make_test_set(config, pool);

    std::filesystem::create_directories(out_dir);
    RunManifest manifest;
    manifest.command = "eval";
    manifest.started_at = iso8601_utc_now();
    nlohmann::json params;
    params["model_dir"] = model_dir.string();
    params["channel"] = chan;
    params["snr_db"] = snrs;
    params["config"] = nlohmann::json::parse(config_to_json(config));
    manifest.parameters_json = params.dump();

    const EvalArtifacts art = write_eval_outputs(alice, bob, eve, config, kind,
                                                 snrs, test_set, out_dir);
    manifest.output_files = art.files;
    write_manifest(manifest, out_dir);

    print_ber_table(art.table);
    std::cout << "wrote " << out_dir.string() << "\n";
    return kExitOk;
  } catch (const CheckpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadCheckpoint;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  }
}

int cmd_gradcheck(bool corrupt_fixture) {
  const GradCheckReport report = run_gradcheck(42, corrupt_fixture);
  for (const auto& entry : report.entries) {
    std::cout << entry.kind << ": worst rel err " << entry.worst_rel_err;
    if (!entry.worst_coordinate.empty()) {
      std::cout << " at " << entry.worst_coordinate;
    }
    std::cout << "\n";
  }
  if (report.all_pass()) {
    std::cout << "gradient check passed (threshold " << report.threshold << ")\n";
    return kExitOk;
  }
  const GradCheckEntry* worst = report.worst();
  std::cerr << "gradient check FAILED: " << worst->kind << " rel err "
            << worst->worst_rel_err << " at " << worst->worst_coordinate
            << " (threshold " << report.threshold << ")\n";
  return kExitGradcheckFailed;
}

int cmd_sweep_levels(const std::filesystem::path& config_path,
                     const std::string& levels_spec,
                     const std::filesystem::path& out_dir) {
  try {
    TrainingConfig base = load_config(config_path);
    apply_seed_override(base);
    const std::vector<int> levels = parse_levels_list(levels_spec);
    if (levels.empty()) throw std::invalid_argument("no levels given");
    for (const int level : levels) {
      if (level < 2) throw std::invalid_argument("levels must be at least 2");
    }

    std::filesystem::create_directories(out_dir);
    RunManifest manifest;
    manifest.command = "sweep-levels";
    manifest.started_at = iso8601_utc_now();
    nlohmann::json params;
    params["levels"] = levels;
    params["config"] = nlohmann::json::parse(config_to_json(base));
    manifest.parameters_json = params.dump();

    std::ofstream csv(out_dir / "levels_sweep.csv");
    if (!csv) {
      throw std::runtime_error("cannot write " +
                               (out_dir / "levels_sweep.csv").string());
    }
    csv << "L,final_loss_bob,final_loss_eve,ber_bob,ber_eve\n";
    manifest.output_files = {"levels_sweep.csv"};

    for (const int level : levels) {
      TrainingConfig config = base;
      config.levels = level;
      config.output_activation = "tanh_discrete";  // the axis under study

      TrainResult result;
      try {
        result = train(config);
      } catch (const NonFiniteLossError& e) {
        std::cerr << "error at L=" << level << ": " << e.what() << "\n";
        return kExitNonFiniteLoss;
      }

      const std::string leg = "L_" + std::to_string(level);
      std::filesystem::create_directories(out_dir / leg);
      save_network(result.alice, out_dir / leg / "alice.json");
      save_network(result.bob, out_dir / leg / "bob.json");
      save_network(result.eve, out_dir / leg / "eve.json");
      write_loss_history_csv(result.history, out_dir / leg / "loss_history.csv");
      for (const char* name :
           {"alice.json", "bob.json", "eve.json", "loss_history.csv"}) {
        manifest.output_files.push_back(leg + "/" + name);
      }

      const Batch test_set = make_test_set(config, result.key_pool);
      const BerTable table = snr_sweep(
          result.alice, result.bob, result.eve, config.channel_kind(),
          {config.train_snr_db}, test_set, config.fading_granularity,
          config.data_seed);

      const double final_lb =
          result.history.empty() ? std::nan("") : result.history.back().loss_bob;
      const double final_le =
          result.history.empty() ? std::nan("") : result.history.back().loss_eve;
      csv << level << ',' << double_str(final_lb) << ',' << double_str(final_le)
          << ',' << double_str(table.rows[0].ber_bob) << ','
          << double_str(table.rows[0].ber_eve_trained) << '\n';
      std::cout << "L=" << level << ": ber_bob " << table.rows[0].ber_bob
                << ", ber_eve " << table.rows[0].ber_eve_trained << "\n";
    }
    csv.close();
    write_manifest(manifest, out_dir);
    std::cout << "wrote " << out_dir.string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  }
}

}  // namespace advmod
