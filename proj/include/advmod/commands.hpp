#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace advmod {

// The complete exit-code vocabulary. Anything unexpected (unwritable output
// paths, bad flag values) reports as invalid_config.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitNonFiniteLoss = 3;
inline constexpr int kExitBadCheckpoint = 4;
inline constexpr int kExitGradcheckFailed = 5;

/// "start:stop:step" (inclusive stop, step > 0) or a single "value".
std::vector<double> parse_snr_spec(const std::string& spec);

/// Comma-separated integer list, e.g. "3,5,9,13".
std::vector<int> parse_levels_list(const std::string& spec);

/// ADVMOD_SEED_OVERRIDE, when set, replaces (data, key, init) seeds with
/// (s, s+1, s+2) so the streams stay distinct. Throws on a non-integer value.
std::optional<std::uint64_t> seed_override_from_env();

/// Train per config; writes alice/bob/eve.json, loss_history.csv,
/// manifest.json under out_dir.
int cmd_train(const std::filesystem::path& config_path,
              const std::filesystem::path& out_dir);

/**
 * Evaluate a trained model directory: BER sweep plus histogram and
 * constellation exports. The training config is recovered from the model
 * dir's manifest.json unless config_path is given explicitly (the key pool
 * and test set are rebuilt from its seeds). channel_name and snr_spec
 * override the config's channel; empty strings mean "use the config".
 */
int cmd_eval(const std::filesystem::path& model_dir,
             const std::string& channel_name, const std::string& snr_spec,
             const std::filesystem::path& out_dir,
             const std::filesystem::path& config_path = {});

/// Finite-difference suite over every layer kind; prints one line each.
int cmd_gradcheck(bool corrupt_fixture = false);

/// Trains one system per L and tabulates final losses and test BER at the
/// training SNR into levels_sweep.csv.
int cmd_sweep_levels(const std::filesystem::path& config_path,
                     const std::string& levels_spec,
                     const std::filesystem::path& out_dir);

}  // namespace advmod
