// advmod: adversarial secured-modulation trainer and evaluation harness.
//
// Subcommands:
//   train         train Alice/Bob/Eve per a JSON config
//   eval          BER sweep + figure exports for a trained model dir
//   gradcheck     finite-difference audit of every layer backward
//   sweep-levels  train once per quantizer level count L and tabulate
//
// Exit codes: 0 ok, 2 invalid config/arguments, 3 non-finite loss,
// 4 missing/corrupt checkpoint, 5 gradient check failure.

#include <string>

#include <CLI11.hpp>

#include "advmod/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"adversarial secured-modulation over wiretap channels"};
  app.require_subcommand(1);

  std::string config_path;
  std::string model_dir;
  std::string out_dir = "out";
  std::string channel;
  std::string snr_spec;
  std::string levels_spec = "3,5,9,13";
  bool corrupt_fixture = false;

  auto* train = app.add_subcommand("train", "train a system from a JSON config");
  train->add_option("--config", config_path, "training config JSON")->required();
  train->add_option("--out", out_dir, "output directory");

  auto* eval = app.add_subcommand("eval", "BER sweep and exports for a model dir");
  eval->add_option("--model", model_dir, "directory holding alice/bob/eve.json")
      ->required();
  eval->add_option("--out", out_dir, "output directory");
  eval->add_option("--channel", channel, "clear|awgn|rayleigh (default: trained)");
  eval->add_option("--snr", snr_spec, "SNR dB sweep 'start:stop:step' or value");
  eval->add_option("--config", config_path,
                   "training config (default: model dir manifest)");

  auto* gradcheck =
      app.add_subcommand("gradcheck", "finite-difference check of all layers");
  gradcheck
      ->add_flag("--corrupt-fixture", corrupt_fixture,
                 "negative control: break one gradient on purpose")
      ->group("");  // hidden

  auto* sweep = app.add_subcommand("sweep-levels",
                                   "train per quantizer level count and tabulate");
  sweep->add_option("--config", config_path, "training config JSON")->required();
  sweep->add_option("--levels", levels_spec, "comma-separated L values");
  sweep->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? advmod::kExitOk : advmod::kExitInvalidConfig;
  }

  if (train->parsed()) return advmod::cmd_train(config_path, out_dir);
  if (eval->parsed()) {
    return advmod::cmd_eval(model_dir, channel, snr_spec, out_dir, config_path);
  }
  if (gradcheck->parsed()) return advmod::cmd_gradcheck(corrupt_fixture);
  if (sweep->parsed()) {
    return advmod::cmd_sweep_levels(config_path, levels_spec, out_dir);
  }
  return advmod::kExitInvalidConfig;
}
