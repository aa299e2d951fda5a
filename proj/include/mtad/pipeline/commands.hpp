#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mtad/kv_config.hpp"
#include "mtad/model/config.hpp"
#include "mtad/model/trainer.hpp"
#include "mtad/pipeline/experiment.hpp"

namespace mtad::pipeline {

// Each command reads a key=value config, writes its outputs plus
// config.resolved and manifest.json into `out`, and is deterministic given
// the resolved config.
//
// Keys shared by every command:
//   seed                     root seed (default 1)
//   input                    command input: traces dir (prepare), store dir
//                            (train), train run dir (score), comma-separated
//                            train run dirs (compare)
// synth:    synth.traces and the generator keys (sample_rate_hz, duration_s,
//           noise, anomaly_rate, anomaly_duration, cruise_speed, prob.<label>,
//           duration.<label>)
// prepare:  prepare.{target_hz, window_s, stride_s, horizon_s, min_speed,
//           train_fraction, split, exclude_label}
// train:    train.{variant, epochs, batch_size, lr, beta1, beta2, eps,
//           clip_norm} and model.{hidden_size, lstm_layers, embed_dim,
//           conv_specs, w_A, w_B, w_R, class_weight_exponent}
// score:    score.{ridge, nll_floor}
// compare:  compare.{rare_label, anomaly_threshold, fractions} plus score.*

/// Command-line values layered over the config file.
struct CommandLine {
  std::optional<std::filesystem::path> config;
  std::vector<std::string> assignments;  // "key=value", applied after the file
  std::vector<std::string> inputs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> variant;
  std::optional<std::string> exclude_label;
  bool paper_scale = false;
};

/// File, then assignments, then the dedicated flags. --paper-scale fills the
/// full-scale training values for keys that are still unset.
KeyValueConfig build_config(const CommandLine& cli);

/// Hidden 256, 300 epochs, minibatch 512, lr 0.01, eps 0.01.
void apply_paper_scale(KeyValueConfig& kv);

/// Every key the commands understand, resolved against the defaults. Throws
/// ConfigError on unknown keys or invalid values.
struct RunConfig {
  std::uint64_t seed = 1;
  std::vector<std::string> inputs;
  std::size_t traces = 5;
  data::GeneratorConfig generator;
  PrepareOptions prepare;
  Variant variant = Variant::Multitask;
  model::ModelConfig model;
  model::TrainOptions train;
  std::optional<double> ridge;  // nullopt = default scale
  double nll_floor = scoring::kDefaultNllFloor;
  Symbol rare_label = Symbol::UTurn;
  double anomaly_threshold = 0.2;
  std::vector<double> fractions;

  static RunConfig from_kv(const KeyValueConfig& kv);
};

/// Canonical text of the keys that `command` depends on.
std::string resolved_config(const RunConfig& rc, const std::string& command);

void cmd_synth(const RunConfig& rc, const std::filesystem::path& out);
void cmd_prepare(const RunConfig& rc, const std::filesystem::path& out);
void cmd_train(const RunConfig& rc, const std::filesystem::path& out);
void cmd_score(const RunConfig& rc, const std::filesystem::path& out);
void cmd_compare(const RunConfig& rc, const std::filesystem::path& out);

/// Dispatches on "synth", "prepare", "train", "score" or "compare".
void run_command(const std::string& command, const RunConfig& rc, const std::filesystem::path& out);

/// 2 config error, 3 data or checkpoint error, 4 numeric failure, 1 otherwise.
int exit_code(const std::exception& e) noexcept;

/// Store files written by prepare, in hashing order.
std::vector<std::string> store_files();
/// Combined FNV-1a of the store files; throws DataError if one is missing.
std::string store_hash(const std::filesystem::path& store_dir);

/// Reads the windows, scaler and label stats written by cmd_prepare.
PreparedData load_store(const std::filesystem::path& store_dir);

}  // namespace mtad::pipeline
