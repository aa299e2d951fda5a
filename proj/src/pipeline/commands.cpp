#include "mtad/pipeline/commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "mtad/data/csv.hpp"
#include "mtad/data/store.hpp"
#include "mtad/error.hpp"
#include "mtad/model/checkpoint.hpp"
#include "mtad/pipeline/manifest.hpp"
#include "mtad/scoring/report.hpp"

namespace mtad::pipeline {

namespace fs = std::filesystem;
using scoring::format_number;

namespace {

constexpr const char* kResolvedName = "config.resolved";
constexpr const char* kCheckpointName = "model.ckpt";
constexpr const char* kMetricsName = "metrics.csv";

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

Symbol parse_label(const std::string& key, const std::string& name) {
  const auto s = symbol_from_name(name);
  if (!s || !is_maneuver(*s)) throw ConfigError(key + ": unknown maneuver '" + name + "'");
  return *s;
}

std::string split_mode_name(data::SplitMode m) {
  return m == data::SplitMode::Shuffled ? "shuffled" : "chronological";
}

std::size_t positive(const KeyValueConfig& kv, const std::string& key, std::size_t fallback) {
  const auto v = kv.get_uint(key, fallback);
  if (v == 0) throw ConfigError(key + " must be positive");
  return static_cast<std::size_t>(v);
}

double positive_real(const KeyValueConfig& kv, const std::string& key, double fallback) {
  const double v = kv.get_double(key, fallback);
  if (!(v > 0.0)) throw ConfigError(key + " must be positive");
  return v;
}

const std::string& single_input(const RunConfig& rc, const std::string& what) {
  if (rc.inputs.size() != 1) throw ConfigError("expected exactly one input (" + what + ")");
  return rc.inputs.front();
}

std::string config_hash(const std::string& resolved) { return hash_hex(fnv1a(resolved)); }

/// Writes config.resolved and returns a manifest with the run identity set.
Manifest begin_run(const RunConfig& rc, const std::string& command, const fs::path& out) {
  const std::string text = resolved_config(rc, command);
  fs::create_directories(out);
  scoring::write_text_file(out / kResolvedName, text);
  Manifest m;
  m.command = command;
  m.config_hash = config_hash(text);
  m.run_id = command + "-" + m.config_hash;
  m.outputs.push_back({kResolvedName, {}});
  return m;
}

FileEntry input_entry(const fs::path& path) { return {path.lexically_normal().string(), hash_hex(file_hash(path))}; }

std::string write_csv_file(const fs::path& dir, const std::string& name, const std::string& text) {
  scoring::write_text_file(dir / name, text);
  return name;
}

model::ModelConfig model_for_store(model::ModelConfig cfg, const PreparedData& data) {
  const auto& w = data.train.front();
  cfg.window_steps = w.input.rows();
  cfg.channels = w.input.cols();
  cfg.horizon_steps = w.targets.size() - 1;
  cfg.validate();
  return cfg;
}

/// Rebuilds the model of a train run and loads its checkpoint.
TrainedModel load_run_model(const fs::path& run_dir, const PreparedData& data, RunConfig* run_config = nullptr) {
  const auto kv = KeyValueConfig::load(run_dir / kResolvedName);
  const RunConfig trained = RunConfig::from_kv(kv);
  const auto cfg = model_for_store(trained.model, data);
  const fs::path ckpt = run_dir / kCheckpointName;
  if (!fs::exists(ckpt)) throw DataError("missing checkpoint " + ckpt.string());
  std::vector<Symbol> labels;
  if (trained.variant == Variant::Ensemble) labels = model::ensemble_labels(model::load_checkpoint(ckpt));
  TrainedModel m = empty_variant(trained.variant, cfg, labels);
  load_trained(ckpt, m);
  if (run_config) *run_config = trained;
  return m;
}

std::vector<scoring::RankedItem> ranked(const std::vector<scoring::ScoredWindow>& scores, bool scaled) {
  std::vector<scoring::RankedItem> out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.push_back({s.window_id, scaled ? s.scaled_score : s.raw_score});
  return out;
}

}  // namespace

void apply_paper_scale(KeyValueConfig& kv) {
  const std::pair<const char*, const char*> values[] = {
      {"model.hidden_size", "256"}, {"train.epochs", "300"}, {"train.batch_size", "512"},
      {"train.lr", "0.01"},         {"train.eps", "0.01"}};
  for (const auto& [k, v] : values) {
    if (!kv.has(k)) kv.set(k, v);
  }
}

KeyValueConfig build_config(const CommandLine& cli) {
  KeyValueConfig kv = cli.config ? KeyValueConfig::load(*cli.config) : KeyValueConfig{};
  for (const auto& a : cli.assignments) kv.set_assignment(a);
  if (!cli.inputs.empty()) kv.set("input", join(cli.inputs));
  if (cli.seed) kv.set("seed", std::to_string(*cli.seed));
  if (cli.variant) kv.set("train.variant", *cli.variant);
  if (cli.exclude_label) kv.set("prepare.exclude_label", *cli.exclude_label);
  if (cli.paper_scale) apply_paper_scale(kv);
  return kv;
}

RunConfig RunConfig::from_kv(const KeyValueConfig& kv) {
  RunConfig rc;
  rc.seed = kv.get_uint("seed", rc.seed);
  rc.inputs = split_list(kv.get_string("input", ""));

  rc.traces = positive(kv, "synth.traces", rc.traces);
  rc.generator = data::GeneratorConfig::from_kv(kv);

  auto& p = rc.prepare;
  p.target_hz = positive_real(kv, "prepare.target_hz", p.target_hz);
  p.segment.window_s = positive_real(kv, "prepare.window_s", p.segment.window_s);
  p.segment.stride_s = positive_real(kv, "prepare.stride_s", p.segment.stride_s);
  p.segment.horizon_s = positive_real(kv, "prepare.horizon_s", p.segment.horizon_s);
  p.min_speed = kv.get_double("prepare.min_speed", p.min_speed);
  p.train_fraction = kv.get_double("prepare.train_fraction", p.train_fraction);
  if (!(p.train_fraction > 0.0 && p.train_fraction < 1.0)) {
    throw ConfigError("prepare.train_fraction must be in (0, 1)");
  }
  const std::string split = kv.get_string("prepare.split", split_mode_name(p.split_mode));
  if (split == "chronological") {
    p.split_mode = data::SplitMode::Chronological;
  } else if (split == "shuffled") {
    p.split_mode = data::SplitMode::Shuffled;
  } else {
    throw ConfigError("prepare.split must be chronological or shuffled");
  }
  p.split_seed = rc.seed;
  const std::string excl = kv.get_string("prepare.exclude_label", "none");
  if (excl != "none") p.exclude_label = parse_label("prepare.exclude_label", excl);

  rc.variant = parse_variant(kv.get_string("train.variant", std::string(variant_name(rc.variant))));
  auto& t = rc.train;
  t.epochs = positive(kv, "train.epochs", t.epochs);
  t.batch_size = positive(kv, "train.batch_size", t.batch_size);
  t.adam.learning_rate = positive_real(kv, "train.lr", t.adam.learning_rate);
  t.adam.beta1 = kv.get_double("train.beta1", t.adam.beta1);
  t.adam.beta2 = kv.get_double("train.beta2", t.adam.beta2);
  t.adam.epsilon = positive_real(kv, "train.eps", t.adam.epsilon);
  t.clip_norm = kv.get_double("train.clip_norm", t.clip_norm);
  t.seed = rc.seed;

  auto& m = rc.model;
  m.hidden_size = positive(kv, "model.hidden_size", m.hidden_size);
  m.lstm_layers = positive(kv, "model.lstm_layers", m.lstm_layers);
  m.embed_dim = positive(kv, "model.embed_dim", m.embed_dim);
  m.conv_specs = model::parse_conv_specs(kv.get_string("model.conv_specs", model::format_conv_specs(m.conv_specs)));
  m.loss_weights.reconstruction = kv.get_double("model.w_A", m.loss_weights.reconstruction);
  m.loss_weights.symbol = kv.get_double("model.w_B", m.loss_weights.symbol);
  m.loss_weights.regularization = kv.get_double("model.w_R", m.loss_weights.regularization);
  m.class_weight_exponent = kv.get_double("model.class_weight_exponent", m.class_weight_exponent);
  m.validate();

  const std::string ridge = kv.get_string("score.ridge", "auto");
  if (ridge != "auto") rc.ridge = kv.get_double("score.ridge", 0.0);
  rc.nll_floor = positive_real(kv, "score.nll_floor", rc.nll_floor);

  rc.rare_label = parse_label("compare.rare_label",
                              kv.get_string("compare.rare_label", std::string(symbol_name(rc.rare_label))));
  rc.anomaly_threshold = kv.get_double("compare.anomaly_threshold", rc.anomaly_threshold);
  const auto fractions = kv.get("compare.fractions");
  if (fractions) {
    for (const auto& f : split_list(*fractions)) {
      KeyValueConfig one;
      one.set("f", f);
      const double v = one.get_double("f", 0.0);
      if (!(v > 0.0 && v <= 1.0)) throw ConfigError("compare.fractions entries must be in (0, 1]");
      rc.fractions.push_back(v);
    }
  } else {
    rc.fractions.assign(scoring::kDetectionRows.begin(), scoring::kDetectionRows.end());
  }
  kv.require_all_consumed();
  return rc;
}

std::string resolved_config(const RunConfig& rc, const std::string& command) {
  KeyValueConfig kv;
  kv.set("seed", std::to_string(rc.seed));
  if (command != "synth") kv.set("input", join(rc.inputs));
  if (command == "synth") {
    kv.set("synth.traces", std::to_string(rc.traces));
    rc.generator.to_kv(kv);
  }
  if (command == "prepare") {
    const auto& p = rc.prepare;
    kv.set("prepare.target_hz", format_number(p.target_hz));
    kv.set("prepare.window_s", format_number(p.segment.window_s));
    kv.set("prepare.stride_s", format_number(p.segment.stride_s));
    kv.set("prepare.horizon_s", format_number(p.segment.horizon_s));
    kv.set("prepare.min_speed", format_number(p.min_speed));
    kv.set("prepare.train_fraction", format_number(p.train_fraction));
    kv.set("prepare.split", split_mode_name(p.split_mode));
    kv.set("prepare.exclude_label", p.exclude_label ? std::string(symbol_name(*p.exclude_label)) : "none");
  }
  if (command == "train") {
    const auto& t = rc.train;
    kv.set("train.variant", std::string(variant_name(rc.variant)));
    kv.set("train.epochs", std::to_string(t.epochs));
    kv.set("train.batch_size", std::to_string(t.batch_size));
    kv.set("train.lr", format_number(t.adam.learning_rate));
    kv.set("train.beta1", format_number(t.adam.beta1));
    kv.set("train.beta2", format_number(t.adam.beta2));
    kv.set("train.eps", format_number(t.adam.epsilon));
    kv.set("train.clip_norm", format_number(t.clip_norm));
    const auto& m = rc.model;
    kv.set("model.hidden_size", std::to_string(m.hidden_size));
    kv.set("model.lstm_layers", std::to_string(m.lstm_layers));
    kv.set("model.embed_dim", std::to_string(m.embed_dim));
    kv.set("model.conv_specs", model::format_conv_specs(m.conv_specs));
    kv.set("model.w_A", format_number(m.loss_weights.reconstruction));
    kv.set("model.w_B", format_number(m.loss_weights.symbol));
    kv.set("model.w_R", format_number(m.loss_weights.regularization));
    kv.set("model.class_weight_exponent", format_number(m.class_weight_exponent));
  }
  if (command == "score" || command == "compare") {
    kv.set("score.ridge", rc.ridge ? format_number(*rc.ridge) : "auto");
    kv.set("score.nll_floor", format_number(rc.nll_floor));
  }
  if (command == "compare") {
    kv.set("compare.rare_label", std::string(symbol_name(rc.rare_label)));
    kv.set("compare.anomaly_threshold", format_number(rc.anomaly_threshold));
    std::vector<std::string> f;
    for (double v : rc.fractions) f.push_back(format_number(v));
    kv.set("compare.fractions", join(f));
  }
  return kv.serialize();
}

std::vector<std::string> store_files() { return {"train.win", "test.win", "scaler.csv", "labels.csv"}; }

std::string store_hash(const fs::path& store_dir) {
  std::uint64_t h = kFnvOffset;
  for (const auto& f : store_files()) {
    const std::string part = hash_hex(file_hash(store_dir / f));
    h = fnv1a(f + ":" + part + "\n", h);
  }
  return hash_hex(h);
}

PreparedData load_store(const fs::path& store_dir) {
  PreparedData d;
  d.train = data::read_windows(store_dir / "train.win");
  d.test = data::read_windows(store_dir / "test.win");
  d.scaler = data::read_scaler(store_dir / "scaler.csv");
  d.stats = data::read_label_stats(store_dir / "labels.csv");
  if (d.train.empty()) throw DataError("store " + store_dir.string() + " has no training windows");
  return d;
}

void cmd_synth(const RunConfig& rc, const fs::path& out) {
  Manifest m = begin_run(rc, "synth", out);
  const auto traces = synth_dataset(rc.generator, rc.traces, rc.seed);
  fs::create_directories(out / "traces");
  for (const auto& t : traces) {
    const std::string name = "traces/" + t.id + ".csv";
    data::export_csv(t, out / name);
    m.outputs.push_back({name, {}});
  }
  KeyValueConfig gen;
  rc.generator.to_kv(gen);
  m.outputs.push_back({write_csv_file(out, "generator.cfg", gen.serialize()), {}});
  m.summary["traces"] = std::to_string(traces.size());
  write_manifest(out, std::move(m));
}

void cmd_prepare(const RunConfig& rc, const fs::path& out) {
  const fs::path in = single_input(rc, "traces directory");
  fs::path dir = in;
  if (fs::is_directory(in / "traces")) dir = in / "traces";
  if (!fs::is_directory(dir)) throw DataError("traces directory " + dir.string() + " not found");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no trace CSV files in " + dir.string());

  Manifest m = begin_run(rc, "prepare", out);
  std::vector<data::Trace> traces;
  for (const auto& f : files) {
    traces.push_back(data::ingest_csv(f));
    m.inputs.push_back(input_entry(f));
  }
  const PreparedData d = prepare_windows(traces, rc.prepare);
  data::write_windows(out / "train.win", d.train);
  data::write_windows(out / "test.win", d.test);
  data::write_scaler(out / "scaler.csv", d.scaler);
  data::write_label_stats(out / "labels.csv", d.stats);
  for (const auto& f : store_files()) m.outputs.push_back({f, {}});

  std::ostringstream counts;
  counts << "stage,windows\n"
         << "segmented," << d.segmented << "\n"
         << "kept," << d.kept << "\n"
         << "train," << d.train.size() << "\n"
         << "test," << d.test.size() << "\n"
         << "excluded," << d.excluded << "\n";
  m.outputs.push_back({write_csv_file(out, "counts.csv", counts.str()), {}});
  m.summary = {{"segmented", std::to_string(d.segmented)}, {"kept", std::to_string(d.kept)},
               {"train", std::to_string(d.train.size())},  {"test", std::to_string(d.test.size())},
               {"excluded", std::to_string(d.excluded)}};
  m.store_hash = store_hash(out);
  m.store_dir = out.lexically_normal().string();
  write_manifest(out, std::move(m));
}

void cmd_train(const RunConfig& rc, const fs::path& out) {
  const fs::path store = single_input(rc, "store directory");
  const PreparedData d = load_store(store);
  Manifest m = begin_run(rc, "train", out);
  m.store_hash = store_hash(store);
  m.store_dir = store.lexically_normal().string();
  for (const auto& f : store_files()) m.inputs.push_back(input_entry(store / f));
  const auto cfg = model_for_store(rc.model, d);

  // Epoch rows are appended as they finish so a diverged run keeps its history.
  std::ofstream metrics(out / kMetricsName, std::ios::binary | std::ios::trunc);
  if (!metrics) throw DataError("cannot write " + (out / kMetricsName).string());
  write_metrics_csv(metrics, {});
  std::vector<model::EpochMetrics> history;
  auto on_epoch = [&](const model::EpochMetrics& e) {
    history.push_back(e);
    write_metrics_csv_rows(metrics, std::span(&e, 1));
    metrics.flush();
  };

  TrainedModel trained;
  try {
    trained = train_variant(rc.variant, cfg, d, rc.train, on_epoch);
  } catch (const NumericError& e) {
    metrics.close();
    m.status = "diverged";
    m.summary["error"] = e.what();
    m.epochs = history;
    m.outputs.push_back({kMetricsName, {}});
    write_manifest(out, std::move(m));
    throw;
  }
  metrics.close();
  save_trained(out / kCheckpointName, trained);
  m.outputs.push_back({kMetricsName, {}});
  m.outputs.push_back({kCheckpointName, {}});
  m.checkpoints.push_back(kCheckpointName);
  m.epochs = trained.metrics;
  m.summary["variant"] = std::string(variant_name(rc.variant));
  m.summary["train_windows"] = std::to_string(d.train.size());
  m.summary["test_windows"] = std::to_string(d.test.size());
  write_manifest(out, std::move(m));
}

void cmd_score(const RunConfig& rc, const fs::path& out) {
  const fs::path run = single_input(rc, "train run directory");
  const Manifest trained_manifest = read_manifest(run);
  if (trained_manifest.command != "train" || trained_manifest.status != "ok") {
    throw DataError(run.string() + " is not a completed train run");
  }
  const fs::path store = trained_manifest.store_dir;
  if (store_hash(store) != trained_manifest.store_hash) {
    throw DataError("store " + store.string() + " changed since the model was trained");
  }
  const PreparedData d = load_store(store);
  const TrainedModel model = load_run_model(run, d);

  Manifest m = begin_run(rc, "score", out);
  m.store_hash = trained_manifest.store_hash;
  m.store_dir = trained_manifest.store_dir;
  m.inputs.push_back(input_entry(run / kCheckpointName));
  m.inputs.push_back(input_entry(run / kResolvedName));

  const ScoreSet scores = score_windows(model, d, rc.ridge, rc.nll_floor);
  for (std::size_t k = 0; k < scoring::kModalityCount; ++k) {
    const auto mod = scoring::kAllModalities[k];
    std::ostringstream csv;
    scoring::write_score_report(csv, mod, scores.per_modality[k]);
    const std::string name = "scores_" + std::string(scoring::modality_name(mod)) + ".csv";
    m.outputs.push_back({write_csv_file(out, name, csv.str()), {}});
    m.summary["dim." + std::string(scoring::modality_name(mod))] = std::to_string(scores.models[k].dim());
  }
  m.summary["test_windows"] = std::to_string(d.test.size());
  m.summary["variant"] = std::string(variant_name(model.variant));
  write_manifest(out, std::move(m));
}

void cmd_compare(const RunConfig& rc, const fs::path& out) {
  if (rc.inputs.size() < 2) throw ConfigError("compare needs at least two train runs");
  std::vector<Manifest> manifests;
  for (const auto& in : rc.inputs) {
    manifests.push_back(read_manifest(in));
    const auto& mf = manifests.back();
    if (mf.command != "train" || mf.status != "ok") throw DataError(in + " is not a completed train run");
    if (mf.store_hash != manifests.front().store_hash) {
      throw DataError("incompatible stores: " + rc.inputs.front() + " and " + in + " were trained on different data");
    }
  }
  const fs::path store = manifests.front().store_dir;
  if (store_hash(store) != manifests.front().store_hash) {
    throw DataError("store " + store.string() + " changed since the models were trained");
  }
  const PreparedData d = load_store(store);

  Manifest m = begin_run(rc, "compare", out);
  m.store_hash = manifests.front().store_hash;
  m.store_dir = manifests.front().store_dir;

  std::vector<std::uint8_t> is_rare, is_anomalous;
  for (const auto& w : d.test) {
    is_rare.push_back(w.majority_label == rc.rare_label ? 1 : 0);
    is_anomalous.push_back(w.anomaly_fraction >= rc.anomaly_threshold ? 1 : 0);
  }

  std::vector<scoring::LossColumn> losses;
  std::vector<scoring::DetectionColumn> rare, anomalies;
  std::map<std::string, int> seen;
  for (const auto& in : rc.inputs) {
    m.inputs.push_back(input_entry(fs::path(in) / kCheckpointName));
    const TrainedModel model = load_run_model(in, d);
    std::string name(variant_name(model.variant));
    if (++seen[name] > 1) name += "_" + std::to_string(seen[name]);
    losses.push_back({name, modality_mse(model, d.test)});

    auto add = [&](const std::string& column, const std::vector<scoring::RankedItem>& items) {
      rare.push_back({column, scoring::detection_report(items, is_rare, rc.fractions)});
      anomalies.push_back({column, scoring::detection_report(items, is_anomalous, rc.fractions)});
    };
    if (model.ensemble) {
      std::vector<scoring::RankedItem> items;
      for (const auto& w : d.test) items.push_back({w.id, model.reconstruction_loss(w.input)});
      add(name, items);
      continue;
    }
    const ScoreSet scores = score_windows(model, d, rc.ridge, rc.nll_floor);
    const auto& combined = scores.per_modality[static_cast<std::size_t>(scoring::Modality::Combined)];
    add(name + "-raw", ranked(combined, false));
    if (model.multitask) add(name + "-scaled", ranked(combined, true));
  }

  std::ostringstream loss_csv, rare_csv, anomaly_csv;
  scoring::write_loss_table(loss_csv, losses);
  scoring::write_detection_table(rare_csv, rare);
  scoring::write_detection_table(anomaly_csv, anomalies);
  m.outputs.push_back({write_csv_file(out, "loss_table.csv", loss_csv.str()), {}});
  m.outputs.push_back({write_csv_file(out, "detection_rare.csv", rare_csv.str()), {}});
  m.outputs.push_back({write_csv_file(out, "detection_anomaly.csv", anomaly_csv.str()), {}});
  m.summary["rare_label"] = std::string(symbol_name(rc.rare_label));
  m.summary["rare_targets"] = std::to_string(std::count(is_rare.begin(), is_rare.end(), 1));
  m.summary["anomalous_targets"] = std::to_string(std::count(is_anomalous.begin(), is_anomalous.end(), 1));
  write_manifest(out, std::move(m));
}

void run_command(const std::string& command, const RunConfig& rc, const fs::path& out) {
  if (command == "synth") return cmd_synth(rc, out);
  if (command == "prepare") return cmd_prepare(rc, out);
  if (command == "train") return cmd_train(rc, out);
  if (command == "score") return cmd_score(rc, out);
  if (command == "compare") return cmd_compare(rc, out);
  throw ConfigError("unknown command '" + command + "'");
}

int exit_code(const std::exception& e) noexcept {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const NumericError*>(&e)) return 4;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const CheckpointError*>(&e) ||
      dynamic_cast<const ShapeError*>(&e)) {
    return 3;
  }
  return 1;
}

}  // namespace mtad::pipeline
