// tools/srep_main.cpp

// Copyright 2026  srep authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// srep <command>: the full pipeline behind one binary. Commands cover corpus
// scanning (manifest), distance tables (distances), correlation reports
// (correlate), mask-net training (train), inference (enhance), metric tables
// (evaluate), representation image dumps (visualize), synthetic fixtures
// (synth), and seeded reference checkpoints (init-backend).
//
// Exit codes: 0 success, 2 configuration error, 3 missing input, 1 anything
// else. Every artifact-writing command also writes <out>.meta.json carrying
// the config hash so results stay traceable to their settings.

#include "srep/config.hpp"
#include "srep/correlation.hpp"
#include "srep/csv.hpp"
#include "srep/distances.hpp"
#include "srep/featviz.hpp"
#include "srep/losses.hpp"
#include "srep/manifest.hpp"
#include "srep/masknet.hpp"
#include "srep/metrics.hpp"
#include "srep/sssr.hpp"
#include "srep/synth.hpp"
#include "srep/training.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace srep {
namespace {

namespace fs = std::filesystem;

StftParams stft_from_config(const RunConfig& config) {
  StftParams params;
  params.fft_size = config.get_int("stft", "fft_size", params.fft_size);
  params.window_length_ms =
      config.get_double("stft", "window_ms", params.window_length_ms);
  params.hop_ms = config.get_double("stft", "hop_ms", params.hop_ms);
  return params;
}

MseReduction reduction_from_config(const RunConfig& config) {
  const std::string r = config.get_string("distances", "reduction", "mean");
  if (r == "mean") return MseReduction::kMean;
  if (r == "sum") return MseReduction::kSum;
  throw ConfigError("config: [distances] reduction must be mean or sum, got '" + r + "'");
}

/// "spectrogram-only" (or an empty list) loads nothing; otherwise each model
/// id resolves against [backends] checkpoint_dir / SREP_CHECKPOINT_DIR.
std::vector<std::shared_ptr<const SSSRBackend>> backends_from_config(
    const RunConfig& config) {
  std::vector<std::shared_ptr<const SSSRBackend>> backends;
  std::vector<std::string> models = config.get_list("backends", "models");
  if (models.size() == 1 && models[0] == "spectrogram-only") return backends;
  const std::string dir = config.get_string("backends", "checkpoint_dir", "");
  for (const std::string& model : models) {
    if (model == "spectrogram-only") {
      throw ConfigError("config: spectrogram-only cannot be combined with model ids");
    }
    const std::string ref = dir.empty() ? "" : (fs::path(dir) / model).string();
    backends.push_back(load_backend(model, ref));
  }
  return backends;
}

MetricRegistry registry_from_config(const RunConfig& config) {
  MetricRegistry registry;
  for (const char* name : {"pesq", "stoi", "composite"}) {
    const std::string cmd =
        config.get_string("evaluation", std::string(name) + "_cmd", "");
    if (!cmd.empty()) registry.add({name, cmd, ""});
  }
  return registry;
}

void merge_config_file(RunConfig* config, const std::string& path) {
  if (path.empty()) return;
  RunConfig loaded = load_run_config(path);
  for (const auto& [section, kv] : loaded.values()) {
    for (const auto& [key, value] : kv) config->set(section, key, value);
  }
}

void write_sidecar(const std::string& out_path, const RunConfig& config,
                   const std::string& command) {
  write_run_metadata(out_path + ".meta.json", config, command);
}

std::vector<DistanceRecord> records_from_distance_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  const int id_col = table.column("utterance_id");
  if (id_col < 0) throw Error("distance csv lacks an utterance_id column: " + path);
  std::vector<DistanceRecord> records;
  for (const auto& row : table.rows) {
    DistanceRecord rec;
    rec.utterance_id = row[static_cast<std::size_t>(id_col)];
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      const std::string& name = table.header[c];
      const std::string& cell = row[c];
      if (static_cast<int>(c) == id_col || cell.empty()) continue;
      if (name == "error") {
        rec.error = cell;
        continue;
      }
      double value = 0.0;
      try {
        value = std::stod(cell);
      } catch (const std::exception&) {
        throw Error("distance csv: non-numeric value '" + cell + "' in column " + name);
      }
      if (name == "d_sg") {
        rec.d_sg = value;
      } else if (name.rfind("d_fe_", 0) == 0) {
        rec.d_fe[name.substr(5)] = value;
      } else if (name.rfind("d_ol_", 0) == 0) {
        rec.d_ol[name.substr(5)] = value;
      } else if (name == "mos") {
        rec.mos = value;
      } else {
        rec.metrics[name] = value;
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

/// Joins metric columns (pesq, stoi, ...) from an evaluation CSV into the
/// distance records by utterance id.
void join_metrics_csv(std::vector<DistanceRecord>* records, const std::string& path) {
  CsvTable table = read_csv(path);
  const int id_col = table.column("utterance_id");
  if (id_col < 0) throw Error("metrics csv lacks an utterance_id column: " + path);
  std::map<std::string, std::map<std::string, double>> by_id;
  for (const auto& row : table.rows) {
    const std::string& id = row[static_cast<std::size_t>(id_col)];
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (static_cast<int>(c) == id_col || row[c].empty()) continue;
      try {
        by_id[id][table.header[c]] = std::stod(row[c]);
      } catch (const std::exception&) {
        // Non-numeric columns (paths, labels) are not metrics; skip.
      }
    }
  }
  for (auto& rec : *records) {
    auto it = by_id.find(rec.utterance_id);
    if (it == by_id.end()) continue;
    for (const auto& [name, value] : it->second) {
      if (name == "mos") {
        rec.mos = value;
      } else {
        rec.metrics[name] = value;
      }
    }
  }
}

int cmd_manifest(const RunConfig& config, const std::string& out) {
  const std::string root = config.get_string("data", "root");
  const std::string layout = config.get_string("data", "layout", "voicebank");
  const std::string split = config.get_string("data", "split", "test");
  DatasetManifest manifest = build_manifest(root, parse_layout(layout), split);
  write_manifest(out, manifest);
  write_sidecar(out, config, "manifest");
  std::cout << "manifest: " << manifest.entries.size() << " pairs -> " << out << "\n";
  return 0;
}

int cmd_distances(const RunConfig& config, const std::string& manifest_path,
                  const std::string& out) {
  DatasetManifest manifest = read_manifest(manifest_path);
  auto backends = backends_from_config(config);
  BatchDistanceOptions options;
  options.reduction = reduction_from_config(config);
  options.stft = stft_from_config(config);
  options.num_threads = config.get_int("distances", "workers", 1);
  std::vector<Layer> layers;
  for (const std::string& l : config.get_list("distances", "layers")) {
    if (l == "fe") {
      layers.push_back(Layer::kFE);
    } else if (l == "ol") {
      layers.push_back(Layer::kOL);
    } else {
      throw ConfigError("config: [distances] layers entries must be fe or ol");
    }
  }
  if (layers.empty()) layers = {Layer::kFE, Layer::kOL};

  std::vector<DistanceRecord> records = batch_distances(manifest, backends, layers, options);
  std::vector<std::string> model_ids;
  for (const auto& b : backends) model_ids.push_back(to_string(b->model_id()));
  write_distance_csv(out, records, model_ids);
  write_sidecar(out, config, "distances");
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.error.empty() ? 0 : 1;
  std::cout << "distances: " << records.size() << " rows (" << failed
            << " failed) -> " << out << "\n";
  return 0;
}

int cmd_correlate(const RunConfig& config, const std::string& distances_path,
                  const std::string& metrics_path, const std::string& out_prefix,
                  const std::vector<std::string>& targets_flag,
                  const std::vector<std::string>& scatters) {
  std::vector<DistanceRecord> records = records_from_distance_csv(distances_path);
  if (!metrics_path.empty()) join_metrics_csv(&records, metrics_path);

  std::vector<std::string> targets = targets_flag;
  if (targets.empty()) {
    // Default: every metric present on any record, plus mos when present.
    std::set<std::string> found;
    bool any_mos = false;
    for (const auto& r : records) {
      for (const auto& [name, _] : r.metrics) found.insert(name);
      any_mos = any_mos || r.mos.has_value();
    }
    targets.assign(found.begin(), found.end());
    if (any_mos) targets.push_back("mos");
  }
  if (targets.empty()) {
    throw ConfigError("correlate: no targets; join a metrics csv or pass --target");
  }

  CorrelationReport report = correlation_report(records, targets);
  write_correlation_report(out_prefix, report);
  write_sidecar(out_prefix, config, "correlate");
  for (const std::string& pair : scatters) {
    const std::size_t colon = pair.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("correlate: --scatter wants <distance>:<target>, got '" + pair + "'");
    }
    export_scatter(records, pair.substr(0, colon), pair.substr(colon + 1),
                   out_prefix + "_" + pair.substr(0, colon) + "_vs_" +
                       pair.substr(colon + 1));
  }
  std::cout << "correlate: " << report.distance_names.size() << " x "
            << report.target_names.size() << " grid -> " << out_prefix
            << "_{spearman,pearson,n}.csv\n";
  return 0;
}

TrainingConfig training_from_config(const RunConfig& config) {
  TrainingConfig tc;
  tc.loss = config.get_string("training", "loss", tc.loss);
  tc.epochs = config.get_int("training", "epochs", tc.epochs);
  tc.learning_rate = config.get_double("training", "learning_rate", tc.learning_rate);
  tc.batch_size = config.get_int("training", "batch_size", tc.batch_size);
  tc.seed = static_cast<std::uint64_t>(config.get_int("training", "seed", 1234));
  tc.grad_clip = config.get_double("training", "grad_clip", tc.grad_clip);
  tc.net.recurrent_layers =
      config.get_int("training", "recurrent_layers", tc.net.recurrent_layers);
  tc.net.recurrent_hidden_size = config.get_int("training", "recurrent_hidden_size",
                                                tc.net.recurrent_hidden_size);
  tc.net.leaky_slope = config.get_double("training", "leaky_slope", tc.net.leaky_slope);
  tc.loss_options.stft = stft_from_config(config);
  tc.loss_options.sisdr_ceiling_db =
      config.get_double("training", "sisdr_ceiling_db", tc.loss_options.sisdr_ceiling_db);
  tc.net.input_dim = tc.loss_options.stft.num_bins();
  tc.net.output_dim = tc.loss_options.stft.num_bins();
  return tc;
}

int cmd_train(const RunConfig& config, const std::string& manifest_path,
              const std::string& valid_path, const std::string& out_dir) {
  DatasetManifest train_manifest = read_manifest(manifest_path);
  DatasetManifest valid_manifest =
      valid_path.empty() ? train_manifest : read_manifest(valid_path);

  TrainingConfig tc = training_from_config(config);
  std::string backend_model;
  parse_loss_kind(tc.loss, &backend_model);
  std::shared_ptr<const SSSRBackend> backend;
  if (!backend_model.empty()) {
    const std::string dir = config.get_string("backends", "checkpoint_dir", "");
    const std::string ref = dir.empty() ? "" : (fs::path(dir) / backend_model).string();
    backend = load_backend(backend_model, ref);
  }
  MetricRegistry registry = registry_from_config(config);

  fs::create_directories(out_dir);
  MaskNet model(tc.net, tc.seed);
  TrainingHooks hooks;
  hooks.on_epoch = [&](const Checkpoint& ckpt) {
    char name[64];
    std::snprintf(name, sizeof(name), "epoch_%03d.ckpt", ckpt.epoch);
    save_checkpoint((fs::path(out_dir) / name).string(), ckpt);
    std::cout << "epoch " << ckpt.epoch << ": train_loss=" << ckpt.train_loss
              << " valid(" << ckpt.validation_metric << ")=" << ckpt.validation_pesq
              << "\n";
  };
  std::vector<Checkpoint> history =
      train(train_manifest, valid_manifest, tc, &model, backend, &registry, hooks);

  const Checkpoint& best = select_checkpoint(history);
  model.parameters() = best.parameters;
  model.save((fs::path(out_dir) / "best_model.bin").string());
  const std::string log_path = (fs::path(out_dir) / "training_log.csv").string();
  write_training_log(log_path, history);
  write_sidecar((fs::path(out_dir) / "training").string(), config, "train");
  std::cout << "train: best epoch " << best.epoch << " ("
            << best.validation_metric << "=" << best.validation_pesq << ") -> "
            << out_dir << "\n";
  return 0;
}

int cmd_enhance(const RunConfig& config, const std::string& model_path,
                const std::string& in_wav, const std::string& manifest_path,
                const std::string& out) {
  MaskNet model = MaskNet::load(model_path);
  const StftParams params = stft_from_config(config);
  if (!in_wav.empty()) {
    TimeSignal noisy = load_audio(in_wav);
    TimeSignal est = enhance(model, noisy, params);
    save_audio(out, est, 32);
    std::cout << "enhance: " << in_wav << " -> " << out << "\n";
    return 0;
  }
  if (manifest_path.empty()) {
    throw ConfigError("enhance: need --in or --manifest");
  }
  DatasetManifest manifest = read_manifest(manifest_path);
  fs::create_directories(out);
  for (const auto& entry : manifest.entries) {
    UtterancePair pair = load_pair(entry);
    TimeSignal est = enhance(model, pair.noisy, params);
    save_audio((fs::path(out) / (entry.id + ".wav")).string(), est, 32);
  }
  write_sidecar((fs::path(out) / "enhance").string(), config, "enhance");
  std::cout << "enhance: " << manifest.entries.size() << " utterances -> " << out << "\n";
  return 0;
}

int cmd_evaluate(const RunConfig& config, const std::string& manifest_path,
                 const std::string& enhanced_dir, const std::string& out) {
  DatasetManifest manifest = read_manifest(manifest_path);
  MetricRegistry registry = registry_from_config(config);
  std::vector<EvaluationRow> rows;
  for (const auto& entry : manifest.entries) {
    UtterancePair pair = load_pair(entry);
    TimeSignal est = pair.noisy;  // default: score the noisy signal itself
    if (!enhanced_dir.empty()) {
      const std::string est_path =
          (fs::path(enhanced_dir) / (entry.id + ".wav")).string();
      est = load_audio(est_path);
    }
    rows.push_back(evaluate_utterance(registry, entry.id, pair.clean, est));
  }
  write_evaluation_csv(out, rows);
  write_sidecar(out, config, "evaluate");
  std::cout << "evaluate: " << rows.size() << " rows -> " << out << "\n";
  return 0;
}

int cmd_visualize(const RunConfig& config, const std::string& manifest_path,
                  const std::string& id, const std::string& out) {
  DatasetManifest manifest = read_manifest(manifest_path);
  const PairEntry* entry = nullptr;
  for (const auto& e : manifest.entries) {
    if (e.id == id) {
      entry = &e;
      break;
    }
  }
  if (entry == nullptr) {
    throw MissingInputError("visualize: utterance '" + id + "' not in manifest");
  }
  UtterancePair pair = load_pair(*entry);
  RenderOptions options;
  options.stft = stft_from_config(config);
  options.dump_permutations = true;
  auto backends = backends_from_config(config);
  std::vector<PanelImage> panels = render_panels(pair.clean, pair.noisy, backends, out, options);
  write_sidecar(out, config, "visualize");
  std::cout << "visualize: " << panels.size() << " panels -> " << out << "\n";
  return 0;
}

int cmd_synth(const RunConfig& config, const std::string& out_dir, int utterances,
              std::uint64_t seed, const std::string& noise,
              const std::vector<double>& snrs, double duration_s,
              const std::string& manifest_out) {
  SynthCorpusOptions options;
  options.noise = noise;
  if (!snrs.empty()) options.snrs_db = snrs;
  options.duration_s = duration_s;
  DatasetManifest manifest = write_synthetic_corpus(out_dir, utterances, options, seed);
  if (!manifest_out.empty()) {
    write_manifest(manifest_out, manifest);
    write_sidecar(manifest_out, config, "synth");
  }
  std::cout << "synth: " << manifest.entries.size() << " pairs -> " << out_dir << "\n";
  return 0;
}

int cmd_init_backend(const std::string& model, const std::string& out_dir,
                     std::uint64_t seed) {
  write_reference_checkpoint(out_dir, parse_model_id(model), seed);
  std::cout << "init-backend: " << model << " (seed " << seed << ") -> " << out_dir << "\n";
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"speech representation distances: analysis, training, evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string config_path;
  app.add_option("--config", config_path, "run configuration file (INI)");
  int workers = 0;
  app.add_option("--workers", workers, "cap on worker threads");

  RunConfig config;

  // manifest
  auto* manifest_cmd = app.add_subcommand("manifest", "scan a corpus into a manifest csv");
  std::string m_root, m_layout = "voicebank", m_split = "test", m_out = "manifest.csv";
  manifest_cmd->add_option("--root", m_root, "corpus root directory");
  manifest_cmd->add_option("--layout", m_layout, "voicebank | nisqa");
  manifest_cmd->add_option("--split", m_split, "train | valid | test");
  manifest_cmd->add_option("--out", m_out, "output csv path");

  // distances
  auto* distances_cmd = app.add_subcommand("distances", "distance table for a manifest");
  std::string d_manifest, d_out = "distances.csv";
  distances_cmd->add_option("--manifest", d_manifest, "manifest csv")->required();
  distances_cmd->add_option("--out", d_out, "output csv path");

  // correlate
  auto* correlate_cmd = app.add_subcommand("correlate", "correlation grids from csv tables");
  std::string c_distances, c_metrics, c_out = "correlation";
  std::vector<std::string> c_targets, c_scatters;
  correlate_cmd->add_option("--distances", c_distances, "distance csv")->required();
  correlate_cmd->add_option("--metrics", c_metrics, "evaluation csv to join by id");
  correlate_cmd->add_option("--out", c_out, "output path prefix");
  correlate_cmd->add_option("--target", c_targets, "target column (repeatable)");
  correlate_cmd->add_option("--scatter", c_scatters, "<distance>:<target> scatter export");

  // train
  auto* train_cmd = app.add_subcommand("train", "train the mask estimator");
  std::string t_manifest, t_valid, t_out = "run";
  int t_epochs = -1;
  std::string t_loss;
  train_cmd->add_option("--manifest", t_manifest, "training manifest csv")->required();
  train_cmd->add_option("--valid", t_valid, "validation manifest csv");
  train_cmd->add_option("--out", t_out, "output directory");
  train_cmd->add_option("--epochs", t_epochs, "override [training] epochs");
  train_cmd->add_option("--loss", t_loss, "override [training] loss");

  // enhance
  auto* enhance_cmd = app.add_subcommand("enhance", "run a trained model");
  std::string e_model, e_in, e_manifest, e_out = "enhanced";
  enhance_cmd->add_option("--model", e_model, "trained model file")->required();
  enhance_cmd->add_option("--in", e_in, "single noisy wav");
  enhance_cmd->add_option("--manifest", e_manifest, "manifest csv for batch mode");
  enhance_cmd->add_option("--out", e_out, "output wav (single) or directory (batch)");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "metric table for enhanced audio");
  std::string v_manifest, v_enhanced, v_out = "evaluation.csv";
  evaluate_cmd->add_option("--manifest", v_manifest, "manifest csv")->required();
  evaluate_cmd->add_option("--enhanced", v_enhanced,
                           "directory of <id>.wav estimates (default: score noisy)");
  evaluate_cmd->add_option("--out", v_out, "output csv path");

  // visualize
  auto* visualize_cmd = app.add_subcommand("visualize", "spectrogram + representation panels");
  std::string z_manifest, z_id, z_out = "panels.png";
  visualize_cmd->add_option("--manifest", z_manifest, "manifest csv")->required();
  visualize_cmd->add_option("--id", z_id, "utterance id")->required();
  visualize_cmd->add_option("--out", z_out, "output png path");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic voicebank-layout corpus");
  std::string s_out = "synth_corpus", s_noise = "white", s_manifest_out;
  int s_utterances = 10;
  std::uint64_t s_seed = 1234;
  double s_duration = 1.0;
  std::vector<double> s_snrs;
  synth_cmd->add_option("--out", s_out, "corpus root to create");
  synth_cmd->add_option("--utterances", s_utterances, "clean utterance count");
  synth_cmd->add_option("--seed", s_seed, "rng seed");
  synth_cmd->add_option("--noise", s_noise, "white | pink | tonal");
  synth_cmd->add_option("--snr", s_snrs, "SNR in dB (repeatable; default 0 5 10 15)");
  synth_cmd->add_option("--duration", s_duration, "seconds per utterance");
  synth_cmd->add_option("--manifest-out", s_manifest_out, "also write a manifest csv");

  // init-backend
  auto* init_cmd = app.add_subcommand("init-backend", "write a seeded reference checkpoint");
  std::string i_model = "hubert", i_out;
  std::uint64_t i_seed = 7;
  init_cmd->add_option("--model", i_model, "hubert | xlsr");
  init_cmd->add_option("--out", i_out, "checkpoint directory to create")->required();
  init_cmd->add_option("--seed", i_seed, "rng seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage problems are configuration errors unless CLI11 is just printing
    // help/version text.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    merge_config_file(&config, config_path);
    if (workers > 0) config.set("distances", "workers", std::to_string(workers));

    if (manifest_cmd->parsed()) {
      if (!m_root.empty()) config.set("data", "root", m_root);
      config.set("data", "layout", m_layout);
      config.set("data", "split", m_split);
      return cmd_manifest(config, m_out);
    }
    if (distances_cmd->parsed()) return cmd_distances(config, d_manifest, d_out);
    if (correlate_cmd->parsed()) {
      return cmd_correlate(config, c_distances, c_metrics, c_out, c_targets, c_scatters);
    }
    if (train_cmd->parsed()) {
      if (t_epochs >= 0) config.set("training", "epochs", std::to_string(t_epochs));
      if (!t_loss.empty()) config.set("training", "loss", t_loss);
      return cmd_train(config, t_manifest, t_valid, t_out);
    }
    if (enhance_cmd->parsed()) return cmd_enhance(config, e_model, e_in, e_manifest, e_out);
    if (evaluate_cmd->parsed()) return cmd_evaluate(config, v_manifest, v_enhanced, v_out);
    if (visualize_cmd->parsed()) return cmd_visualize(config, z_manifest, z_id, z_out);
    if (synth_cmd->parsed()) {
      return cmd_synth(config, s_out, s_utterances, s_seed, s_noise, s_snrs,
                       s_duration, s_manifest_out);
    }
    if (init_cmd->parsed()) return cmd_init_backend(i_model, i_out, i_seed);
    throw ConfigError("no command given");
  } catch (const ConfigError& e) {
    std::cerr << "srep: config error: " << e.what() << "\n";
    return 2;
  } catch (const MissingInputError& e) {
    std::cerr << "srep: missing input: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "srep: error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace
}  // namespace srep

int main(int argc, char** argv) { return srep::run(argc, argv); }
