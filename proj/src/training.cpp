// srep/training.cpp

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

#include "srep/training.hpp"

#include "srep/csv.hpp"
#include "srep/tensor_archive.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace srep {

LossKind parse_loss_kind(const std::string& name, std::string* model_id) {
  model_id->clear();
  if (name == "sg") return LossKind::kSg;
  if (name == "sisdr") return LossKind::kSisdr;
  if (name == "stoi") return LossKind::kStoi;
  if (name.rfind("fe_", 0) == 0) {
    *model_id = name.substr(3);
    parse_model_id(*model_id);  // validates
    return LossKind::kFe;
  }
  if (name.rfind("ol_", 0) == 0) {
    *model_id = name.substr(3);
    parse_model_id(*model_id);
    return LossKind::kOl;
  }
  throw ConfigError("training: unknown loss '" + name + "'");
}

std::string to_string(LossKind kind, const std::string& model_id) {
  switch (kind) {
    case LossKind::kSg: return "sg";
    case LossKind::kSisdr: return "sisdr";
    case LossKind::kStoi: return "stoi";
    case LossKind::kFe: return "fe_" + model_id;
    case LossKind::kOl: return "ol_" + model_id;
  }
  return "sg";
}

std::uint64_t TrainingConfig::hash() const {
  std::ostringstream os;
  os << loss << '|' << epochs << '|' << learning_rate << '|' << batch_size << '|'
     << seed << '|' << grad_clip << '|' << net.input_dim << '|' << net.output_dim
     << '|' << net.recurrent_layers << '|' << net.recurrent_hidden_size << '|'
     << net.leaky_slope << '|'
     << (loss_options.reduction == MseReduction::kMean ? "mean" : "sum") << '|'
     << loss_options.stft.fft_size << '|' << loss_options.stft.window_length_ms << '|'
     << loss_options.stft.hop_ms << '|' << loss_options.sisdr_ceiling_db;
  return fnv1a(os.str());
}

namespace {

/// Adam with the usual bias correction; state per parameter tensor.
class Adam {
 public:
  Adam(double lr, std::map<std::string, Mat>* params) : lr_(lr), params_(params) {
    for (const auto& [name, m] : *params_) {
      m_[name] = Mat::Zero(m.rows(), m.cols());
      v_[name] = Mat::Zero(m.rows(), m.cols());
    }
  }

  void step(const std::map<std::string, Mat>& grads) {
    ++t_;
    const double bc1 = 1.0 - std::pow(kBeta1, t_);
    const double bc2 = 1.0 - std::pow(kBeta2, t_);
    for (auto& [name, param] : *params_) {
      auto it = grads.find(name);
      if (it == grads.end()) continue;
      const Mat& g = it->second;
      Mat& m = m_[name];
      Mat& v = v_[name];
      m = kBeta1 * m + (1.0 - kBeta1) * g;
      v = (kBeta2 * v.array() + (1.0 - kBeta2) * g.array().square()).matrix();
      const Mat m_hat = m / bc1;
      const Mat v_hat = v / bc2;
      param.array() -= lr_ * m_hat.array() / (v_hat.array().sqrt() + kEps);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  double lr_;
  int t_ = 0;
  std::map<std::string, Mat>* params_;
  std::map<std::string, Mat> m_, v_;
};

struct ResolvedLoss {
  LossKind kind = LossKind::kSg;
  std::string model_id;
};

/// Full per-utterance graph: params -> mask -> resynthesis -> loss.
ad::Var utterance_loss_graph(ad::Tape& tape, const MaskNet& model,
                             const UtterancePair& pair, const ResolvedLoss& loss,
                             const SSSRBackend* backend, const LossOptions& options,
                             std::map<std::string, ad::Var>* param_vars) {
  const Spectrogram noisy_spec = stft(pair.noisy, options.stft);
  ad::Var mask = model.forward_graph(tape, noisy_spec.magnitude, param_vars);
  ad::Var est = masked_istft_graph(tape, mask, noisy_spec);
  switch (loss.kind) {
    case LossKind::kSg:
      return loss_sg_graph(tape, est, pair.clean, options);
    case LossKind::kFe:
      return loss_fe_graph(tape, *backend, est, pair.clean, options);
    case LossKind::kOl:
      return loss_ol_graph(tape, *backend, est, pair.clean, options);
    case LossKind::kSisdr:
      return loss_sisdr_graph(tape, est, pair.clean, options);
    case LossKind::kStoi:
      return loss_stoi_graph(tape, est, pair.clean);
  }
  throw Error("training: unreachable loss kind");
}

/// Deterministic Fisher-Yates keyed by (seed, epoch).
void shuffle_order(std::vector<std::size_t>* order, std::uint64_t seed, int epoch) {
  SplitMix64 rng(seed ^ fnv1a("epoch-" + std::to_string(epoch)));
  for (std::size_t i = order->size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
    std::swap((*order)[i - 1], (*order)[j]);
  }
}

}  // namespace

std::vector<Checkpoint> train(const DatasetManifest& train_manifest,
                              const DatasetManifest& valid_manifest,
                              const TrainingConfig& config, MaskNet* model,
                              std::shared_ptr<const SSSRBackend> backend,
                              const MetricRegistry* registry, const TrainingHooks& hooks) {
  if (train_manifest.entries.empty() || valid_manifest.entries.empty()) {
    throw MissingInputError("training: empty train or validation manifest");
  }
  if (config.epochs < 1) throw ConfigError("training: epochs must be >= 1");
  if (config.learning_rate <= 0.0) throw ConfigError("training: learning_rate must be > 0");
  if (config.batch_size < 1) throw ConfigError("training: batch_size must be >= 1");

  ResolvedLoss loss;
  loss.kind = parse_loss_kind(config.loss, &loss.model_id);
  if ((loss.kind == LossKind::kFe || loss.kind == LossKind::kOl)) {
    if (backend == nullptr) {
      throw ConfigError("training: loss '" + config.loss + "' needs a loaded backend");
    }
    if (to_string(backend->model_id()) != loss.model_id) {
      throw ConfigError("training: loss '" + config.loss + "' does not match backend '" +
                        to_string(backend->model_id()) + "'");
    }
  }
  if (loss.kind == LossKind::kStoi && !stoi_loss_available()) {
    throw ConfigError("training: stoi loss selected but no plugin registered");
  }
  const bool use_pesq = registry != nullptr && registry->has("pesq");

  std::vector<PairEntry> train_entries = train_manifest.entries;
  std::sort(train_entries.begin(), train_entries.end(),
            [](const PairEntry& a, const PairEntry& b) { return a.id < b.id; });
  std::vector<PairEntry> valid_entries = valid_manifest.entries;
  std::sort(valid_entries.begin(), valid_entries.end(),
            [](const PairEntry& a, const PairEntry& b) { return a.id < b.id; });

  const std::uint64_t config_hash = config.hash();
  Adam optimizer(config.learning_rate, &model->parameters());
  std::vector<Checkpoint> checkpoints;

  std::vector<std::size_t> order(train_entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_order(&order, config.seed, epoch);
    double epoch_loss_sum = 0.0;
    int epoch_loss_count = 0;

    std::map<std::string, Mat> grad_acc;
    int in_batch = 0;
    auto flush_batch = [&] {
      if (in_batch == 0) return;
      if (in_batch > 1) {
        for (auto& [name, g] : grad_acc) g /= static_cast<double>(in_batch);
      }
      if (config.grad_clip > 0.0) {
        double sq = 0.0;
        for (const auto& [name, g] : grad_acc) sq += g.squaredNorm();
        const double norm = std::sqrt(sq);
        if (norm > config.grad_clip) {
          const double scale = config.grad_clip / norm;
          for (auto& [name, g] : grad_acc) g *= scale;
        }
      }
      optimizer.step(grad_acc);
      grad_acc.clear();
      in_batch = 0;
    };

    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const PairEntry& entry = train_entries[order[pos]];
      const UtterancePair pair = load_pair(entry);
      ad::Tape tape;
      std::map<std::string, ad::Var> param_vars;
      ad::Var loss_var = utterance_loss_graph(tape, *model, pair, loss, backend.get(),
                                              config.loss_options, &param_vars);
      const double loss_value = loss_var.scalar();
      if (!std::isfinite(loss_value)) {
        throw Error("training diverged: non-finite loss at epoch " +
                    std::to_string(epoch) + ", utterance '" + entry.id + "'");
      }
      epoch_loss_sum += loss_value;
      ++epoch_loss_count;
      tape.backward(loss_var);
      for (const auto& [name, var] : param_vars) {
        auto it = grad_acc.find(name);
        if (it == grad_acc.end()) {
          grad_acc[name] = var.grad();
        } else {
          it->second += var.grad();
        }
      }
      ++in_batch;
      if (in_batch == config.batch_size) flush_batch();
    }
    flush_batch();

    // Validation: mean PESQ via the adapter when present, otherwise the
    // negative mean validation loss as a recorded stand-in.
    double valid_score = 0.0;
    int valid_count = 0;
    for (const PairEntry& entry : valid_entries) {
      const UtterancePair pair = load_pair(entry);
      if (use_pesq) {
        const TimeSignal enhanced = enhance(*model, pair.noisy, config.loss_options.stft);
        if (auto score = pesq_score(*registry, pair.clean, enhanced)) {
          valid_score += *score;
          ++valid_count;
        }
      } else {
        ad::Tape tape;
        ad::Var loss_var = utterance_loss_graph(tape, *model, pair, loss, backend.get(),
                                                config.loss_options, nullptr);
        valid_score -= loss_var.scalar();
        ++valid_count;
      }
    }
    if (valid_count == 0) {
      throw Error("training: validation produced no scores at epoch " +
                  std::to_string(epoch));
    }

    Checkpoint checkpoint;
    checkpoint.epoch = epoch;
    checkpoint.parameters = model->parameters();
    checkpoint.validation_pesq = valid_score / valid_count;
    checkpoint.validation_metric = use_pesq ? "pesq" : "neg_valid_loss";
    checkpoint.train_loss = epoch_loss_sum / std::max(1, epoch_loss_count);
    checkpoint.config_hash = config_hash;
    checkpoints.push_back(checkpoint);
    if (hooks.on_epoch) hooks.on_epoch(checkpoints.back());
  }
  return checkpoints;
}

const Checkpoint& select_checkpoint(const std::vector<Checkpoint>& checkpoints) {
  if (checkpoints.empty()) throw Error("select_checkpoint: no checkpoints");
  std::size_t best = 0;
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    // Strict inequality keeps the earliest epoch on ties.
    if (checkpoints[i].validation_pesq > checkpoints[best].validation_pesq) best = i;
  }
  return checkpoints[best];
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  TensorArchive archive;
  for (const auto& [name, m] : checkpoint.parameters) archive.put("param." + name, m);
  // The hash needs all 64 bits, which one double cannot carry exactly.
  Mat meta(1, 5);
  meta << checkpoint.epoch, checkpoint.validation_pesq,
      static_cast<double>(checkpoint.config_hash >> 32),
      static_cast<double>(checkpoint.config_hash & 0xffffffffULL), checkpoint.train_loss;
  archive.put("__meta", meta);
  Mat metric_name(1, static_cast<Eigen::Index>(checkpoint.validation_metric.size()));
  for (std::size_t i = 0; i < checkpoint.validation_metric.size(); ++i) {
    metric_name(0, static_cast<Eigen::Index>(i)) =
        static_cast<double>(checkpoint.validation_metric[i]);
  }
  archive.put("__metric_name", metric_name);
  archive.save(path);
}

Checkpoint load_checkpoint(const std::string& path) {
  TensorArchive archive = TensorArchive::load(path);
  Checkpoint checkpoint;
  const Mat& meta = archive.get("__meta");
  if (meta.rows() != 1 || meta.cols() != 5) throw Error("checkpoint: corrupt meta");
  checkpoint.epoch = static_cast<int>(meta(0, 0));
  checkpoint.validation_pesq = meta(0, 1);
  checkpoint.config_hash = (static_cast<std::uint64_t>(meta(0, 2)) << 32) |
                           static_cast<std::uint64_t>(meta(0, 3));
  checkpoint.train_loss = meta(0, 4);
  const Mat& metric_name = archive.get("__metric_name");
  for (Eigen::Index i = 0; i < metric_name.cols(); ++i) {
    checkpoint.validation_metric += static_cast<char>(metric_name(0, i));
  }
  for (const std::string& name : archive.names()) {
    if (name.rfind("param.", 0) == 0) {
      checkpoint.parameters[name.substr(6)] = archive.get(name);
    }
  }
  return checkpoint;
}

void write_training_log(const std::string& path,
                        const std::vector<Checkpoint>& checkpoints) {
  CsvTable table;
  table.header = {"epoch", "train_loss", "valid_pesq", "validation_metric"};
  for (const Checkpoint& c : checkpoints) {
    table.rows.push_back({std::to_string(c.epoch), format_double(c.train_loss),
                          format_double(c.validation_pesq), c.validation_metric});
  }
  write_csv(path, table);
}

}  // namespace srep
