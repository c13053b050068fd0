// srep/training.hpp

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

#ifndef SREP_TRAINING_HPP_
#define SREP_TRAINING_HPP_

#include "srep/losses.hpp"
#include "srep/manifest.hpp"
#include "srep/masknet.hpp"
#include "srep/metrics.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace srep {

enum class LossKind { kSg, kFe, kOl, kSisdr, kStoi };

/// "sg" | "fe_hubert" | "ol_hubert" | "fe_xlsr" | "ol_xlsr" | "sisdr" |
/// "stoi". Representation losses return the backend model id in *model_id.
LossKind parse_loss_kind(const std::string& name, std::string* model_id);
std::string to_string(LossKind kind, const std::string& model_id);

struct TrainingConfig {
  std::string loss = "sg";
  int epochs = 50;
  double learning_rate = 0.001;
  int batch_size = 1;  // utterances per optimizer step
  std::uint64_t seed = 0;
  double grad_clip = 0.0;  // L2 threshold per step; 0 disables
  MaskNetConfig net;
  LossOptions loss_options;

  std::uint64_t hash() const;
};

struct Checkpoint {
  int epoch = 0;  // 1-based
  std::map<std::string, Mat> parameters;
  double validation_pesq = 0.0;
  std::string validation_metric;  // "pesq", or the recorded fallback name
  double train_loss = 0.0;
  std::uint64_t config_hash = 0;
};

struct TrainingHooks {
  /// Called once per epoch after validation; useful for logging.
  std::function<void(const Checkpoint&)> on_epoch;
};

/// Adam over the mask-net parameters, one utterance per batch element,
/// seed-deterministic shuffling, one checkpoint per epoch. Representation
/// losses require `backend`; the PESQ adapter drives checkpoint selection
/// when present, otherwise the negative validation loss stands in (recorded
/// as such in validation_metric). A non-finite loss aborts with the epoch
/// and utterance identified.
std::vector<Checkpoint> train(const DatasetManifest& train_manifest,
                              const DatasetManifest& valid_manifest,
                              const TrainingConfig& config, MaskNet* model,
                              std::shared_ptr<const SSSRBackend> backend = nullptr,
                              const MetricRegistry* registry = nullptr,
                              const TrainingHooks& hooks = {});

/// Argmax of validation_pesq; ties go to the earliest epoch.
const Checkpoint& select_checkpoint(const std::vector<Checkpoint>& checkpoints);

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

/// CSV: epoch, train_loss, valid_pesq, validation_metric.
void write_training_log(const std::string& path, const std::vector<Checkpoint>& checkpoints);

}  // namespace srep

#endif  // SREP_TRAINING_HPP_
