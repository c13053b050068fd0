// srep/sssr.hpp

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

#ifndef SREP_SSSR_HPP_
#define SREP_SSSR_HPP_

#include "srep/tape.hpp"
#include "srep/tensor_archive.hpp"
#include "srep/wav.hpp"

#include <memory>
#include <string>
#include <vector>

namespace srep {

enum class ModelId { kHubert, kXlsr };
enum class Layer { kFE, kOL };

ModelId parse_model_id(const std::string& s);  // "hubert" | "xlsr"
std::string to_string(ModelId id);
std::string to_string(Layer layer);

/// One extracted representation, frames as rows.
struct SSSRRepresentation {
  Mat values;  // T x F
  ModelId model_id = ModelId::kHubert;
  Layer layer = Layer::kFE;

  int frames() const { return static_cast<int>(values.rows()); }
  int channels() const { return static_cast<int>(values.cols()); }
};

struct ConvLayerSpec {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 0;
  int stride = 0;
};

/// Frozen feature extractor: a strided 1-d conv stack (the feature encoder,
/// 512 output channels) followed by a projection and a pre-norm transformer
/// encoder (the output layer, 768 or 1024 channels). Weights come from a
/// checkpoint directory and are never mutated; inference is deterministic.
///
/// A checkpoint is a directory holding sssr_meta.json (architecture) and
/// sssr_weights.bin (TensorArchive). The conv stack runs without padding, so
/// the frame count is determined solely by the input length.
class SSSRBackend {
 public:
  ModelId model_id() const { return model_id_; }
  const std::string& checkpoint_ref() const { return checkpoint_ref_; }
  int fe_channels() const;                       // 512
  int ol_channels() const { return ol_dim_; }    // 768 hubert, 1024 xlsr
  int downsample_factor() const;                 // product of conv strides
  int min_input_samples() const;                 // receptive field of one frame
  int num_frames(int input_samples) const;

  /// FNV-1a over every weight tensor, in name order. Training must leave
  /// this unchanged (the backend is frozen).
  std::uint64_t parameter_checksum() const;

  // Differentiable graphs. `samples` is N x 1; `fe` is T x 512. Weights are
  // recorded as tape constants, so gradients pass through but never into
  // them.
  ad::Var fe_graph(ad::Tape& tape, ad::Var samples) const;
  ad::Var ol_graph(ad::Tape& tape, ad::Var fe) const;

  // Value-only paths (same graphs evaluated over constants).
  Mat fe(const Vec& samples) const;
  Mat ol_from_fe(const Mat& fe) const;

  static std::shared_ptr<const SSSRBackend> load(const std::string& model_id,
                                                 const std::string& checkpoint_ref);

 private:
  SSSRBackend() = default;

  ModelId model_id_ = ModelId::kHubert;
  std::string checkpoint_ref_;
  std::vector<ConvLayerSpec> conv_;
  int ol_dim_ = 0;
  int ol_layers_ = 0;
  int ol_heads_ = 0;
  int ol_ffn_dim_ = 0;
  TensorArchive weights_;
};

SSSRRepresentation extract_fe(const SSSRBackend& backend, const TimeSignal& sig);
SSSRRepresentation extract_ol(const SSSRBackend& backend, const TimeSignal& sig);

/// model_id: "hubert" or "xlsr"; checkpoint_ref: checkpoint directory.
/// Errors: unknown model id, missing/corrupt checkpoint, id mismatch.
std::shared_ptr<const SSSRBackend> load_backend(const std::string& model_id,
                                                const std::string& checkpoint_ref);

/// Writes a seeded reference checkpoint (desk-scale depth, full channel
/// widths: FE 512, OL 768/1024) into `dir`. Equal seeds produce identical
/// checkpoints.
void write_reference_checkpoint(const std::string& dir, ModelId model_id,
                                std::uint64_t seed);

}  // namespace srep

#endif  // SREP_SSSR_HPP_
