// srep/losses.hpp

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

#ifndef SREP_LOSSES_HPP_
#define SREP_LOSSES_HPP_

#include "srep/distances.hpp"
#include "srep/sssr.hpp"
#include "srep/stft.hpp"
#include "srep/tape.hpp"

#include <functional>
#include <string>

namespace srep {

struct LossOptions {
  MseReduction reduction = MseReduction::kMean;
  StftParams stft;
  double sisdr_ceiling_db = 60.0;
};

// Graph builders: `est` is the estimated signal as an N x 1 tape var (leaf
// or downstream of mask parameters); `ref` is the fixed clean signal. Each
// returns a 1 x 1 loss var, differentiable w.r.t. everything upstream of
// `est`.

/// MSE between magnitude spectrograms of ref and est.
ad::Var loss_sg_graph(ad::Tape& tape, ad::Var est, const TimeSignal& ref,
                      const LossOptions& options = {});

/// MSE between FE (resp. OL) representations; the frozen backend propagates
/// gradients to its input only.
ad::Var loss_fe_graph(ad::Tape& tape, const SSSRBackend& backend, ad::Var est,
                      const TimeSignal& ref, const LossOptions& options = {});
ad::Var loss_ol_graph(ad::Tape& tape, const SSSRBackend& backend, ad::Var est,
                      const TimeSignal& ref, const LossOptions& options = {});

/// Negative SI-SDR with the same +/- ceiling as the metric.
ad::Var loss_sisdr_graph(ad::Tape& tape, ad::Var est, const TimeSignal& ref,
                         const LossOptions& options = {});

/// Differentiable-STOI plugin slot. Nothing is registered by default; the
/// stoi baseline is disabled until a plugin provides the graph.
using StoiLossGraph =
    std::function<ad::Var(ad::Tape&, ad::Var est, const TimeSignal& ref)>;
void register_stoi_loss(const std::string& plugin_name, StoiLossGraph graph);
void clear_stoi_loss();
bool stoi_loss_available();
std::string stoi_loss_name();

/// ConfigError when no plugin is registered.
ad::Var loss_stoi_graph(ad::Tape& tape, ad::Var est, const TimeSignal& ref);

/// Differentiable STFT of a tape-recorded signal, sharing the cached kernel
/// with the non-differentiable path. Returns the T x F_Hz magnitude.
ad::Var stft_magnitude_graph(ad::Tape& tape, ad::Var signal, const StftParams& params,
                             int sample_rate);

/// Resynthesis ŝ = istft(mask .* |X|, phase(X)) as a graph over the mask.
ad::Var masked_istft_graph(ad::Tape& tape, ad::Var mask, const Spectrogram& noisy_spec);

// Scalar conveniences matching the loss signatures used by evaluation code.
double loss_sg(const TimeSignal& ref, const TimeSignal& est, const LossOptions& options = {});
double loss_fe(const SSSRBackend& backend, const TimeSignal& ref, const TimeSignal& est,
               const LossOptions& options = {});
double loss_ol(const SSSRBackend& backend, const TimeSignal& ref, const TimeSignal& est,
               const LossOptions& options = {});
double loss_sisdr(const TimeSignal& ref, const TimeSignal& est,
                  const LossOptions& options = {});
double loss_stoi(const TimeSignal& ref, const TimeSignal& est);

}  // namespace srep

#endif  // SREP_LOSSES_HPP_
