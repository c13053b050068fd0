// srep/losses.cpp

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

#include "srep/losses.hpp"

#include <cmath>
#include <mutex>

namespace srep {

namespace {

void check_equal_length(ad::Var est, const TimeSignal& ref, const char* loss) {
  if (est.cols() != 1) throw Error(std::string(loss) + ": est must be N x 1");
  if (est.rows() != ref.length()) {
    throw Error(std::string(loss) + ": est/ref length mismatch");
  }
  if (ref.sample_rate != 16000) {
    throw Error(std::string(loss) + ": expected 16 kHz reference");
  }
}

/// Representations of ref and est may disagree by a frame at the edge; both
/// sides are cut to the shorter, mirroring representation_distance.
ad::Var truncate_rows_to(ad::Var v, int rows) {
  if (static_cast<int>(v.rows()) == rows) return v;
  // Row slice via transpose + col slice keeps the op set small.
  return ad::transpose(ad::slice_cols(ad::transpose(v), 0, rows));
}

}  // namespace

ad::Var stft_magnitude_graph(ad::Tape& tape, ad::Var signal, const StftParams& params,
                             int sample_rate) {
  if (signal.cols() != 1) throw Error("stft graph: signal must be N x 1");
  const StftKernel& kernel = stft_kernel(params, sample_rate);
  const Eigen::ArrayXXi idx = frame_indices(signal.rows(), kernel);
  const Eigen::ArrayXXi cols_idx = Eigen::ArrayXXi::Zero(idx.rows(), idx.cols());
  // Signal is a column; gather wants (row, col) pairs.
  ad::Var frames = ad::gather(signal, idx, cols_idx);
  ad::Var re = ad::matmul(frames, tape.constant(kernel.fwd_re));
  ad::Var im = ad::matmul(frames, tape.constant(kernel.fwd_im));
  return ad::magnitude(re, im);
}

ad::Var masked_istft_graph(ad::Tape& tape, ad::Var mask, const Spectrogram& noisy_spec) {
  if (mask.rows() != noisy_spec.magnitude.rows() ||
      mask.cols() != noisy_spec.magnitude.cols()) {
    throw Error("masked istft: mask/spectrogram shape mismatch");
  }
  const StftKernel& kernel = stft_kernel(noisy_spec.params, noisy_spec.sample_rate);
  ad::Var enhanced_mag = ad::mul(mask, tape.constant(noisy_spec.magnitude));
  const Mat cos_phase = noisy_spec.phase.array().cos().matrix();
  const Mat sin_phase = noisy_spec.phase.array().sin().matrix();
  ad::Var re = ad::mul(enhanced_mag, tape.constant(cos_phase));
  ad::Var im = ad::mul(enhanced_mag, tape.constant(sin_phase));
  ad::Var time_frames = ad::add(ad::matmul(re, tape.constant(kernel.inv_re)),
                                ad::matmul(im, tape.constant(kernel.inv_im)));
  return ad::overlap_add_rows(time_frames, kernel.window_fn, kernel.offset, kernel.hop,
                              kernel.fft_size / 2, noisy_spec.origin_length);
}

ad::Var loss_sg_graph(ad::Tape& tape, ad::Var est, const TimeSignal& ref,
                      const LossOptions& options) {
  check_equal_length(est, ref, "loss_sg");
  ad::Var est_mag = stft_magnitude_graph(tape, est, options.stft, ref.sample_rate);
  const Mat ref_mag = stft(ref, options.stft).magnitude;
  return ad::mse(est_mag, tape.constant(ref_mag),
                 options.reduction == MseReduction::kMean);
}

namespace {

ad::Var representation_loss(ad::Tape& tape, const SSSRBackend& backend, Layer layer,
                            ad::Var est, const TimeSignal& ref, const LossOptions& options,
                            const char* name) {
  check_equal_length(est, ref, name);
  ad::Var est_fe = backend.fe_graph(tape, est);
  ad::Var est_rep = layer == Layer::kFE ? est_fe : backend.ol_graph(tape, est_fe);
  Mat ref_rep = layer == Layer::kFE
                    ? backend.fe(ref.samples)
                    : backend.ol_from_fe(backend.fe(ref.samples));
  const int gap = std::abs(static_cast<int>(est_rep.rows() - ref_rep.rows()));
  if (gap > 2) throw Error(std::string(name) + ": frame counts differ by > 2");
  const int frames = static_cast<int>(std::min(est_rep.rows(), ref_rep.rows()));
  est_rep = truncate_rows_to(est_rep, frames);
  ref_rep.conservativeResize(frames, Eigen::NoChange);
  return ad::mse(est_rep, tape.constant(ref_rep),
                 options.reduction == MseReduction::kMean);
}

}  // namespace

ad::Var loss_fe_graph(ad::Tape& tape, const SSSRBackend& backend, ad::Var est,
                      const TimeSignal& ref, const LossOptions& options) {
  return representation_loss(tape, backend, Layer::kFE, est, ref, options, "loss_fe");
}

ad::Var loss_ol_graph(ad::Tape& tape, const SSSRBackend& backend, ad::Var est,
                      const TimeSignal& ref, const LossOptions& options) {
  return representation_loss(tape, backend, Layer::kOL, est, ref, options, "loss_ol");
}

ad::Var loss_sisdr_graph(ad::Tape& tape, ad::Var est, const TimeSignal& ref,
                         const LossOptions& options) {
  check_equal_length(est, ref, "loss_sisdr");
  const double ref_energy = ref.samples.squaredNorm();
  if (ref_energy == 0.0) throw Error("loss_sisdr: all-zero reference");
  ad::Var ref_c = tape.constant(ref.samples);

  ad::Var alpha = ad::scale(ad::dot(est, ref_c), 1.0 / ref_energy);
  ad::Var target = ad::matmul(ref_c, alpha);  // N x 1 times 1 x 1
  ad::Var residual = ad::sub(est, target);
  ad::Var target_energy = ad::dot(target, target);
  ad::Var residual_energy = ad::dot(residual, residual);
  // Relative epsilon keeps the log finite at est = ref; it moves the dB
  // value by under 1e-6 anywhere below the ceiling.
  const double eps = 1e-12 * ref_energy + 1e-300;
  ad::Var db = ad::scale(ad::sub(ad::log_(ad::add_scalar(target_energy, eps)),
                                 ad::log_(ad::add_scalar(residual_energy, eps))),
                         10.0 / std::log(10.0));
  const double c = options.sisdr_ceiling_db;
  // loss = -clamp(db, -c, +c) = clamp_max(-clamp_max(db, c), c)
  return ad::clamp_max(ad::scale(ad::clamp_max(db, c), -1.0), c);
}

namespace {

std::mutex g_stoi_mutex;
StoiLossGraph g_stoi_graph;
std::string g_stoi_name;

}  // namespace

void register_stoi_loss(const std::string& plugin_name, StoiLossGraph graph) {
  std::lock_guard<std::mutex> lock(g_stoi_mutex);
  g_stoi_graph = std::move(graph);
  g_stoi_name = plugin_name;
}

void clear_stoi_loss() {
  std::lock_guard<std::mutex> lock(g_stoi_mutex);
  g_stoi_graph = nullptr;
  g_stoi_name.clear();
}

bool stoi_loss_available() {
  std::lock_guard<std::mutex> lock(g_stoi_mutex);
  return static_cast<bool>(g_stoi_graph);
}

std::string stoi_loss_name() {
  std::lock_guard<std::mutex> lock(g_stoi_mutex);
  return g_stoi_name;
}

ad::Var loss_stoi_graph(ad::Tape& tape, ad::Var est, const TimeSignal& ref) {
  StoiLossGraph graph;
  {
    std::lock_guard<std::mutex> lock(g_stoi_mutex);
    graph = g_stoi_graph;
  }
  if (!graph) {
    throw ConfigError(
        "loss_stoi: no differentiable-STOI plugin registered; this baseline is "
        "disabled");
  }
  check_equal_length(est, ref, "loss_stoi");
  return graph(tape, est, ref);
}

namespace {

double scalar_loss(const TimeSignal& ref, const TimeSignal& est,
                   const std::function<ad::Var(ad::Tape&, ad::Var)>& build) {
  if (ref.length() != est.length()) throw Error("loss: length mismatch");
  ad::Tape tape;
  ad::Var est_var = tape.constant(est.samples);
  return build(tape, est_var).scalar();
}

}  // namespace

double loss_sg(const TimeSignal& ref, const TimeSignal& est, const LossOptions& options) {
  return scalar_loss(ref, est, [&](ad::Tape& t, ad::Var e) {
    return loss_sg_graph(t, e, ref, options);
  });
}

double loss_fe(const SSSRBackend& backend, const TimeSignal& ref, const TimeSignal& est,
               const LossOptions& options) {
  return scalar_loss(ref, est, [&](ad::Tape& t, ad::Var e) {
    return loss_fe_graph(t, backend, e, ref, options);
  });
}

double loss_ol(const SSSRBackend& backend, const TimeSignal& ref, const TimeSignal& est,
               const LossOptions& options) {
  return scalar_loss(ref, est, [&](ad::Tape& t, ad::Var e) {
    return loss_ol_graph(t, backend, e, ref, options);
  });
}

double loss_sisdr(const TimeSignal& ref, const TimeSignal& est, const LossOptions& options) {
  return scalar_loss(ref, est, [&](ad::Tape& t, ad::Var e) {
    return loss_sisdr_graph(t, e, ref, options);
  });
}

double loss_stoi(const TimeSignal& ref, const TimeSignal& est) {
  return scalar_loss(ref, est, [&](ad::Tape& t, ad::Var e) {
    return loss_stoi_graph(t, e, ref);
  });
}

}  // namespace srep
