// srep/masknet.cpp

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

#include "srep/masknet.hpp"

#include "srep/tensor_archive.hpp"

#include <cmath>

namespace srep {

namespace {

Mat uniform_init(SplitMix64& rng, int rows, int cols, double bound) {
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      m(r, c) = (2.0 * rng.next_double() - 1.0) * bound;
    }
  }
  return m;
}

/// One LSTM direction over the rows of `input` (T x D). Returns T x H.
/// Weights follow the i, f, g, o gate order packed along the 4H axis.
ad::Var lstm_direction(ad::Tape& tape, ad::Var input, ad::Var w, ad::Var u, ad::Var b,
                       int hidden) {
  const int frames = static_cast<int>(input.rows());
  ad::Var h = tape.constant(Mat::Zero(1, hidden));
  ad::Var c = tape.constant(Mat::Zero(1, hidden));
  std::vector<ad::Var> outputs;
  outputs.reserve(static_cast<std::size_t>(frames));
  for (int t = 0; t < frames; ++t) {
    ad::Var xt = ad::row(input, t);
    ad::Var z = ad::add(ad::add(ad::matmul_t(xt, w), ad::matmul_t(h, u)), b);
    ad::Var i = ad::sigmoid(ad::slice_cols(z, 0, hidden));
    ad::Var f = ad::sigmoid(ad::slice_cols(z, hidden, hidden));
    ad::Var g = ad::tanh_(ad::slice_cols(z, 2 * hidden, hidden));
    ad::Var o = ad::sigmoid(ad::slice_cols(z, 3 * hidden, hidden));
    c = ad::add(ad::mul(f, c), ad::mul(i, g));
    h = ad::mul(o, ad::tanh_(c));
    outputs.push_back(h);
  }
  return ad::stack_rows(outputs);
}

}  // namespace

MaskNet::MaskNet(MaskNetConfig config, std::uint64_t seed)
    : config_(config), seed_(seed) {
  if (config_.input_dim <= 0 || config_.output_dim <= 0 ||
      config_.recurrent_layers <= 0 || config_.recurrent_hidden_size <= 0) {
    throw ConfigError("masknet: non-positive dimension in config");
  }
  SplitMix64 rng(seed ^ fnv1a("masknet-init"));
  const int hidden = config_.recurrent_hidden_size;
  for (int l = 0; l < config_.recurrent_layers; ++l) {
    const int in_dim = l == 0 ? config_.input_dim : 2 * hidden;
    const double bound = std::sqrt(1.0 / in_dim);
    const double rbound = std::sqrt(1.0 / hidden);
    for (const char* dir : {"fwd", "bwd"}) {
      const std::string p = "lstm" + std::to_string(l) + "." + dir;
      params_[p + ".w"] = uniform_init(rng, 4 * hidden, in_dim, bound);
      params_[p + ".u"] = uniform_init(rng, 4 * hidden, hidden, rbound);
      params_[p + ".b"] = Mat::Zero(1, 4 * hidden);
    }
  }
  const int width = config_.affine_width();
  params_["affine1.weight"] =
      uniform_init(rng, width, width, std::sqrt(1.0 / width));
  params_["affine1.bias"] = Mat::Zero(1, width);
  params_["affine2.weight"] =
      uniform_init(rng, config_.output_dim, width, std::sqrt(1.0 / width));
  params_["affine2.bias"] = Mat::Zero(1, config_.output_dim);
}

std::uint64_t MaskNet::parameter_checksum() const {
  std::uint64_t h = fnv1a("masknet-params");
  for (const auto& [name, m] : params_) {
    h = fnv1a(name, h);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double v = m(r, c);
        h = fnv1a(&v, sizeof(v), h);
      }
    }
  }
  return h;
}

ad::Var MaskNet::forward_graph(ad::Tape& tape, const Mat& noisy_mag,
                               std::map<std::string, ad::Var>* param_vars) const {
  if (noisy_mag.rows() < 1 || noisy_mag.cols() != config_.input_dim) {
    throw Error("masknet: input must be T x " + std::to_string(config_.input_dim));
  }
  if (!noisy_mag.allFinite()) throw Error("masknet: non-finite input");

  std::map<std::string, ad::Var> vars;
  for (const auto& [name, m] : params_) vars[name] = tape.leaf(m);
  if (param_vars != nullptr) *param_vars = vars;

  ad::Var x = tape.constant(noisy_mag);
  const int hidden = config_.recurrent_hidden_size;
  for (int l = 0; l < config_.recurrent_layers; ++l) {
    const std::string fwd = "lstm" + std::to_string(l) + ".fwd";
    const std::string bwd = "lstm" + std::to_string(l) + ".bwd";
    ad::Var forward =
        lstm_direction(tape, x, vars[fwd + ".w"], vars[fwd + ".u"], vars[fwd + ".b"], hidden);
    ad::Var backward = ad::reverse_rows(lstm_direction(
        tape, ad::reverse_rows(x), vars[bwd + ".w"], vars[bwd + ".u"], vars[bwd + ".b"],
        hidden));
    x = ad::concat_cols({forward, backward});
  }
  ad::Var a1 = ad::add_rowvec(ad::matmul_t(x, vars["affine1.weight"]), vars["affine1.bias"]);
  a1 = ad::leaky_relu(a1, config_.leaky_slope);
  ad::Var a2 = ad::add_rowvec(ad::matmul_t(a1, vars["affine2.weight"]), vars["affine2.bias"]);
  return ad::sigmoid(a2);
}

Mat MaskNet::forward_mask(const Mat& noisy_mag) const {
  ad::Tape tape;
  return forward_graph(tape, noisy_mag).value();
}

void MaskNet::save(const std::string& path) const {
  TensorArchive archive;
  for (const auto& [name, m] : params_) archive.put(name, m);
  Mat meta(1, 6);
  meta << config_.input_dim, config_.output_dim, config_.recurrent_layers,
      config_.recurrent_hidden_size, config_.leaky_slope,
      static_cast<double>(seed_);
  archive.put("__config", meta);
  archive.save(path);
}

MaskNet MaskNet::load(const std::string& path) {
  TensorArchive archive = TensorArchive::load(path);
  const Mat& meta = archive.get("__config");
  if (meta.rows() != 1 || meta.cols() != 6) throw Error("masknet: corrupt config tensor");
  MaskNetConfig config;
  config.input_dim = static_cast<int>(meta(0, 0));
  config.output_dim = static_cast<int>(meta(0, 1));
  config.recurrent_layers = static_cast<int>(meta(0, 2));
  config.recurrent_hidden_size = static_cast<int>(meta(0, 3));
  config.leaky_slope = meta(0, 4);
  MaskNet net(config, static_cast<std::uint64_t>(meta(0, 5)));
  for (auto& [name, m] : net.params_) {
    if (!archive.contains(name)) throw Error("masknet: checkpoint missing '" + name + "'");
    const Mat& stored = archive.get(name);
    if (stored.rows() != m.rows() || stored.cols() != m.cols()) {
      throw Error("masknet: checkpoint tensor '" + name + "' has wrong shape");
    }
    m = stored;
  }
  return net;
}

TimeSignal enhance(const MaskNet& model, const TimeSignal& noisy, const StftParams& params) {
  if (noisy.sample_rate != 16000) throw Error("enhance: expected 16 kHz input");
  const Spectrogram spec = stft(noisy, params);
  const Mat mask = model.forward_mask(spec.magnitude);
  const Mat enhanced_mag = mask.cwiseProduct(spec.magnitude);
  return istft_overlap_add(enhanced_mag, spec.phase, params, noisy.sample_rate,
                           static_cast<int>(noisy.length()));
}

}  // namespace srep
