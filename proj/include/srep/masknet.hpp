// srep/masknet.hpp

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

#ifndef SREP_MASKNET_HPP_
#define SREP_MASKNET_HPP_

#include "srep/stft.hpp"
#include "srep/tape.hpp"

#include <map>
#include <string>

namespace srep {

/// Mask estimator: stacked bidirectional LSTM layers, one hidden affine with
/// LeakyReLU, and a sigmoid output affine. The sigmoid bounds every mask
/// entry to (0, 1).
struct MaskNetConfig {
  int input_dim = 257;            // F_Hz
  int output_dim = 257;
  int recurrent_layers = 2;       // bidirectional
  int recurrent_hidden_size = 256;  // per direction
  double leaky_slope = 0.3;

  int affine_width() const { return 2 * recurrent_hidden_size; }
};

class MaskNet {
 public:
  MaskNet(MaskNetConfig config, std::uint64_t seed);

  const MaskNetConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  std::map<std::string, Mat>& parameters() { return params_; }
  const std::map<std::string, Mat>& parameters() const { return params_; }
  std::uint64_t parameter_checksum() const;

  /// Records the full network on `tape` with parameters as gradient-tracked
  /// leaves; `param_vars` (if given) receives name -> leaf for the optimizer.
  /// Input is the noisy magnitude, T x input_dim; output mask is T x
  /// output_dim with entries in (0, 1). Errors on non-finite input.
  ad::Var forward_graph(ad::Tape& tape, const Mat& noisy_mag,
                        std::map<std::string, ad::Var>* param_vars = nullptr) const;

  Mat forward_mask(const Mat& noisy_mag) const;

  void save(const std::string& path) const;
  static MaskNet load(const std::string& path);

 private:
  MaskNetConfig config_;
  std::uint64_t seed_ = 0;
  std::map<std::string, Mat> params_;
};

/// mask applied to |X|, resynthesized with the noisy phase; output length
/// equals the input length.
TimeSignal enhance(const MaskNet& model, const TimeSignal& noisy,
                   const StftParams& params = {});

}  // namespace srep

#endif  // SREP_MASKNET_HPP_
