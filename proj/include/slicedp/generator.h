// Copyright 2026 The slicedp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Feed-forward generator: affine layers with leaky-ReLU activations and an
// identity output layer, exact reverse-mode gradients and an Adam optimizer.

#ifndef SLICEDP_GENERATOR_H_
#define SLICEDP_GENERATOR_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "slicedp/matrix.h"

namespace slicedp {

// Weights and biases of every layer. Layer l maps width dims[l] to
// dims[l + 1]; weights[l] is dims[l + 1] x dims[l].
struct Parameters {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  static Parameters ZerosLike(const Parameters& shape);
  std::size_t Count() const;
  bool SameShape(const Parameters& other) const;
  bool operator==(const Parameters&) const = default;
};

class GeneratorModel {
 public:
  GeneratorModel() = default;
  GeneratorModel(std::vector<std::size_t> layer_dims, Parameters params,
                 double leaky_slope);

  const std::vector<std::size_t>& layer_dims() const { return layer_dims_; }
  std::size_t latent_dim() const { return layer_dims_.front(); }
  std::size_t output_dim() const { return layer_dims_.back(); }
  std::size_t num_layers() const { return layer_dims_.size() - 1; }
  double leaky_slope() const { return leaky_slope_; }

  const Parameters& params() const { return params_; }
  // Mutable access bumps the revision, invalidating outstanding tapes.
  Parameters& mutable_params() {
    ++revision_;
    return params_;
  }
  std::uint64_t revision() const { return revision_; }

  bool operator==(const GeneratorModel& other) const {
    return layer_dims_ == other.layer_dims_ &&
           leaky_slope_ == other.leaky_slope_ && params_ == other.params_;
  }

 private:
  std::vector<std::size_t> layer_dims_;
  Parameters params_;
  double leaky_slope_ = 0.2;
  std::uint64_t revision_ = 0;
};

struct InitOptions {
  double leaky_slope = 0.2;
  bool zero = false;  // all-zero weights instead of He initialization
  // Output layer: weights scaled by output_gain, biases set to output_bias.
  double output_gain = 1.0;
  double output_bias = 0.0;
};

// Starts the generator near the middle of the encoded domain [0, row_scale]
// with a small spread. Uses only the public encoding.
InitOptions DomainInit(std::size_t encoded_width);

// Weights ~ N(0, 2 / fan_in), biases zero; deterministic in `seed`.
GeneratorModel InitGenerator(std::span<const std::size_t> layer_dims,
                             std::uint64_t seed, const InitOptions& options = {});

// Activations cached by Forward for the matching Backward call.
struct ForwardTape {
  std::uint64_t model_revision = 0;
  const GeneratorModel* model = nullptr;
  std::vector<Matrix> inputs;  // input to layer l (post-activation)
  std::vector<Matrix> pre;     // pre-activation of layer l
};

struct ForwardResult {
  Matrix output;
  ForwardTape tape;
};

ForwardResult Forward(const GeneratorModel& model, const Matrix& latent);
Matrix Sample(const GeneratorModel& model, const Matrix& latent);

// Gradient of sum_{rows} <grad_output, output> with respect to all
// parameters. Throws Error(kInvalidArgument) on a stale or foreign tape.
Parameters Backward(const GeneratorModel& model, const ForwardTape& tape,
                    const Matrix& grad_output);

struct AdamOptions {
  double learning_rate = 2e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  bool operator==(const AdamOptions&) const = default;
};

struct OptimizerState {
  Parameters first_moment;
  Parameters second_moment;
  std::uint64_t step = 0;
  AdamOptions options;

  static OptimizerState For(const GeneratorModel& model,
                            const AdamOptions& options);
  bool operator==(const OptimizerState&) const = default;
};

void AdamStep(GeneratorModel& model, OptimizerState& state,
              const Parameters& grad);

// Checkpoint layout (little-endian):
//
//   magic "SLDPGENR" | u32 version (1) | u32 flags (bit 0: optimizer state)
//   f64 leaky slope | u64 layer count L+1 | u64 dims[L+1]
//   per layer: weights (out x in, row-major f64), biases (out f64)
//   if flags & 1: u64 step | f64 lr, beta1, beta2, epsilon
//                 first moments, second moments (same layout as parameters)
//   u64 trainer step counter
inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

struct Checkpoint {
  GeneratorModel model;
  std::optional<OptimizerState> optimizer;
  std::uint64_t trainer_step = 0;
};

void WriteCheckpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint ReadCheckpoint(std::istream& in);
void SaveCheckpoint(const std::filesystem::path& path,
                    const Checkpoint& checkpoint);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace slicedp

#endif  // SLICEDP_GENERATOR_H_
