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

#include "slicedp/generator.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <utility>

#include "binary_io.h"
#include "slicedp/errors.h"
#include "slicedp/rng.h"
#include "slicedp/simd/kernels.h"

namespace slicedp {
namespace {

constexpr char kCheckpointMagic[] = "SLDPGENR";

Parameters ShapedParameters(std::span<const std::size_t> dims) {
  Parameters p;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    p.weights.emplace_back(dims[l + 1], dims[l]);
    p.biases.emplace_back(dims[l + 1], 0.0);
  }
  return p;
}

void ValidateDims(std::span<const std::size_t> dims) {
  Require(dims.size() >= 2, ErrorCode::kInvalidArgument,
          "generator needs at least an input and an output width");
  for (std::size_t w : dims) {
    Require(w >= 1, ErrorCode::kInvalidArgument,
            "generator layer widths must be positive");
  }
}

void WriteParameters(std::ostream& out, const Parameters& p) {
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    internal::WriteF64s(out, p.weights[l].values());
    internal::WriteF64s(out, p.biases[l]);
  }
}

void ReadParameters(internal::Reader& reader, Parameters& p) {
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    reader.F64s(p.weights[l].values());
    reader.F64s(p.biases[l]);
  }
}

}  // namespace

Parameters Parameters::ZerosLike(const Parameters& shape) {
  Parameters p;
  for (std::size_t l = 0; l < shape.weights.size(); ++l) {
    p.weights.emplace_back(shape.weights[l].rows(), shape.weights[l].cols());
    p.biases.emplace_back(shape.biases[l].size(), 0.0);
  }
  return p;
}

std::size_t Parameters::Count() const {
  std::size_t count = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    count += weights[l].size() + biases[l].size();
  }
  return count;
}

bool Parameters::SameShape(const Parameters& other) const {
  if (weights.size() != other.weights.size() ||
      biases.size() != other.biases.size()) {
    return false;
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != other.weights[l].rows() ||
        weights[l].cols() != other.weights[l].cols() ||
        biases[l].size() != other.biases[l].size()) {
      return false;
    }
  }
  return true;
}

GeneratorModel::GeneratorModel(std::vector<std::size_t> layer_dims,
                               Parameters params, double leaky_slope)
    : layer_dims_(std::move(layer_dims)),
      params_(std::move(params)),
      leaky_slope_(leaky_slope) {
  ValidateDims(layer_dims_);
  Require(params_.SameShape(ShapedParameters(layer_dims_)),
          ErrorCode::kInvalidArgument,
          "generator parameters do not match layer widths");
}

InitOptions DomainInit(std::size_t encoded_width) {
  Require(encoded_width > 0, ErrorCode::kInvalidArgument,
          "encoded width must be positive");
  const double row_scale = 1.0 / std::sqrt(static_cast<double>(encoded_width));
  InitOptions options;
  options.output_gain = 0.4 * row_scale;
  options.output_bias = 0.5 * row_scale;
  return options;
}

GeneratorModel InitGenerator(std::span<const std::size_t> layer_dims,
                             std::uint64_t seed, const InitOptions& options) {
  ValidateDims(layer_dims);
  Parameters params = ShapedParameters(layer_dims);
  if (!options.zero) {
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
      RandomStream stream(seed, "generator-init", l);
      const double stddev =
          std::sqrt(2.0 / static_cast<double>(layer_dims[l]));
      stream.FillNormal(params.weights[l].values(), stddev);
    }
    for (double& w : params.weights.back().values()) w *= options.output_gain;
  }
  std::fill(params.biases.back().begin(), params.biases.back().end(),
            options.output_bias);
  return GeneratorModel(
      std::vector<std::size_t>(layer_dims.begin(), layer_dims.end()),
      std::move(params), options.leaky_slope);
}

ForwardResult Forward(const GeneratorModel& model, const Matrix& latent) {
  Require(latent.cols() == model.latent_dim(), ErrorCode::kInvalidArgument,
          "generator: latent width " + std::to_string(latent.cols()) +
              " != " + std::to_string(model.latent_dim()));
  const auto& kernels = simd::Kernels();
  const Parameters& p = model.params();
  const std::size_t rows = latent.rows();
  ForwardResult result;
  result.tape.model = &model;
  result.tape.model_revision = model.revision();
  Matrix input = latent;
  for (std::size_t l = 0; l < model.num_layers(); ++l) {
    const Matrix& w = p.weights[l];
    const std::size_t out_width = w.rows();
    const std::size_t in_width = w.cols();
    Matrix pre(rows, out_width);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* in_row = input.data() + r * in_width;
      for (std::size_t o = 0; o < out_width; ++o) {
        pre(r, o) = kernels.dot(in_row, w.data() + o * in_width, in_width) +
                    p.biases[l][o];
      }
    }
    result.tape.inputs.push_back(std::move(input));
    if (l + 1 == model.num_layers()) {
      result.output = pre;
      result.tape.pre.push_back(std::move(pre));
    } else {
      Matrix act(rows, out_width);
      kernels.leaky_relu(pre.data(), model.leaky_slope(), act.data(),
                         pre.size());
      result.tape.pre.push_back(std::move(pre));
      input = std::move(act);
    }
  }
  return result;
}

Matrix Sample(const GeneratorModel& model, const Matrix& latent) {
  return Forward(model, latent).output;
}

Parameters Backward(const GeneratorModel& model, const ForwardTape& tape,
                    const Matrix& grad_output) {
  Require(tape.model == &model && tape.model_revision == model.revision() &&
              tape.inputs.size() == model.num_layers(),
          ErrorCode::kInvalidArgument,
          "generator backward: stale tape (model changed since Forward)");
  const std::size_t rows = tape.inputs.front().rows();
  Require(grad_output.rows() == rows &&
              grad_output.cols() == model.output_dim(),
          ErrorCode::kInvalidArgument,
          "generator backward: gradient shape mismatch");
  const auto& kernels = simd::Kernels();
  const Parameters& p = model.params();
  Parameters grads = Parameters::ZerosLike(p);

  Matrix grad = grad_output;
  for (std::size_t l = model.num_layers(); l-- > 0;) {
    const Matrix& w = p.weights[l];
    const Matrix& input = tape.inputs[l];
    const std::size_t out_width = w.rows();
    const std::size_t in_width = w.cols();
    Matrix& dw = grads.weights[l];
    std::vector<double>& db = grads.biases[l];
    for (std::size_t r = 0; r < rows; ++r) {
      const double* in_row = input.data() + r * in_width;
      for (std::size_t o = 0; o < out_width; ++o) {
        const double g = grad(r, o);
        if (g == 0.0) continue;
        kernels.axpy(g, in_row, dw.data() + o * in_width, in_width);
        db[o] += g;
      }
    }
    if (l == 0) break;
    Matrix grad_in(rows, in_width);
    for (std::size_t r = 0; r < rows; ++r) {
      double* dst = grad_in.data() + r * in_width;
      for (std::size_t o = 0; o < out_width; ++o) {
        const double g = grad(r, o);
        if (g != 0.0) kernels.axpy(g, w.data() + o * in_width, dst, in_width);
      }
    }
    kernels.leaky_relu_backward(tape.pre[l - 1].data(), model.leaky_slope(),
                                grad_in.data(), grad_in.size());
    grad = std::move(grad_in);
  }
  return grads;
}

OptimizerState OptimizerState::For(const GeneratorModel& model,
                                   const AdamOptions& options) {
  Require(options.learning_rate > 0.0, ErrorCode::kInvalidArgument,
          "learning rate must be positive");
  Require(options.beta1 >= 0.0 && options.beta1 < 1.0 &&
              options.beta2 >= 0.0 && options.beta2 < 1.0,
          ErrorCode::kInvalidArgument, "Adam decay rates must lie in [0, 1)");
  OptimizerState state;
  state.first_moment = Parameters::ZerosLike(model.params());
  state.second_moment = Parameters::ZerosLike(model.params());
  state.options = options;
  return state;
}

void AdamStep(GeneratorModel& model, OptimizerState& state,
              const Parameters& grad) {
  Require(grad.SameShape(model.params()) &&
              state.first_moment.SameShape(model.params()) &&
              state.second_moment.SameShape(model.params()),
          ErrorCode::kInvalidArgument, "Adam: parameter shape mismatch");
  const auto& kernels = simd::Kernels();
  const AdamOptions& o = state.options;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  Parameters& p = model.mutable_params();
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    kernels.adam_update(p.weights[l].data(), grad.weights[l].data(),
                        state.first_moment.weights[l].data(),
                        state.second_moment.weights[l].data(),
                        p.weights[l].size(), o.learning_rate, o.beta1,
                        o.beta2, c1, c2, o.epsilon);
    kernels.adam_update(p.biases[l].data(), grad.biases[l].data(),
                        state.first_moment.biases[l].data(),
                        state.second_moment.biases[l].data(),
                        p.biases[l].size(), o.learning_rate, o.beta1,
                        o.beta2, c1, c2, o.epsilon);
  }
}

void WriteCheckpoint(std::ostream& out, const Checkpoint& checkpoint) {
  using namespace internal;
  const GeneratorModel& model = checkpoint.model;
  WriteMagic(out, {kCheckpointMagic, 8});
  WriteU32(out, kCheckpointFormatVersion);
  WriteU32(out, checkpoint.optimizer.has_value() ? 1u : 0u);
  WriteF64(out, model.leaky_slope());
  WriteU64(out, model.layer_dims().size());
  for (std::size_t w : model.layer_dims()) WriteU64(out, w);
  WriteParameters(out, model.params());
  if (checkpoint.optimizer.has_value()) {
    const OptimizerState& s = *checkpoint.optimizer;
    WriteU64(out, s.step);
    WriteF64(out, s.options.learning_rate);
    WriteF64(out, s.options.beta1);
    WriteF64(out, s.options.beta2);
    WriteF64(out, s.options.epsilon);
    WriteParameters(out, s.first_moment);
    WriteParameters(out, s.second_moment);
  }
  WriteU64(out, checkpoint.trainer_step);
  if (!out) Fail(ErrorCode::kIo, "failed writing generator checkpoint");
}

Checkpoint ReadCheckpoint(std::istream& in) {
  internal::Reader reader(in, "generator checkpoint");
  reader.ExpectMagic({kCheckpointMagic, 8});
  const std::uint32_t version = reader.U32();
  if (version != kCheckpointFormatVersion) {
    Fail(ErrorCode::kIo, "generator checkpoint: unsupported version " +
                             std::to_string(version));
  }
  const std::uint32_t flags = reader.U32();
  const double slope = reader.F64();
  const std::uint64_t count = reader.Count(64, "layer count");
  std::vector<std::size_t> dims(count);
  for (auto& w : dims) w = reader.Count(1ULL << 24, "layer width");
  ValidateDims(dims);
  Parameters params = ShapedParameters(dims);
  ReadParameters(reader, params);
  Checkpoint checkpoint;
  checkpoint.model = GeneratorModel(dims, std::move(params), slope);
  if (flags & 1u) {
    OptimizerState s;
    s.step = reader.U64();
    s.options.learning_rate = reader.F64();
    s.options.beta1 = reader.F64();
    s.options.beta2 = reader.F64();
    s.options.epsilon = reader.F64();
    s.first_moment = ShapedParameters(dims);
    s.second_moment = ShapedParameters(dims);
    ReadParameters(reader, s.first_moment);
    ReadParameters(reader, s.second_moment);
    checkpoint.optimizer = std::move(s);
  }
  checkpoint.trainer_step = reader.U64();
  reader.ExpectEnd();
  return checkpoint;
}

void SaveCheckpoint(const std::filesystem::path& path,
                    const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  WriteCheckpoint(out, checkpoint);
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open checkpoint " + path.string());
  return ReadCheckpoint(in);
}

}  // namespace slicedp
