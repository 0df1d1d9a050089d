// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SSTP_PREDICTOR_HPP_
#define SSTP_PREDICTOR_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sstp/scene.hpp"

namespace sstp
{

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Density slot of the encoded input is agent count divided by this cap.
inline constexpr double kDensityCap = 100.0;
/// Guard on the residual norm in the regression gradient.
inline constexpr double kGradEpsilon = 1e-8;

constexpr std::size_t input_dim_for(std::size_t t_obs) { return (t_obs - 1) * 2 + 2; }

struct PredictorDims
{
  std::size_t input = 0;
  std::size_t hidden = 64;
  std::size_t latent = 32;
  std::size_t modes = 6;
  std::size_t t_pred = 0;

  static PredictorDims for_horizons(
    std::size_t t_obs, std::size_t t_pred, std::size_t hidden = 64, std::size_t latent = 32,
    std::size_t modes = 6);

  std::size_t traj_size() const noexcept { return modes * t_pred * 2; }

  friend bool operator==(const PredictorDims &, const PredictorDims &) = default;
};

/**
 * Two tanh layers produce the latent E; a linear head maps E to per-step
 * offsets for every mode, another maps it to mode logits.
 */
struct ToyPredictorParams
{
  Matrix w1;  // hidden x input
  Vector b1;
  Matrix w2;  // latent x hidden
  Vector b2;
  Matrix w_traj;  // (modes * t_pred * 2) x latent
  Vector b_traj;
  Matrix w_logit;  // modes x latent
  Vector b_logit;

  PredictorDims dims() const;

  /// Throws kDimensionMismatch / kNonFinite / kInvalidArgument on violations.
  void validate() const;

  static ToyPredictorParams zeros(const PredictorDims & dims);

  /// Every weight and bias uniform in +-1/sqrt(fan_in), drawn in declaration order.
  static ToyPredictorParams init(const PredictorDims & dims, std::uint64_t seed);

  friend bool operator==(const ToyPredictorParams & a, const ToyPredictorParams & b);
};

/**
 * Trajectories are in the focal-agent frame: positions relative to the focal
 * agent's last observed point. Layout is mode-major, then step, then (x, y).
 */
struct PredictionOutput
{
  std::size_t modes = 0;
  std::size_t t_pred = 0;
  Vector trajectories;
  Vector logits;
  Vector latent;

  Point2 position(std::size_t mode, std::size_t step) const
  {
    const std::size_t i = (mode * t_pred + step) * 2;
    return {trajectories[static_cast<Eigen::Index>(i)], trajectories[static_cast<Eigen::Index>(i + 1)]};
  }
};

struct LossBreakdown
{
  double total = 0.0;
  double reg = 0.0;
  double cls = 0.0;
  std::size_t best_mode = 0;
};

struct OutputGradient
{
  Vector d_traj;  // same layout as PredictionOutput::trajectories
  Vector d_logits;
  std::size_t best_mode = 0;
};

/// Focal displacements, then mean neighbor distance and normalized density.
Vector encode_input(const Scene & scene);
/// Same, after checking the scene against the model's horizons.
Vector encode_input(const Scene & scene, const PredictorDims & dims);

/// Focal future relative to its last observed position.
std::vector<Point2> focal_future_relative(const Scene & scene);

PredictionOutput forward(const ToyPredictorParams & params, const Vector & input);

/// Index of the mode with the lowest mean displacement; ties go to the lowest index.
std::size_t best_mode(const PredictionOutput & output, std::span<const Point2> ground_truth);

LossBreakdown loss(const PredictionOutput & output, std::span<const Point2> ground_truth);

OutputGradient grad_wrt_output(const PredictionOutput & output, std::span<const Point2> ground_truth);

/**
 * Gradient of the loss with respect to the latent E, chaining the output
 * gradient through the position cumulative sum and both decoder heads.
 */
Vector pull_back_to_latent(const ToyPredictorParams & params, const OutputGradient & grad);

/// One SGD step on a single scene; returns the loss before the update.
LossBreakdown sgd_step(ToyPredictorParams & params, const Scene & scene, double lr);

/// Mean total loss over a dataset.
double mean_loss(const ToyPredictorParams & params, const Dataset & dataset);

/**
 * Plain SGD over `epochs` passes. Each epoch visits scenes in a fresh
 * permutation drawn from Rng(seed, epoch). Aborts with kNonFinite when the
 * loss diverges. `epoch_losses`, when given, receives the mean training loss
 * of each epoch.
 */
ToyPredictorParams pretrain(
  const ToyPredictorParams & params, const Dataset & dataset, std::size_t epochs, double lr,
  std::uint64_t seed, std::vector<double> * epoch_losses = nullptr);

void save_params(const ToyPredictorParams & params, const std::string & path);
ToyPredictorParams load_params(const std::string & path);

/// FNV-1a over the serialized parameter bytes.
std::string params_fingerprint(const ToyPredictorParams & params);

}  // namespace sstp

#endif  // SSTP_PREDICTOR_HPP_
