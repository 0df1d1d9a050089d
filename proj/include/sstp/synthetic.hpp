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

#ifndef SSTP_SYNTHETIC_HPP_
#define SSTP_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <string>

#include "sstp/scene.hpp"

namespace sstp
{

/// Closed integer range of agent counts.
struct DensityRange
{
  int lo = 2;
  int hi = 10;
};

/**
 * Long-tail scene generator settings. Densities come from a two-component
 * mixture: `head` with probability `head_weight`, otherwise `tail`, each
 * uniform over its integer range. Congestion c = min(1, density /
 * congestion_density) slows agents down and makes turning more likely.
 * With a nonzero congestion_brake it also decelerates them over the future
 * horizon.
 */
struct SynthConfig
{
  std::size_t num_scenes = 1000;
  std::size_t t_obs = 8;
  std::size_t t_pred = 12;
  double dt = 0.1;  // seconds per step

  DensityRange head{2, 10};
  DensityRange tail{40, 80};
  double head_weight = 0.9;

  double speed_min = 3.0;  // m/s
  double speed_max = 14.0;
  double dense_speed_factor = 0.5;  // speed multiplier at c = 1
  double congestion_density = 60.0;

  double turn_prob_sparse = 0.1;  // turn probability at c = 0
  double turn_prob_dense = 0.7;   // at c = 1
  double turn_rate_min = 0.1;     // rad/s
  double turn_rate_max = 0.5;
  // When set, turning agents drive straight until the last observed step.
  bool turn_from_present = false;

  // Deceleration (m/s^2) over the future horizon, scaled by c. Zero keeps
  // every motion at constant speed.
  double congestion_brake = 0.0;

  double noise_std = 0.05;  // meters, per coordinate
  double spawn_radius = 3.0;

  std::string id_prefix = "s";
};

/// Throws Error(kInvalidArgument) describing the first bad field.
void validate(const SynthConfig & config);

/// Pure function of (config, seed). Scene i draws from stream i. The focal
/// agent is always index 0. Coordinates are rounded to the file precision.
Dataset generate_synthetic(const SynthConfig & config, std::uint64_t seed);

}  // namespace sstp

#endif  // SSTP_SYNTHETIC_HPP_
