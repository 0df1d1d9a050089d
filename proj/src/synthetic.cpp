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

#include "sstp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "sstp/error.hpp"
#include "sstp/rng.hpp"

namespace sstp
{

namespace
{

void require(bool ok, const char * what)
{
  if (!ok) {
    throw Error(ErrorCode::kInvalidArgument, std::string("synthetic config: ") + what);
  }
}

AgentTrack simulate_agent(const SynthConfig & cfg, double congestion, Rng & rng)
{
  const double r = cfg.spawn_radius * std::sqrt(rng.uniform());
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double x0 = r * std::cos(phi);
  const double y0 = r * std::sin(phi);
  const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double speed =
    rng.uniform(cfg.speed_min, cfg.speed_max) * (1.0 - (1.0 - cfg.dense_speed_factor) * congestion);
  const double turn_prob =
    cfg.turn_prob_sparse + (cfg.turn_prob_dense - cfg.turn_prob_sparse) * congestion;
  double omega = 0.0;
  if (rng.bernoulli(turn_prob)) {
    omega = rng.uniform(cfg.turn_rate_min, cfg.turn_rate_max);
    if (rng.bernoulli(0.5)) {
      omega = -omega;
    }
  }

  const std::size_t steps = cfg.t_obs + cfg.t_pred;
  // Turning starts at this step index; before it the agent goes straight.
  const std::size_t onset = cfg.turn_from_present ? cfg.t_obs - 1 : 0;
  const double brake = cfg.congestion_brake * congestion;
  AgentTrack track;
  track.observed.reserve(cfg.t_obs);
  track.future.reserve(cfg.t_pred);
  double x = x0;
  double y = y0;
  double h = heading;
  double v = speed;
  for (std::size_t t = 0; t < steps; ++t) {
    if (t > 0) {
      // Advance over [t - 1, t] at constant speed; exact chord for a turn.
      const double w = (t - 1 >= onset) ? omega : 0.0;
      if (w == 0.0) {
        x += v * cfg.dt * std::cos(h);
        y += v * cfg.dt * std::sin(h);
      } else {
        const double h1 = h + w * cfg.dt;
        x += v / w * (std::sin(h1) - std::sin(h));
        y += v / w * (std::cos(h) - std::cos(h1));
        h = h1;
      }
      if (t >= cfg.t_obs - 1) {
        v = std::max(0.0, v - brake * cfg.dt);
      }
    }
    const double px = canonical_coordinate(x + rng.normal(0.0, cfg.noise_std));
    const double py = canonical_coordinate(y + rng.normal(0.0, cfg.noise_std));
    (t < cfg.t_obs ? track.observed : track.future).push_back({px, py});
  }
  return track;
}

}  // namespace

void validate(const SynthConfig & c)
{
  require(c.num_scenes >= 1, "num_scenes must be >= 1");
  require(c.t_obs >= 2, "t_obs must be >= 2");
  require(c.t_pred >= 1, "t_pred must be >= 1");
  require(c.dt > 0.0, "dt must be positive");
  require(c.head.lo >= 1 && c.head.lo <= c.head.hi, "head density range invalid");
  require(c.tail.lo >= 1 && c.tail.lo <= c.tail.hi, "tail density range invalid");
  require(c.head_weight >= 0.0 && c.head_weight <= 1.0, "head_weight must lie in [0, 1]");
  require(c.speed_min >= 0.0 && c.speed_min <= c.speed_max, "speed range invalid");
  require(c.dense_speed_factor >= 0.0, "dense_speed_factor must be >= 0");
  require(c.congestion_density > 0.0, "congestion_density must be positive");
  require(c.turn_prob_sparse >= 0.0 && c.turn_prob_sparse <= 1.0, "turn_prob_sparse outside [0, 1]");
  require(c.turn_prob_dense >= 0.0 && c.turn_prob_dense <= 1.0, "turn_prob_dense outside [0, 1]");
  require(c.turn_rate_min > 0.0 && c.turn_rate_min <= c.turn_rate_max, "turn rate range invalid");
  require(c.congestion_brake >= 0.0, "congestion_brake must be >= 0");
  require(c.noise_std >= 0.0, "noise_std must be >= 0");
  require(c.spawn_radius >= 0.0, "spawn_radius must be >= 0");
  require(c.id_prefix.find_first_of("|; \n\r") == std::string::npos, "id_prefix has reserved characters");
}

Dataset generate_synthetic(const SynthConfig & config, std::uint64_t seed)
{
  validate(config);
  std::vector<Scene> scenes;
  scenes.reserve(config.num_scenes);
  for (std::size_t i = 0; i < config.num_scenes; ++i) {
    Rng rng(seed, i);
    const DensityRange & range = rng.bernoulli(config.head_weight) ? config.head : config.tail;
    const int density = static_cast<int>(rng.integer(range.lo, range.hi));
    const double congestion = std::min(1.0, density / config.congestion_density);
    std::vector<AgentTrack> agents;
    agents.reserve(static_cast<std::size_t>(density));
    for (int a = 0; a < density; ++a) {
      agents.push_back(simulate_agent(config, congestion, rng));
    }
    char id[32];
    std::snprintf(id, sizeof(id), "%06zu", i);
    scenes.emplace_back(config.id_prefix + id, std::move(agents), 0);
  }
  return Dataset(config.t_obs, config.t_pred, std::move(scenes));
}

}  // namespace sstp
