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

#ifndef SSTP_METRICS_HPP_
#define SSTP_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sstp/predictor.hpp"
#include "sstp/scene.hpp"

namespace sstp
{

/// Miss threshold on final displacement, meters. A convention, configurable.
inline constexpr double kDefaultMissThreshold = 2.0;

using Trajectory = std::vector<Point2>;

/// Mode trajectories of a prediction, in its focal frame.
std::vector<Trajectory> modes_of(const PredictionOutput & output);

double min_ade(std::span<const Trajectory> modes, std::span<const Point2> gt);
double min_fde(std::span<const Trajectory> modes, std::span<const Point2> gt);
/// 1 iff min_fde exceeds `threshold` (> 0).
int miss_rate_indicator(std::span<const Trajectory> modes, std::span<const Point2> gt, double threshold);

/// Density band [lo, hi); hi unset means unbounded. A catch-all band
/// collects scenes no other band covers.
struct Stratum
{
  int lo = 0;
  std::optional<int> hi;
  bool catch_all = false;

  bool contains(int density) const { return density >= lo && (!hi || density < *hi); }
  std::string label() const;
};

/// Disjoint bands: [0,40), [40,60), [60,80), [80,inf).
std::vector<Stratum> default_strata();
/// Overlapping bands as usually tabulated: [0,40), [40,inf), [60,inf), [80,inf).
std::vector<Stratum> cumulative_strata();

struct StratumMetrics
{
  Stratum stratum;
  std::size_t count = 0;
  double min_ade = 0.0;
  double min_fde = 0.0;
  double miss_rate = 0.0;
};

struct TrainingMeta
{
  std::size_t epochs = 0;
  double lr = 0.0;
  std::uint64_t seed = 0;
  std::size_t subset_size = 0;
};

struct MetricReport
{
  std::string arm = "model";
  std::size_t count = 0;
  double min_ade = 0.0;
  double min_fde = 0.0;
  double miss_rate = 0.0;
  std::vector<StratumMetrics> per_stratum;
  TrainingMeta training;

  const StratumMetrics & stratum(const Stratum & s) const;
};

/**
 * Scores the focal agent of every scene. Per-scene values are averaged in
 * scene order, so the result does not depend on `threads`.
 */
MetricReport evaluate(
  const ToyPredictorParams & params, const Dataset & eval_set, const std::vector<Stratum> & strata,
  double miss_threshold = kDefaultMissThreshold, std::size_t threads = 0);

struct ExperimentConfig
{
  std::size_t epochs = 20;
  double lr = 1e-2;
  std::uint64_t seed = 0;
  std::size_t hidden = 64;
  std::size_t latent = 32;
  std::size_t modes = 6;
  bool include_full = false;
  std::vector<Stratum> strata = default_strata();
  double miss_threshold = kDefaultMissThreshold;
  std::string subset_label = "selected";
  std::size_t threads = 0;
};

struct ExperimentReport
{
  std::vector<MetricReport> arms;  // subset, random, then full when requested

  const MetricReport & arm(const std::string & name) const;
};

/// Trains a model from scratch on the given scenes and scores it.
MetricReport train_and_evaluate(
  const Dataset & train_set, const Dataset & eval_set, const ExperimentConfig & config,
  const std::string & arm);

/**
 * Trains from the same seeded initialization on `subset_ids`, on a random
 * subset of equal size and optionally on all of `full`, then scores each
 * on `eval_set`.
 */
ExperimentReport run_experiment(
  const Dataset & full, const std::vector<std::string> & subset_ids, const Dataset & eval_set,
  const ExperimentConfig & config);

/// key=value text with `#ARM` and `#STRATUM` blocks.
std::string format_report(const ExperimentReport & report, double miss_threshold = kDefaultMissThreshold);
ExperimentReport parse_report(const std::string & text);
/// Tab-separated table, one row per (arm, stratum) plus an "all" row per arm.
std::string format_table(const ExperimentReport & report);

}  // namespace sstp

#endif  // SSTP_METRICS_HPP_
