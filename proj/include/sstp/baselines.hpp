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

#ifndef SSTP_BASELINES_HPP_
#define SSTP_BASELINES_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sstp
{

enum class BaselineMethod { kRandom, kKMeans, kHerding };

struct BaselineConfig
{
  BaselineMethod method = BaselineMethod::kRandom;
  std::uint64_t seed = 0;
  std::optional<std::size_t> kmeans_clusters;  // defaults to the budget
  std::size_t kmeans_max_iters = 100;
};

/// Uniform sample without replacement, returned in ascending index order.
std::vector<std::size_t> select_random_indices(
  std::size_t n, std::size_t budget, std::uint64_t seed, std::uint64_t stream = 0);

std::vector<std::string> select_random(
  std::span<const std::string> ids, std::size_t budget, std::uint64_t seed);

/**
 * Lloyd's algorithm on Euclidean distance, initialized from distinct random
 * points. An empty cluster is re-seeded at the point farthest from its own
 * centroid. Each cluster then contributes its member nearest the centroid;
 * if that leaves a shortfall, the largest clusters give up further members
 * in nearest-first order, round robin.
 */
std::vector<std::size_t> select_kmeans(
  std::span<const std::vector<double>> features, std::size_t budget, const BaselineConfig & config);

/// Greedily keeps the running subset mean closest to the full mean.
std::vector<std::size_t> select_herding(std::span<const std::vector<double>> features, std::size_t budget);

}  // namespace sstp

#endif  // SSTP_BASELINES_HPP_
