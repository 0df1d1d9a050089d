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

#include "sstp/baselines.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "sstp/error.hpp"
#include "sstp/rng.hpp"

namespace sstp
{

namespace
{

void check_budget(std::size_t budget, std::size_t n)
{
  if (budget > n) {
    throw Error(
      ErrorCode::kBudgetViolation,
      "budget " + std::to_string(budget) + " exceeds population " + std::to_string(n));
  }
}

std::size_t check_dim(std::span<const std::vector<double>> features)
{
  const std::size_t dim = features.empty() ? 0 : features.front().size();
  for (const auto & f : features) {
    if (f.size() != dim) {
      throw Error(ErrorCode::kDimensionMismatch, "feature vectors differ in length");
    }
  }
  return dim;
}

double sq_dist(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::vector<std::size_t> all_indices(std::size_t n)
{
  std::vector<std::size_t> out(n);
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

}  // namespace

std::vector<std::size_t> select_random_indices(
  std::size_t n, std::size_t budget, std::uint64_t seed, std::uint64_t stream)
{
  check_budget(budget, n);
  std::vector<std::size_t> pool = all_indices(n);
  Rng rng(seed, stream);
  for (std::size_t i = 0; i < budget; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(budget);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<std::string> select_random(
  std::span<const std::string> ids, std::size_t budget, std::uint64_t seed)
{
  std::vector<std::string> out;
  for (std::size_t i : select_random_indices(ids.size(), budget, seed)) {
    out.push_back(ids[i]);
  }
  return out;
}

std::vector<std::size_t> select_kmeans(
  std::span<const std::vector<double>> features, std::size_t budget, const BaselineConfig & config)
{
  const std::size_t n = features.size();
  check_budget(budget, n);
  const std::size_t dim = check_dim(features);
  if (budget == n) {
    return all_indices(n);
  }
  if (budget == 0) {
    return {};
  }
  const std::size_t k = config.kmeans_clusters.value_or(budget);
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kInvalidArgument, "kmeans cluster count must lie in [1, n]");
  }

  std::vector<std::vector<double>> centroids;
  for (std::size_t i : select_random_indices(n, k, config.seed, 0x6b6d)) {
    centroids.push_back(features[i]);
  }
  std::vector<std::size_t> assign(n, k);
  std::vector<std::size_t> counts(k, 0);

  auto nearest_centroid = [&](std::size_t i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      const double d = sq_dist(features[i], centroids[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    return best;
  };

  for (std::size_t iter = 0; iter < std::max<std::size_t>(1, config.kmeans_max_iters); ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = nearest_centroid(i);
      changed |= c != assign[i];
      assign[i] = c;
    }
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assign[i]];
    }
    // Re-seed empty clusters at the worst-fit point that is not already a centroid.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) {
        continue;
      }
      std::size_t far = n;
      double far_d = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[assign[i]] < 2) {
          continue;
        }
        const double d = sq_dist(features[i], centroids[assign[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far == n) {
        break;  // every remaining point coincides with its centroid
      }
      --counts[assign[far]];
      assign[far] = c;
      counts[c] = 1;
      centroids[c] = features[far];
      changed = true;
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        std::fill(centroids[c].begin(), centroids[c].end(), 0.0);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto & cen = centroids[assign[i]];
      for (std::size_t d = 0; d < dim; ++d) {
        cen[d] += features[i][d];
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        for (auto & v : centroids[c]) {
          v /= static_cast<double>(counts[c]);
        }
      }
    }
    if (!changed && iter > 0) {
      break;
    }
  }

  // Members of each cluster, nearest to the centroid first (ties: lowest index).
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < n; ++i) {
    members[assign[i]].push_back(i);
  }
  for (std::size_t c = 0; c < k; ++c) {
    std::stable_sort(members[c].begin(), members[c].end(), [&](std::size_t a, std::size_t b) {
      return sq_dist(features[a], centroids[c]) < sq_dist(features[b], centroids[c]);
    });
  }
  std::vector<std::size_t> by_size(k);
  std::iota(by_size.begin(), by_size.end(), std::size_t{0});
  std::stable_sort(by_size.begin(), by_size.end(), [&](std::size_t a, std::size_t b) {
    return members[a].size() > members[b].size();
  });

  std::vector<std::size_t> chosen;
  std::vector<std::size_t> taken(k, 0);
  // First pass: one representative per cluster (largest clusters first when k > budget).
  for (std::size_t c : by_size) {
    if (chosen.size() == budget) {
      break;
    }
    if (!members[c].empty()) {
      chosen.push_back(members[c][0]);
      taken[c] = 1;
    }
  }
  // Shortfall: round robin over the largest clusters.
  while (chosen.size() < budget) {
    bool progressed = false;
    for (std::size_t c : by_size) {
      if (chosen.size() == budget) {
        break;
      }
      if (taken[c] < members[c].size()) {
        chosen.push_back(members[c][taken[c]++]);
        progressed = true;
      }
    }
    if (!progressed) {
      break;
    }
  }
  return chosen;
}

std::vector<std::size_t> select_herding(std::span<const std::vector<double>> features, std::size_t budget)
{
  const std::size_t n = features.size();
  check_budget(budget, n);
  const std::size_t dim = check_dim(features);
  if (budget == n) {
    return all_indices(n);
  }
  std::vector<double> mean(dim, 0.0);
  for (const auto & f : features) {
    for (std::size_t d = 0; d < dim; ++d) {
      mean[d] += f[d];
    }
  }
  for (auto & v : mean) {
    v /= static_cast<double>(n);
  }
  std::vector<double> sum(dim, 0.0);
  std::vector<char> used(n, 0);
  std::vector<std::size_t> chosen;
  std::vector<double> candidate(dim);
  for (std::size_t step = 0; step < budget; ++step) {
    const double inv = 1.0 / static_cast<double>(step + 1);
    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) {
        continue;
      }
      for (std::size_t d = 0; d < dim; ++d) {
        candidate[d] = (sum[d] + features[j][d]) * inv;
      }
      const double dist = sq_dist(mean, candidate);
      if (dist < best_d) {
        best_d = dist;
        best = j;
      }
    }
    used[best] = 1;
    chosen.push_back(best);
    for (std::size_t d = 0; d < dim; ++d) {
      sum[d] += features[best][d];
    }
  }
  return chosen;
}

}  // namespace sstp
