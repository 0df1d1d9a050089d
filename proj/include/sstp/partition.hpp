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

#ifndef SSTP_PARTITION_HPP_
#define SSTP_PARTITION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sstp/features.hpp"
#include "sstp/scene.hpp"

namespace sstp
{

inline constexpr int kDefaultTau = 10;

/// Bucket k holds densities in [lo, hi) with lo = rho_min + (k - 1) * tau.
struct Bucket
{
  int k = 0;
  int lo = 0;
  int hi = 0;
  std::vector<std::size_t> members;  // positions in the partitioned input, ascending
  std::vector<std::string> ids;
};

struct PartitionPlan
{
  int tau = kDefaultTau;
  int rho_min = 0;
  std::size_t total = 0;
  std::vector<Bucket> buckets;  // k = 1..K, empty buckets included

  std::size_t num_buckets() const noexcept { return buckets.size(); }
  const Bucket & bucket(int k) const { return buckets.at(static_cast<std::size_t>(k - 1)); }
};

PartitionPlan partition(std::span<const std::string> ids, std::span<const int> densities, int tau);
PartitionPlan partition(const FeatureSet & features, int tau);
PartitionPlan partition(const Dataset & dataset, int tau);

struct BucketBudget
{
  int k = 0;
  std::size_t n = 0;
};

struct BudgetPlan
{
  double alpha = 1.0;
  std::size_t total = 0;                 // B = floor(alpha * |D|)
  std::vector<BucketBudget> per_bucket;  // processing order, k = K down to 1

  std::size_t budget_for(int k) const;
  std::size_t allocated() const;
};

/// floor(alpha * n), absorbing representation error just below an integer.
std::size_t total_budget(double alpha, std::size_t n);

/// Throws kInvalidArgument unless 0 < alpha <= 1.
void check_alpha(double alpha);

/**
 * Walks buckets from k = K down to 1. Each takes all of its members when
 * they fit in floor(B / k), otherwise exactly floor(B / k); B shrinks by
 * what was taken. When B covers the whole set every bucket is kept whole.
 */
BudgetPlan dynamic_budget(const PartitionPlan & plan, double alpha);

struct Provenance
{
  std::string method = "sstp";
  std::string scope = "per-bucket";  // or "global"
  double alpha = 1.0;
  int tau = kDefaultTau;
  std::uint64_t seed = 0;
  std::string features_hash = "-";
  std::string params_hash = "-";
};

struct BucketSelection
{
  int k = 0;  // 0 for a global selection
  std::vector<std::string> ids;
};

struct SelectionResult
{
  Provenance meta;
  std::vector<BucketSelection> buckets;  // processing order

  std::vector<std::string> ids() const;
  std::size_t size() const;
};

/**
 * Unions per-bucket selections. `per_bucket[k - 1]` is the selection for
 * bucket k; it must hold exactly n_k distinct members of that bucket.
 */
SelectionResult assemble(
  const PartitionPlan & plan, const BudgetPlan & budgets,
  const std::vector<std::vector<std::string>> & per_bucket, Provenance meta);

/**
 * Text file: a `#META key=value ...` line, then one scene id per line.
 * META keys: method scope alpha tau seed features params buckets, where
 * buckets lists `k:count` in file order.
 */
void write_selection(const SelectionResult & result, const std::string & path);
SelectionResult read_selection(const std::string & path);

}  // namespace sstp

#endif  // SSTP_PARTITION_HPP_
