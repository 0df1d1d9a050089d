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

#include "sstp/coreset.hpp"

#include "sstp/baselines.hpp"
#include "sstp/error.hpp"
#include "sstp/util.hpp"

namespace sstp
{

namespace
{

std::vector<std::size_t> run_method(
  Method method, std::span<const std::vector<double>> features, std::size_t budget,
  const SelectionOptions & opt, std::uint64_t stream)
{
  switch (method) {
    case Method::kSstp:
      return select_bucket(features, budget, opt.self_term);
    case Method::kRandom:
      return select_random_indices(features.size(), budget, opt.seed, stream);
    case Method::kKMeans: {
      BaselineConfig cfg;
      cfg.method = BaselineMethod::kKMeans;
      cfg.seed = opt.seed + stream;
      cfg.kmeans_max_iters = opt.kmeans_max_iters;
      return select_kmeans(features, budget, cfg);
    }
    case Method::kHerding:
      return select_herding(features, budget);
  }
  return {};
}

}  // namespace

Method parse_method(const std::string & name)
{
  if (name == "sstp") {
    return Method::kSstp;
  }
  if (name == "random") {
    return Method::kRandom;
  }
  if (name == "kmeans") {
    return Method::kKMeans;
  }
  if (name == "herding") {
    return Method::kHerding;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown selection method '" + name + "'");
}

std::string to_string(Method method)
{
  switch (method) {
    case Method::kSstp:
      return "sstp";
    case Method::kRandom:
      return "random";
    case Method::kKMeans:
      return "kmeans";
    case Method::kHerding:
      return "herding";
  }
  return "?";
}

SelectionResult select_coreset(const FeatureSet & features, const SelectionOptions & opt)
{
  check_alpha(opt.alpha);
  if (features.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot select from an empty feature set");
  }
  Provenance meta;
  meta.method = to_string(opt.method);
  meta.alpha = opt.alpha;
  meta.tau = opt.tau;
  meta.seed = opt.seed;
  meta.features_hash = opt.features_hash;
  meta.params_hash = opt.params_hash;

  const bool bucketed = opt.method == Method::kSstp || opt.per_bucket;
  if (!bucketed) {
    meta.scope = "global";
    std::vector<std::vector<double>> vectors;
    std::vector<std::string> ids;
    for (const auto & r : features.records()) {
      vectors.push_back(r.g);
      ids.push_back(r.scene_id);
    }
    const std::size_t budget = total_budget(opt.alpha, features.size());
    SelectionResult result;
    result.meta = meta;
    BucketSelection all{0, {}};
    for (std::size_t i : run_method(opt.method, vectors, budget, opt, 0)) {
      all.ids.push_back(ids[i]);
    }
    result.buckets.push_back(std::move(all));
    return result;
  }

  const PartitionPlan plan = partition(features, opt.tau);
  const BudgetPlan budgets = dynamic_budget(plan, opt.alpha);
  std::vector<std::vector<std::string>> chosen(plan.num_buckets());
  parallel_for(plan.num_buckets(), resolve_threads(opt.threads), [&](std::size_t b) {
    const Bucket & bucket = plan.buckets[b];
    const std::size_t n_k = budgets.budget_for(bucket.k);
    if (n_k == bucket.members.size()) {
      chosen[b] = bucket.ids;
      return;
    }
    std::vector<std::vector<double>> vectors;
    vectors.reserve(bucket.members.size());
    for (std::size_t i : bucket.members) {
      vectors.push_back(features[i].g);
    }
    for (std::size_t i : run_method(opt.method, vectors, n_k, opt, static_cast<std::uint64_t>(bucket.k))) {
      chosen[b].push_back(bucket.ids[i]);
    }
  });
  return assemble(plan, budgets, chosen, meta);
}

}  // namespace sstp
