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

#ifndef SSTP_CORESET_HPP_
#define SSTP_CORESET_HPP_

#include <cstddef>
#include <cstdint>
#include <string>

#include "sstp/features.hpp"
#include "sstp/partition.hpp"
#include "sstp/submodular.hpp"

namespace sstp
{

enum class Method { kSstp, kRandom, kKMeans, kHerding };

/// "sstp", "random", "kmeans" or "herding"; anything else throws kInvalidArgument.
Method parse_method(const std::string & name);
std::string to_string(Method method);

struct SelectionOptions
{
  Method method = Method::kSstp;
  double alpha = 0.5;
  int tau = kDefaultTau;
  std::uint64_t seed = 0;
  // Baselines only: run under the density budget plan instead of globally.
  bool per_bucket = false;
  SelfTerm self_term = SelfTerm::kExclude;
  std::size_t kmeans_max_iters = 100;
  std::size_t threads = 0;
  std::string features_hash = "-";
  std::string params_hash = "-";
};

/**
 * Full selection pipeline over a feature set. SSTP (and per-bucket
 * baselines) partition by density, compute the reverse-order budget plan and
 * select inside each bucket; buckets whose budget covers them are taken
 * whole. Global baselines select floor(alpha * |D|) items in one pass.
 */
SelectionResult select_coreset(const FeatureSet & features, const SelectionOptions & options);

}  // namespace sstp

#endif  // SSTP_CORESET_HPP_
