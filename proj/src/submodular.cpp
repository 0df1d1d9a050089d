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

#include "sstp/submodular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sstp/error.hpp"

namespace sstp
{

namespace
{

double dot(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i] * b[i];
  }
  return s;
}

}  // namespace

double cosine_sim(std::span<const double> a, std::span<const double> b)
{
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "cosine_sim on vectors of different length");
  }
  const double na = std::max(std::sqrt(dot(a, a)), kNormEpsilon);
  const double nb = std::max(std::sqrt(dot(b, b)), kNormEpsilon);
  return dot(a, b) / (na * nb);
}

BucketSelector::BucketSelector(std::span<const std::vector<double>> members, SelfTerm self_term)
: n_(members.size()),
  dim_(members.empty() ? 0 : members.front().size()),
  self_term_(self_term),
  unit_(n_ * dim_),
  norms_(n_),
  self_sim_(n_),
  total_sim_(n_),
  sel_sim_(n_, 0.0),
  in_selection_(n_, 0)
{
  std::vector<double> sum(dim_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto & v = members[i];
    if (v.size() != dim_) {
      throw Error(ErrorCode::kDimensionMismatch, "bucket members differ in length");
    }
    norms_[i] = std::sqrt(dot(v, v));
    const double inv = 1.0 / std::max(norms_[i], kNormEpsilon);
    for (std::size_t c = 0; c < dim_; ++c) {
      unit_[i * dim_ + c] = v[c] * inv;
      sum[c] += unit_[i * dim_ + c];
    }
  }
  for (std::size_t j = 0; j < n_; ++j) {
    self_sim_[j] = dot(unit(j), unit(j));
    total_sim_[j] = dot(unit(j), sum) - self_sim_[j];
  }
}

double BucketSelector::gain(std::size_t j) const
{
  if (j >= n_ || in_selection_[j]) {
    throw Error(ErrorCode::kInvalidArgument, "gain requested for a selected or unknown member");
  }
  const double p = 2.0 * sel_sim_[j] - total_sim_[j];
  return self_term_ == SelfTerm::kInclude ? p - self_sim_[j] : p;
}

std::size_t BucketSelector::step()
{
  if (selected_.size() >= n_) {
    throw Error(ErrorCode::kBudgetViolation, "bucket is exhausted");
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n_; ++j) {
    if (!in_selection_[j]) {
      best = std::min(best, gain(j));
    }
  }
  std::size_t pick = n_;
  for (std::size_t j = 0; j < n_; ++j) {
    if (!in_selection_[j] && gain(j) <= best + kTieTolerance) {
      pick = j;
      break;
    }
  }
  in_selection_[pick] = 1;
  selected_.push_back(pick);
  const auto u = unit(pick);
  for (std::size_t j = 0; j < n_; ++j) {
    if (j != pick) {
      sel_sim_[j] += dot(unit(j), u);
    }
  }
  return pick;
}

std::vector<std::size_t> select_bucket(
  std::span<const std::vector<double>> features, std::size_t n_k, SelfTerm self_term)
{
  if (n_k > features.size()) {
    throw Error(
      ErrorCode::kBudgetViolation, "budget " + std::to_string(n_k) + " exceeds bucket size " +
                                     std::to_string(features.size()));
  }
  if (n_k == 0) {
    return {};
  }
  BucketSelector state(features, self_term);
  for (std::size_t s = 0; s < n_k; ++s) {
    state.step();
  }
  return state.selected();
}

}  // namespace sstp
