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

#ifndef SSTP_SUBMODULAR_HPP_
#define SSTP_SUBMODULAR_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace sstp
{

inline constexpr double kNormEpsilon = 1e-12;
/// Gains within this distance of the minimum count as tied.
inline constexpr double kTieTolerance = 1e-10;

/// Whether a candidate's own similarity is part of the unselected sum.
enum class SelfTerm { kExclude, kInclude };

/// a.b / (max(|a|, eps) * max(|b|, eps)).
double cosine_sim(std::span<const double> a, std::span<const double> b);

/**
 * Greedy state for one density bucket.
 *
 * For an unselected candidate j the gain is
 *
 *   P(j) = sum_{i selected} sim(i, j) - sum_{i unselected, i != j} sim(i, j)
 *        = 2 * sel_sim[j] - total_sim[j]
 *
 * with total_sim[j] = sum_{i != j} sim(i, j) over the whole bucket. Each
 * greedy step takes the argmin of P and adds the new member's similarity
 * row to sel_sim, so a step costs O(n * dim). total_sim is formed once from
 * the sum of unit vectors, which needs O(n * dim) time and no n x n storage.
 */
class BucketSelector
{
public:
  explicit BucketSelector(
    std::span<const std::vector<double>> members, SelfTerm self_term = SelfTerm::kExclude);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }

  /// Gain of an unselected member; throws kInvalidArgument if j is selected.
  double gain(std::size_t j) const;

  /// Selects the argmin-gain member (lowest index among ties) and returns it.
  std::size_t step();

  bool is_selected(std::size_t j) const { return in_selection_[j] != 0; }
  const std::vector<std::size_t> & selected() const noexcept { return selected_; }
  std::span<const double> norms() const noexcept { return norms_; }
  std::span<const double> total_sim() const noexcept { return total_sim_; }
  std::span<const double> sel_sim() const noexcept { return sel_sim_; }

private:
  std::span<const double> unit(std::size_t i) const { return {unit_.data() + i * dim_, dim_}; }

  std::size_t n_;
  std::size_t dim_;
  SelfTerm self_term_;
  std::vector<double> unit_;  // n x dim, rows scaled by 1 / max(norm, eps)
  std::vector<double> norms_;
  std::vector<double> self_sim_;
  std::vector<double> total_sim_;
  std::vector<double> sel_sim_;
  std::vector<std::size_t> selected_;
  std::vector<char> in_selection_;
};

/// Runs n_k greedy steps and returns the selection order (0-based indices).
/// Throws kBudgetViolation when n_k exceeds the bucket size.
std::vector<std::size_t> select_bucket(
  std::span<const std::vector<double>> features, std::size_t n_k,
  SelfTerm self_term = SelfTerm::kExclude);

}  // namespace sstp

#endif  // SSTP_SUBMODULAR_HPP_
