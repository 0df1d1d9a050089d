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

#ifndef SSTP_FEATURES_HPP_
#define SSTP_FEATURES_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sstp/predictor.hpp"
#include "sstp/scene.hpp"

namespace sstp
{

/// Gradient feature of one scene.
struct FeatureRecord
{
  std::string scene_id;
  int density = 0;
  std::vector<double> g;

  friend bool operator==(const FeatureRecord &, const FeatureRecord &) = default;
};

class FeatureSet
{
public:
  explicit FeatureSet(std::size_t dim, std::vector<FeatureRecord> records = {});

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<FeatureRecord> & records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const FeatureRecord & operator[](std::size_t i) const { return records_[i]; }

  friend bool operator==(const FeatureSet &, const FeatureSet &) = default;

private:
  std::size_t dim_;
  std::vector<FeatureRecord> records_;
};

/// g = (dL/dE) * E elementwise, for one scene.
std::vector<double> gradient_feature(const ToyPredictorParams & params, const Scene & scene);

/// One record per scene in dataset order. `threads` = 0 defers to SSTP_THREADS.
FeatureSet extract_features(
  const ToyPredictorParams & params, const Dataset & dataset, std::size_t threads = 0);

/**
 * SSTF1 interchange file, little-endian:
 *   "SSTF1", u32 dim, u64 count,
 *   count x { u16 id_len, id bytes, u32 density, dim x f32 }.
 * Values are rounded to f32 on write.
 */
void write_features(const FeatureSet & fs, const std::string & path);

/// Rejects bad magic, truncation, trailing bytes and, when `expected_dim` is
/// given, a header dim that differs from it. Never returns a partial set.
FeatureSet read_features(const std::string & path, std::optional<std::size_t> expected_dim = std::nullopt);

/// Encoded predictor inputs as features, for baselines run in input space.
FeatureSet input_features(const Dataset & dataset);

/// The f32-rounded copy that a write/read cycle produces.
FeatureSet quantize_f32(const FeatureSet & fs);

}  // namespace sstp

#endif  // SSTP_FEATURES_HPP_
