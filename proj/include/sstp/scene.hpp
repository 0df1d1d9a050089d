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

#ifndef SSTP_SCENE_HPP_
#define SSTP_SCENE_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sstp
{

struct Point2
{
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2 &, const Point2 &) = default;
};

/// Observed and future positions of one agent, in meters.
struct AgentTrack
{
  std::vector<Point2> observed;
  std::vector<Point2> future;

  friend bool operator==(const AgentTrack &, const AgentTrack &) = default;
};

/**
 * One driving sample: agent tracks, the index of the focal agent whose
 * future is predicted, and an optional opaque map payload. The density of a
 * scene is its agent count.
 */
class Scene
{
public:
  Scene(
    std::string scene_id, std::vector<AgentTrack> agents, std::size_t focal_index,
    std::string map_context = {});

  const std::string & scene_id() const noexcept { return scene_id_; }
  const std::vector<AgentTrack> & agents() const noexcept { return agents_; }
  std::size_t focal_index() const noexcept { return focal_index_; }
  const AgentTrack & focal() const { return agents_[focal_index_]; }
  int density() const noexcept { return static_cast<int>(agents_.size()); }
  std::size_t t_obs() const noexcept { return agents_.front().observed.size(); }
  std::size_t t_pred() const noexcept { return agents_.front().future.size(); }
  const std::string & map_context() const noexcept { return map_context_; }

  /// Copy with a different id; geometry unchanged.
  Scene with_id(std::string scene_id) const;

  friend bool operator==(const Scene &, const Scene &) = default;

private:
  std::string scene_id_;
  std::vector<AgentTrack> agents_;
  std::size_t focal_index_;
  std::string map_context_;
};

/// Ordered scenes sharing the observed/future horizon lengths.
class Dataset
{
public:
  Dataset(std::size_t t_obs, std::size_t t_pred, std::vector<Scene> scenes = {});

  std::size_t t_obs() const noexcept { return t_obs_; }
  std::size_t t_pred() const noexcept { return t_pred_; }
  const std::vector<Scene> & scenes() const noexcept { return scenes_; }
  std::size_t size() const noexcept { return scenes_.size(); }
  bool empty() const noexcept { return scenes_.empty(); }
  const Scene & operator[](std::size_t i) const { return scenes_[i]; }

  std::vector<std::string> ids() const;

  /// Scenes whose id is in `ids`, kept in dataset order. Unknown ids throw.
  Dataset subset(const std::vector<std::string> & ids) const;

  friend bool operator==(const Dataset &, const Dataset &) = default;

private:
  std::size_t t_obs_;
  std::size_t t_pred_;
  std::vector<Scene> scenes_;
};

/// Rounds to the 9 significant digits the scene file stores.
double canonical_coordinate(double value);

std::string serialize_dataset(const Dataset & ds);
Dataset parse_dataset(std::string_view text);

Dataset load_dataset(const std::string & path);
void save_dataset(const Dataset & ds, const std::string & path);

}  // namespace sstp

#endif  // SSTP_SCENE_HPP_
