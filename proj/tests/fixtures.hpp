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

#ifndef SSTP_TESTS_FIXTURES_HPP_
#define SSTP_TESTS_FIXTURES_HPP_

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sstp/scene.hpp"

namespace sstp::testing
{

/// Scratch directory removed on scope exit.
class TempDir
{
public:
  TempDir()
  {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("sstp_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir &) = delete;
  TempDir & operator=(const TempDir &) = delete;

  std::string file(const std::string & name) const { return (path_ / name).string(); }

private:
  std::filesystem::path path_;
};

/// Agent moving with constant velocity (vx, vy) from (x0, y0).
inline AgentTrack straight_track(
  double x0, double y0, double vx, double vy, std::size_t t_obs, std::size_t t_pred)
{
  AgentTrack a;
  for (std::size_t t = 0; t < t_obs + t_pred; ++t) {
    const Point2 p{x0 + vx * static_cast<double>(t), y0 + vy * static_cast<double>(t)};
    (t < t_obs ? a.observed : a.future).push_back(p);
  }
  return a;
}

/// Scene with `density` agents; the focal one moves at (vx, vy), the others sit on a ring.
inline Scene crowd_scene(
  const std::string & id, int density, double vx, double vy, std::size_t t_obs = 4,
  std::size_t t_pred = 3)
{
  std::vector<AgentTrack> agents;
  agents.push_back(straight_track(0.0, 0.0, vx, vy, t_obs, t_pred));
  for (int i = 1; i < density; ++i) {
    agents.push_back(straight_track(static_cast<double>(i), 1.0, 0.0, 0.5, t_obs, t_pred));
  }
  return Scene(id, std::move(agents), 0);
}

// Independent SSTF1 encoder, byte by byte, the way an external producer would write it.
struct Sstf1Writer
{
  std::string bytes;

  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f32(float v)
  {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    le(bits, 4);
  }
  void le(std::uint64_t v, int n)
  {
    for (int i = 0; i < n; ++i) {
      bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
  }

  void header(std::uint32_t dim, std::uint64_t count)
  {
    bytes = "SSTF1";
    u32(dim);
    u64(count);
  }
  void record(const std::string & id, std::uint32_t density, const std::vector<float> & g)
  {
    u16(static_cast<std::uint16_t>(id.size()));
    bytes += id;
    u32(density);
    for (float v : g) {
      f32(v);
    }
  }
  void save(const std::string & path) const
  {
    std::ofstream o(path, std::ios::binary);
    o.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
};


}  // namespace sstp::testing

#endif  // SSTP_TESTS_FIXTURES_HPP_
