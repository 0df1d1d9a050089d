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

#include "sstp/scene.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "sstp/error.hpp"
#include "sstp/util.hpp"

namespace sstp
{

namespace
{

constexpr int kSignificantDigits = 9;

void append_number(std::string & out, double v)
{
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, kSignificantDigits);
  out.append(buf, res.ptr);
}

bool valid_token(std::string_view s)
{
  return s.find_first_of("|;\n\r") == std::string_view::npos;
}

std::string_view trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void fail_at(std::size_t line, const std::string & what)
{
  throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_int(std::string_view s, std::size_t line, const char * what)
{
  T value{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    fail_at(line, std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  return value;
}

double parse_double(std::string_view s, std::size_t line)
{
  double value = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(value)) {
    fail_at(line, "bad coordinate '" + std::string(s) + "'");
  }
  return value;
}

std::vector<Point2> parse_points(std::string_view s, std::size_t line)
{
  std::vector<Point2> pts;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') {
      ++i;
    }
    if (i >= s.size()) {
      break;
    }
    auto j = s.find(' ', i);
    if (j == std::string_view::npos) {
      j = s.size();
    }
    const auto tok = s.substr(i, j - i);
    const auto comma = tok.find(',');
    if (comma == std::string_view::npos) {
      fail_at(line, "point without comma '" + std::string(tok) + "'");
    }
    pts.push_back({parse_double(tok.substr(0, comma), line), parse_double(tok.substr(comma + 1), line)});
    i = j;
  }
  return pts;
}

}  // namespace

Scene::Scene(
  std::string scene_id, std::vector<AgentTrack> agents, std::size_t focal_index,
  std::string map_context)
: scene_id_(std::move(scene_id)),
  agents_(std::move(agents)),
  focal_index_(focal_index),
  map_context_(std::move(map_context))
{
  if (scene_id_.empty() || !valid_token(scene_id_) || scene_id_.find(' ') != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "invalid scene id '" + scene_id_ + "'");
  }
  if (!valid_token(map_context_)) {
    throw Error(ErrorCode::kInvalidArgument, "map context of '" + scene_id_ + "' has reserved characters");
  }
  if (agents_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "scene '" + scene_id_ + "' has no agents");
  }
  if (focal_index_ >= agents_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "scene '" + scene_id_ + "' focal index out of range");
  }
  const std::size_t t_obs = agents_.front().observed.size();
  const std::size_t t_pred = agents_.front().future.size();
  if (t_obs < 2 || t_pred < 1) {
    throw Error(ErrorCode::kHorizonMismatch, "scene '" + scene_id_ + "' needs t_obs >= 2 and t_pred >= 1");
  }
  for (const auto & a : agents_) {
    if (a.observed.size() != t_obs || a.future.size() != t_pred) {
      throw Error(ErrorCode::kHorizonMismatch, "scene '" + scene_id_ + "' has ragged agent horizons");
    }
    for (const auto * seq : {&a.observed, &a.future}) {
      for (const auto & p : *seq) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
          throw Error(ErrorCode::kNonFinite, "scene '" + scene_id_ + "' has a non-finite coordinate");
        }
      }
    }
  }
}

Scene Scene::with_id(std::string scene_id) const
{
  return Scene(std::move(scene_id), agents_, focal_index_, map_context_);
}

Dataset::Dataset(std::size_t t_obs, std::size_t t_pred, std::vector<Scene> scenes)
: t_obs_(t_obs), t_pred_(t_pred), scenes_(std::move(scenes))
{
  if (t_obs_ < 2 || t_pred_ < 1) {
    throw Error(ErrorCode::kHorizonMismatch, "dataset needs t_obs >= 2 and t_pred >= 1");
  }
  std::unordered_set<std::string_view> seen;
  seen.reserve(scenes_.size());
  for (const auto & s : scenes_) {
    if (s.t_obs() != t_obs_ || s.t_pred() != t_pred_) {
      throw Error(ErrorCode::kHorizonMismatch, "scene '" + s.scene_id() + "' horizons differ from dataset");
    }
    if (!seen.insert(s.scene_id()).second) {
      throw Error(ErrorCode::kDuplicateId, "scene id '" + s.scene_id() + "' appears twice");
    }
  }
}

std::vector<std::string> Dataset::ids() const
{
  std::vector<std::string> out;
  out.reserve(scenes_.size());
  for (const auto & s : scenes_) {
    out.push_back(s.scene_id());
  }
  return out;
}

Dataset Dataset::subset(const std::vector<std::string> & ids) const
{
  std::unordered_set<std::string_view> wanted(ids.begin(), ids.end());
  std::vector<Scene> picked;
  picked.reserve(wanted.size());
  for (const auto & s : scenes_) {
    if (wanted.erase(s.scene_id()) > 0) {
      picked.push_back(s);
    }
  }
  if (!wanted.empty()) {
    throw Error(
      ErrorCode::kMembershipViolation, "id '" + std::string(*wanted.begin()) + "' is not in the dataset");
  }
  return Dataset(t_obs_, t_pred_, std::move(picked));
}

double canonical_coordinate(double value)
{
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, kSignificantDigits);
  double out = 0.0;
  std::from_chars(buf, res.ptr, out);
  return out;
}

std::string serialize_dataset(const Dataset & ds)
{
  std::string out = "#SCENES v1 t_obs=" + std::to_string(ds.t_obs()) +
                    " t_pred=" + std::to_string(ds.t_pred()) + "\n";
  for (const auto & s : ds.scenes()) {
    out += s.scene_id();
    out += '|';
    out += std::to_string(s.focal_index());
    out += '|';
    bool first_agent = true;
    for (const auto & a : s.agents()) {
      if (!first_agent) {
        out += ';';
      }
      first_agent = false;
      auto emit = [&out](const std::vector<Point2> & pts) {
        for (std::size_t i = 0; i < pts.size(); ++i) {
          if (i > 0) {
            out += ' ';
          }
          append_number(out, pts[i].x);
          out += ',';
          append_number(out, pts[i].y);
        }
      };
      emit(a.observed);
      out += " / ";
      emit(a.future);
    }
    if (!s.map_context().empty()) {
      out += '|';
      out += s.map_context();
    }
    out += '\n';
  }
  return out;
}

Dataset parse_dataset(std::string_view text)
{
  auto lines = split(text, '\n');
  if (lines.empty() || trim(lines[0]).empty()) {
    fail_at(1, "missing #SCENES header");
  }
  const auto header = trim(lines[0]);
  constexpr std::string_view kPrefix = "#SCENES v1 t_obs=";
  if (header.substr(0, kPrefix.size()) != kPrefix) {
    fail_at(1, "expected '#SCENES v1 t_obs=<int> t_pred=<int>'");
  }
  const auto rest = header.substr(kPrefix.size());
  const auto sp = rest.find(" t_pred=");
  if (sp == std::string_view::npos) {
    fail_at(1, "header lacks t_pred");
  }
  const auto t_obs = parse_int<std::size_t>(rest.substr(0, sp), 1, "t_obs");
  const auto t_pred = parse_int<std::size_t>(rest.substr(sp + 8), 1, "t_pred");
  if (t_obs < 2 || t_pred < 1) {
    throw Error(ErrorCode::kHorizonMismatch, "line 1: header needs t_obs >= 2 and t_pred >= 1");
  }

  std::vector<Scene> scenes;
  std::unordered_set<std::string> seen;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t lineno = li + 1;
    const auto line = trim(lines[li]);
    if (line.empty()) {
      continue;
    }
    const auto fields = split(line, '|');
    if (fields.size() < 3 || fields.size() > 4) {
      fail_at(lineno, "expected 'scene_id|focal_index|agents[|map]'");
    }
    const std::string id(trim(fields[0]));
    const auto focal = parse_int<std::size_t>(trim(fields[1]), lineno, "focal index");
    std::vector<AgentTrack> agents;
    for (auto agent_text : split(fields[2], ';')) {
      const auto slash = agent_text.find('/');
      if (slash == std::string_view::npos) {
        fail_at(lineno, "agent without '/' separator");
      }
      AgentTrack a;
      a.observed = parse_points(agent_text.substr(0, slash), lineno);
      a.future = parse_points(agent_text.substr(slash + 1), lineno);
      if (a.observed.size() != t_obs || a.future.size() != t_pred) {
        throw Error(
          ErrorCode::kHorizonMismatch, "line " + std::to_string(lineno) + ": agent has " +
                                         std::to_string(a.observed.size()) + "/" +
                                         std::to_string(a.future.size()) + " points, header says " +
                                         std::to_string(t_obs) + "/" + std::to_string(t_pred));
      }
      agents.push_back(std::move(a));
    }
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::kDuplicateId, "line " + std::to_string(lineno) + ": scene id '" + id + "' repeated");
    }
    std::string map = fields.size() == 4 ? std::string(fields[3]) : std::string();
    try {
      scenes.emplace_back(id, std::move(agents), focal, std::move(map));
    } catch (const Error & e) {
      fail_at(lineno, e.what());
    }
  }
  return Dataset(t_obs, t_pred, std::move(scenes));
}

Dataset load_dataset(const std::string & path)
{
  return parse_dataset(read_file_bytes(path));
}

void save_dataset(const Dataset & ds, const std::string & path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  }
  const auto text = serialize_dataset(ds);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw Error(ErrorCode::kIo, "write to '" + path + "' failed");
  }
}

}  // namespace sstp
