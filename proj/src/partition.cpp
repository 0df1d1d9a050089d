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

#include "sstp/partition.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "sstp/error.hpp"
#include "sstp/util.hpp"

namespace sstp
{

namespace
{

std::string format_double(double v)
{
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(const std::string & s, const std::string & key)
{
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kParse, "selection META: bad value for '" + key + "': '" + s + "'");
  }
  return v;
}

}  // namespace

PartitionPlan partition(std::span<const std::string> ids, std::span<const int> densities, int tau)
{
  if (tau < 1) {
    throw Error(ErrorCode::kInvalidArgument, "tau must be >= 1");
  }
  if (ids.size() != densities.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "ids and densities differ in length");
  }
  if (ids.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot partition an empty set");
  }
  const auto [lo_it, hi_it] = std::minmax_element(densities.begin(), densities.end());
  PartitionPlan plan;
  plan.tau = tau;
  plan.rho_min = *lo_it;
  plan.total = ids.size();
  const int span = *hi_it - *lo_it + 1;
  const int num_buckets = (span + tau - 1) / tau;
  plan.buckets.resize(static_cast<std::size_t>(num_buckets));
  for (int k = 1; k <= num_buckets; ++k) {
    Bucket & b = plan.buckets[static_cast<std::size_t>(k - 1)];
    b.k = k;
    b.lo = plan.rho_min + (k - 1) * tau;
    b.hi = plan.rho_min + k * tau;
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto k = static_cast<std::size_t>((densities[i] - plan.rho_min) / tau);
    plan.buckets[k].members.push_back(i);
    plan.buckets[k].ids.push_back(ids[i]);
  }
  return plan;
}

PartitionPlan partition(const FeatureSet & features, int tau)
{
  std::vector<std::string> ids;
  std::vector<int> densities;
  ids.reserve(features.size());
  densities.reserve(features.size());
  for (const auto & r : features.records()) {
    ids.push_back(r.scene_id);
    densities.push_back(r.density);
  }
  return partition(ids, densities, tau);
}

PartitionPlan partition(const Dataset & dataset, int tau)
{
  std::vector<int> densities;
  densities.reserve(dataset.size());
  for (const auto & s : dataset.scenes()) {
    densities.push_back(s.density());
  }
  const auto ids = dataset.ids();
  return partition(ids, densities, tau);
}

std::size_t BudgetPlan::budget_for(int k) const
{
  for (const auto & b : per_bucket) {
    if (b.k == k) {
      return b.n;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "no budget for bucket " + std::to_string(k));
}

std::size_t BudgetPlan::allocated() const
{
  std::size_t s = 0;
  for (const auto & b : per_bucket) {
    s += b.n;
  }
  return s;
}

void check_alpha(double alpha)
{
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1], got " + format_double(alpha));
  }
}

std::size_t total_budget(double alpha, std::size_t n)
{
  check_alpha(alpha);
  const double raw = alpha * static_cast<double>(n);
  // 0.29 * 100 evaluates to 28.999999999999996; treat that as 29.
  const double nearest = std::round(raw);
  const double b = std::abs(raw - nearest) <= 1e-9 * std::max(1.0, raw) ? nearest : std::floor(raw);
  return std::min(n, static_cast<std::size_t>(b));
}

BudgetPlan dynamic_budget(const PartitionPlan & plan, double alpha)
{
  BudgetPlan out;
  out.alpha = alpha;
  std::size_t population = 0;
  for (const auto & b : plan.buckets) {
    population += b.members.size();
  }
  out.total = total_budget(alpha, population);
  // A budget that covers the whole set keeps it whole. The reverse-order rule
  // alone would starve a sparse top bucket whenever K exceeds what is left.
  const bool keep_all = out.total == population;
  std::size_t remaining = out.total;
  for (std::size_t idx = plan.buckets.size(); idx-- > 0;) {
    const Bucket & b = plan.buckets[idx];
    const std::size_t share = remaining / static_cast<std::size_t>(b.k);
    const std::size_t n = keep_all || b.members.size() <= share ? b.members.size() : share;
    out.per_bucket.push_back({b.k, n});
    remaining -= n;
  }
  return out;
}

std::vector<std::string> SelectionResult::ids() const
{
  std::vector<std::string> out;
  out.reserve(size());
  for (const auto & b : buckets) {
    out.insert(out.end(), b.ids.begin(), b.ids.end());
  }
  return out;
}

std::size_t SelectionResult::size() const
{
  std::size_t n = 0;
  for (const auto & b : buckets) {
    n += b.ids.size();
  }
  return n;
}

SelectionResult assemble(
  const PartitionPlan & plan, const BudgetPlan & budgets,
  const std::vector<std::vector<std::string>> & per_bucket, Provenance meta)
{
  if (per_bucket.size() != plan.buckets.size()) {
    throw Error(
      ErrorCode::kInvalidArgument, "got selections for " + std::to_string(per_bucket.size()) +
                                     " buckets, plan has " + std::to_string(plan.buckets.size()));
  }
  SelectionResult result;
  result.meta = std::move(meta);
  for (const auto & bb : budgets.per_bucket) {
    const Bucket & bucket = plan.bucket(bb.k);
    const auto & chosen = per_bucket[static_cast<std::size_t>(bb.k - 1)];
    if (chosen.size() != bb.n) {
      throw Error(
        ErrorCode::kBudgetViolation, "bucket " + std::to_string(bb.k) + " selected " +
                                       std::to_string(chosen.size()) + ", budget is " + std::to_string(bb.n));
    }
    std::unordered_set<std::string_view> members(bucket.ids.begin(), bucket.ids.end());
    std::unordered_set<std::string_view> seen;
    for (const auto & id : chosen) {
      if (!members.count(id)) {
        throw Error(
          ErrorCode::kMembershipViolation, "'" + id + "' is not in bucket " + std::to_string(bb.k));
      }
      if (!seen.insert(id).second) {
        throw Error(
          ErrorCode::kMembershipViolation, "'" + id + "' selected twice in bucket " + std::to_string(bb.k));
      }
    }
    result.buckets.push_back({bb.k, chosen});
  }
  return result;
}

void write_selection(const SelectionResult & result, const std::string & path)
{
  const Provenance & m = result.meta;
  std::string out = "#META method=" + m.method + " scope=" + m.scope + " alpha=" + format_double(m.alpha) +
                    " tau=" + std::to_string(m.tau) + " seed=" + std::to_string(m.seed) +
                    " features=" + m.features_hash + " params=" + m.params_hash + " buckets=";
  if (result.buckets.empty()) {
    out += "-";
  }
  for (std::size_t i = 0; i < result.buckets.size(); ++i) {
    if (i > 0) {
      out += ',';
    }
    const auto & b = result.buckets[i];
    out += (b.k == 0 ? std::string("global") : std::to_string(b.k)) + ":" + std::to_string(b.ids.size());
  }
  out += '\n';
  for (const auto & b : result.buckets) {
    for (const auto & id : b.ids) {
      out += id;
      out += '\n';
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  }
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) {
    throw Error(ErrorCode::kIo, "write to '" + path + "' failed");
  }
}

SelectionResult read_selection(const std::string & path)
{
  std::istringstream in(read_file_bytes(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("#META ", 0) != 0) {
    throw Error(ErrorCode::kParse, "'" + path + "' line 1: expected #META header");
  }
  std::map<std::string, std::string> kv;
  std::istringstream header(line.substr(6));
  std::string tok;
  while (header >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kParse, "'" + path + "' line 1: token '" + tok + "' is not key=value");
    }
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  for (const char * key : {"method", "scope", "alpha", "tau", "seed", "features", "params", "buckets"}) {
    if (!kv.count(key)) {
      throw Error(ErrorCode::kParse, "'" + path + "' META lacks '" + key + "'");
    }
  }
  SelectionResult result;
  result.meta.method = kv["method"];
  result.meta.scope = kv["scope"];
  result.meta.alpha = parse_number<double>(kv["alpha"], "alpha");
  result.meta.tau = parse_number<int>(kv["tau"], "tau");
  result.meta.seed = parse_number<std::uint64_t>(kv["seed"], "seed");
  result.meta.features_hash = kv["features"];
  result.meta.params_hash = kv["params"];

  std::vector<std::pair<int, std::size_t>> layout;
  if (kv["buckets"] != "-") {
    std::istringstream bl(kv["buckets"]);
    std::string entry;
    while (std::getline(bl, entry, ',')) {
      const auto colon = entry.find(':');
      if (colon == std::string::npos) {
        throw Error(ErrorCode::kParse, "'" + path + "' META buckets entry '" + entry + "' malformed");
      }
      const std::string k = entry.substr(0, colon);
      layout.emplace_back(
        k == "global" ? 0 : parse_number<int>(k, "buckets"),
        parse_number<std::size_t>(entry.substr(colon + 1), "buckets"));
    }
  }

  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    if (!seen.insert(line).second) {
      throw Error(ErrorCode::kDuplicateId, "'" + path + "' line " + std::to_string(lineno) + ": '" + line + "' repeated");
    }
    ids.push_back(line);
  }
  std::size_t pos = 0;
  for (const auto & [k, count] : layout) {
    if (pos + count > ids.size()) {
      throw Error(ErrorCode::kFormat, "'" + path + "' lists fewer ids than META buckets declare");
    }
    result.buckets.push_back({k, {ids.begin() + static_cast<std::ptrdiff_t>(pos),
                                  ids.begin() + static_cast<std::ptrdiff_t>(pos + count)}});
    pos += count;
  }
  if (pos != ids.size()) {
    throw Error(ErrorCode::kFormat, "'" + path + "' lists more ids than META buckets declare");
  }
  return result;
}

}  // namespace sstp
