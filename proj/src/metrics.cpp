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

#include "sstp/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "sstp/baselines.hpp"
#include "sstp/error.hpp"
#include "sstp/util.hpp"

namespace sstp
{

namespace
{

void check_modes(std::span<const Trajectory> modes, std::span<const Point2> gt)
{
  if (modes.empty() || gt.empty()) {
    throw Error(ErrorCode::kDimensionMismatch, "metrics need at least one mode and one step");
  }
  for (const auto & m : modes) {
    if (m.size() != gt.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "mode length differs from ground truth");
    }
  }
}

std::string num(double v)
{
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string & s)
{
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kParse, "report: bad number '" + s + "'");
  }
  return v;
}

Stratum parse_stratum(const std::string & text)
{
  Stratum s;
  if (text == "other") {
    s.catch_all = true;
    return s;
  }
  int lo = 0;
  char hi[16] = {0};
  if (std::sscanf(text.c_str(), "lo=%d hi=%15s", &lo, hi) != 2) {
    throw Error(ErrorCode::kParse, "report: bad stratum '" + text + "'");
  }
  s.lo = lo;
  if (std::string(hi) != "inf") {
    s.hi = static_cast<int>(parse_double(hi));
  }
  return s;
}

}  // namespace

std::vector<Trajectory> modes_of(const PredictionOutput & output)
{
  std::vector<Trajectory> modes(output.modes);
  for (std::size_t m = 0; m < output.modes; ++m) {
    for (std::size_t t = 0; t < output.t_pred; ++t) {
      modes[m].push_back(output.position(m, t));
    }
  }
  return modes;
}

double min_ade(std::span<const Trajectory> modes, std::span<const Point2> gt)
{
  check_modes(modes, gt);
  double best = std::numeric_limits<double>::infinity();
  for (const auto & m : modes) {
    double sum = 0.0;
    for (std::size_t t = 0; t < gt.size(); ++t) {
      sum += std::hypot(m[t].x - gt[t].x, m[t].y - gt[t].y);
    }
    best = std::min(best, sum / static_cast<double>(gt.size()));
  }
  return best;
}

double min_fde(std::span<const Trajectory> modes, std::span<const Point2> gt)
{
  check_modes(modes, gt);
  double best = std::numeric_limits<double>::infinity();
  for (const auto & m : modes) {
    best = std::min(best, std::hypot(m.back().x - gt.back().x, m.back().y - gt.back().y));
  }
  return best;
}

int miss_rate_indicator(std::span<const Trajectory> modes, std::span<const Point2> gt, double threshold)
{
  if (!(threshold > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "miss threshold must be positive");
  }
  return min_fde(modes, gt) > threshold ? 1 : 0;
}

std::string Stratum::label() const
{
  if (catch_all) {
    return "other";
  }
  return "lo=" + std::to_string(lo) + " hi=" + (hi ? std::to_string(*hi) : std::string("inf"));
}

std::vector<Stratum> default_strata()
{
  return {{0, 40, false}, {40, 60, false}, {60, 80, false}, {80, std::nullopt, false}};
}

std::vector<Stratum> cumulative_strata()
{
  return {{0, 40, false}, {40, std::nullopt, false}, {60, std::nullopt, false}, {80, std::nullopt, false}};
}

const StratumMetrics & MetricReport::stratum(const Stratum & s) const
{
  for (const auto & m : per_stratum) {
    if (m.stratum.lo == s.lo && m.stratum.hi == s.hi && m.stratum.catch_all == s.catch_all) {
      return m;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "report has no stratum " + s.label());
}

MetricReport evaluate(
  const ToyPredictorParams & params, const Dataset & eval_set, const std::vector<Stratum> & strata,
  double miss_threshold, std::size_t threads)
{
  if (eval_set.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "evaluation set is empty");
  }
  if (!(miss_threshold > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "miss threshold must be positive");
  }
  const PredictorDims dims = params.dims();
  const std::size_t n = eval_set.size();
  std::vector<double> ade(n), fde(n);
  std::vector<int> miss(n);
  parallel_for(n, resolve_threads(threads), [&](std::size_t i) {
    const Scene & s = eval_set[i];
    const auto modes = modes_of(forward(params, encode_input(s, dims)));
    const auto gt = focal_future_relative(s);
    ade[i] = min_ade(modes, gt);
    fde[i] = min_fde(modes, gt);
    miss[i] = fde[i] > miss_threshold ? 1 : 0;
  });

  MetricReport report;
  report.count = n;
  std::vector<Stratum> bands;
  for (auto s : strata) {
    if (!s.catch_all) {
      bands.push_back(s);
    }
  }
  const bool uncovered = std::any_of(eval_set.scenes().begin(), eval_set.scenes().end(), [&](const Scene & s) {
    return std::none_of(bands.begin(), bands.end(), [&](const Stratum & b) { return b.contains(s.density()); });
  });
  if (uncovered) {
    bands.push_back(Stratum{0, std::nullopt, true});
  }
  for (const auto & b : bands) {
    report.per_stratum.push_back({b, 0, 0.0, 0.0, 0.0});
  }
  for (std::size_t i = 0; i < n; ++i) {
    report.min_ade += ade[i];
    report.min_fde += fde[i];
    report.miss_rate += miss[i];
    const int density = eval_set[i].density();
    bool placed = false;
    for (auto & row : report.per_stratum) {
      const bool hit = row.stratum.catch_all ? !placed : row.stratum.contains(density);
      if (hit) {
        ++row.count;
        row.min_ade += ade[i];
        row.min_fde += fde[i];
        row.miss_rate += miss[i];
        placed = true;
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  report.min_ade *= inv;
  report.min_fde *= inv;
  report.miss_rate *= inv;
  for (auto & row : report.per_stratum) {
    if (row.count > 0) {
      const double r = 1.0 / static_cast<double>(row.count);
      row.min_ade *= r;
      row.min_fde *= r;
      row.miss_rate *= r;
    }
  }
  return report;
}

const MetricReport & ExperimentReport::arm(const std::string & name) const
{
  for (const auto & a : arms) {
    if (a.arm == name) {
      return a;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "report has no arm '" + name + "'");
}

MetricReport train_and_evaluate(
  const Dataset & train_set, const Dataset & eval_set, const ExperimentConfig & config,
  const std::string & arm)
{
  const auto dims =
    PredictorDims::for_horizons(train_set.t_obs(), train_set.t_pred(), config.hidden, config.latent, config.modes);
  const auto init = ToyPredictorParams::init(dims, config.seed);
  const auto trained = pretrain(init, train_set, config.epochs, config.lr, config.seed);
  MetricReport r = evaluate(trained, eval_set, config.strata, config.miss_threshold, config.threads);
  r.arm = arm;
  r.training = TrainingMeta{config.epochs, config.lr, config.seed, train_set.size()};
  return r;
}

ExperimentReport run_experiment(
  const Dataset & full, const std::vector<std::string> & subset_ids, const Dataset & eval_set,
  const ExperimentConfig & config)
{
  const Dataset subset = full.subset(subset_ids);
  const auto all_ids = full.ids();
  std::vector<std::string> random_ids;
  for (std::size_t i : select_random_indices(full.size(), subset.size(), config.seed, 0x72616e64)) {
    random_ids.push_back(all_ids[i]);
  }
  ExperimentReport report;
  report.arms.push_back(train_and_evaluate(subset, eval_set, config, config.subset_label));
  report.arms.push_back(train_and_evaluate(full.subset(random_ids), eval_set, config, "random"));
  if (config.include_full) {
    report.arms.push_back(train_and_evaluate(full, eval_set, config, "full"));
  }
  return report;
}

std::string format_report(const ExperimentReport & report, double miss_threshold)
{
  std::ostringstream out;
  out << "#REPORT v1\n";
  out << "#NOTE miss_threshold_m=" << num(miss_threshold)
      << " is a common benchmark convention, not a derived value\n";
  for (const auto & a : report.arms) {
    out << "#ARM " << a.arm << "\n";
    out << "subset_size=" << a.training.subset_size << "\n";
    out << "epochs=" << a.training.epochs << "\n";
    out << "lr=" << num(a.training.lr) << "\n";
    out << "seed=" << a.training.seed << "\n";
    out << "count=" << a.count << "\n";
    out << "minADE=" << num(a.min_ade) << "\n";
    out << "minFDE=" << num(a.min_fde) << "\n";
    out << "MR=" << num(a.miss_rate) << "\n";
    for (const auto & s : a.per_stratum) {
      out << "#STRATUM " << s.stratum.label() << "\n";
      out << "count=" << s.count << "\n";
      out << "minADE=" << num(s.min_ade) << "\n";
      out << "minFDE=" << num(s.min_fde) << "\n";
      out << "MR=" << num(s.miss_rate) << "\n";
    }
  }
  return out.str();
}

ExperimentReport parse_report(const std::string & text)
{
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "#REPORT v1") {
    throw Error(ErrorCode::kParse, "report line 1: expected '#REPORT v1'");
  }
  ExperimentReport report;
  MetricReport * arm = nullptr;
  StratumMetrics * row = nullptr;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.rfind("#NOTE", 0) == 0) {
      continue;
    }
    if (line.rfind("#ARM ", 0) == 0) {
      report.arms.emplace_back();
      arm = &report.arms.back();
      arm->arm = line.substr(5);
      row = nullptr;
      continue;
    }
    if (line.rfind("#STRATUM ", 0) == 0) {
      if (arm == nullptr) {
        throw Error(ErrorCode::kParse, "report line " + std::to_string(lineno) + ": stratum outside an arm");
      }
      arm->per_stratum.push_back({parse_stratum(line.substr(9)), 0, 0.0, 0.0, 0.0});
      row = &arm->per_stratum.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || arm == nullptr) {
      throw Error(ErrorCode::kParse, "report line " + std::to_string(lineno) + ": expected key=value in an arm");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    const double v = parse_double(value);
    auto set_metric = [&](std::size_t & count, double & ade, double & fde, double & mr) {
      if (key == "count") {
        count = static_cast<std::size_t>(v);
      } else if (key == "minADE") {
        ade = v;
      } else if (key == "minFDE") {
        fde = v;
      } else if (key == "MR") {
        mr = v;
      } else {
        return false;
      }
      return true;
    };
    bool known = row != nullptr ? set_metric(row->count, row->min_ade, row->min_fde, row->miss_rate)
                                : set_metric(arm->count, arm->min_ade, arm->min_fde, arm->miss_rate);
    if (!known && row == nullptr) {
      known = true;
      if (key == "subset_size") {
        arm->training.subset_size = static_cast<std::size_t>(v);
      } else if (key == "epochs") {
        arm->training.epochs = static_cast<std::size_t>(v);
      } else if (key == "lr") {
        arm->training.lr = v;
      } else if (key == "seed") {
        auto res = std::from_chars(value.data(), value.data() + value.size(), arm->training.seed);
        known = res.ec == std::errc() && res.ptr == value.data() + value.size();
      } else {
        known = false;
      }
    }
    if (!known) {
      throw Error(ErrorCode::kParse, "report line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return report;
}

std::string format_table(const ExperimentReport & report)
{
  std::ostringstream out;
  out << "arm\tstratum\tcount\tminADE\tminFDE\tMR\n";
  for (const auto & a : report.arms) {
    out << a.arm << "\tall\t" << a.count << "\t" << num(a.min_ade) << "\t" << num(a.min_fde) << "\t"
        << num(a.miss_rate) << "\n";
    for (const auto & s : a.per_stratum) {
      std::string label = s.stratum.catch_all
                            ? "other"
                            : std::to_string(s.stratum.lo) + "-" + (s.stratum.hi ? std::to_string(*s.stratum.hi) : "inf");
      out << a.arm << "\t" << label << "\t" << s.count << "\t" << num(s.min_ade) << "\t" << num(s.min_fde)
          << "\t" << num(s.miss_rate) << "\n";
    }
  }
  return out.str();
}

}  // namespace sstp
