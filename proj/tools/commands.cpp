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

#include "commands.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "sstp/coreset.hpp"
#include "sstp/error.hpp"
#include "sstp/features.hpp"
#include "sstp/metrics.hpp"
#include "sstp/partition.hpp"
#include "sstp/predictor.hpp"
#include "sstp/synthetic.hpp"
#include "sstp/util.hpp"

namespace sstp::cli
{

namespace
{

struct GenSynthFlags
{
  SynthConfig config;
  std::uint64_t seed = 0;
  std::string out;
};

struct PretrainFlags
{
  std::string data;
  std::string out;
  std::size_t epochs = 5;
  double lr = 1e-2;
  std::uint64_t seed = 0;
  std::size_t hidden = 64;
  std::size_t latent = 32;
  std::size_t modes = 6;
};

struct ExtractFlags
{
  std::string params;
  std::string data;
  std::string out;
  std::size_t threads = 0;
};

struct SelectFlags
{
  std::string features;
  std::string data;
  std::string params;
  std::string out;
  std::string method = "sstp";
  std::string feature_space = "gradient";
  double alpha = 0.5;
  int tau = kDefaultTau;
  std::uint64_t seed = 0;
  bool per_bucket = false;
  bool include_self = false;
  std::size_t kmeans_iters = 100;
  std::size_t threads = 0;
};

struct EvalFlags
{
  std::string params;
  std::string data;
  std::string selection;
  std::string eval_data;
  std::string out;
  std::string table;
  std::vector<int> cuts{40, 60, 80};
  bool cumulative = false;
  bool full_arm = false;
  std::size_t epochs = 20;
  double lr = 1e-2;
  std::uint64_t seed = 0;
  std::size_t hidden = 64;
  std::size_t latent = 32;
  std::size_t modes = 6;
  double miss_threshold = kDefaultMissThreshold;
  std::size_t threads = 0;
};

struct StatsFlags
{
  std::string data;
  std::string features;
  std::string selection;
  int tau = kDefaultTau;
  int high_density = 40;
};

void write_text(const std::string & path, const std::string & text)
{
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  }
  f << text;
  if (!f) {
    throw Error(ErrorCode::kIo, "write to '" + path + "' failed");
  }
}

void cmd_gen_synth(const GenSynthFlags & f, std::ostream & out)
{
  if (f.config.num_scenes == 0) {
    SynthConfig probe = f.config;
    probe.num_scenes = 1;
    validate(probe);
    save_dataset(Dataset(f.config.t_obs, f.config.t_pred), f.out);
    out << "wrote 0 scenes to " << f.out << "\n";
    return;
  }
  const Dataset ds = generate_synthetic(f.config, f.seed);
  save_dataset(ds, f.out);
  out << "wrote " << ds.size() << " scenes to " << f.out << "\n";
}

void cmd_pretrain(const PretrainFlags & f, std::ostream & out)
{
  const Dataset ds = load_dataset(f.data);
  const auto dims = PredictorDims::for_horizons(ds.t_obs(), ds.t_pred(), f.hidden, f.latent, f.modes);
  const auto init = ToyPredictorParams::init(dims, f.seed);
  std::vector<double> losses;
  const auto trained = pretrain(init, ds, f.epochs, f.lr, f.seed, &losses);
  for (std::size_t e = 0; e < losses.size(); ++e) {
    out << "epoch " << e + 1 << " mean_loss=" << losses[e] << "\n";
  }
  save_params(trained, f.out);
  out << "wrote params " << params_fingerprint(trained) << " to " << f.out << "\n";
}

void cmd_extract(const ExtractFlags & f, std::ostream & out)
{
  const auto params = load_params(f.params);
  const Dataset ds = load_dataset(f.data);
  const FeatureSet fs = extract_features(params, ds, f.threads);
  write_features(fs, f.out);
  out << "wrote " << fs.size() << " features (dim " << fs.dim() << ") to " << f.out << "\n";
}

void cmd_select(const SelectFlags & f, std::ostream & out)
{
  SelectionOptions opt;
  opt.method = parse_method(f.method);
  opt.alpha = f.alpha;
  opt.tau = f.tau;
  opt.seed = f.seed;
  opt.per_bucket = f.per_bucket;
  opt.self_term = f.include_self ? SelfTerm::kInclude : SelfTerm::kExclude;
  opt.kmeans_max_iters = f.kmeans_iters;
  opt.threads = f.threads;
  if (!f.params.empty()) {
    opt.params_hash = file_fingerprint(f.params);
  }

  std::optional<FeatureSet> fs;
  if (f.feature_space == "input") {
    if (f.data.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--feature-space input needs --data");
    }
    if (opt.method == Method::kSstp) {
      throw Error(ErrorCode::kInvalidArgument, "sstp selects on gradient features");
    }
    fs = input_features(load_dataset(f.data));
    opt.features_hash = "input:" + file_fingerprint(f.data);
  } else {
    if (f.features.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--features is required for gradient feature space");
    }
    fs = read_features(f.features);
    opt.features_hash = file_fingerprint(f.features);
  }
  const SelectionResult result = select_coreset(*fs, opt);
  write_selection(result, f.out);
  out << "selected " << result.size() << " of " << fs->size() << " (" << result.meta.method << ", "
      << result.meta.scope << ") to " << f.out << "\n";
}

std::vector<Stratum> strata_from(const EvalFlags & f)
{
  if (f.cumulative) {
    return cumulative_strata();
  }
  std::vector<Stratum> out;
  int lo = 0;
  for (int cut : f.cuts) {
    if (cut <= lo) {
      throw Error(ErrorCode::kInvalidArgument, "--strata cut points must increase and be positive");
    }
    out.push_back({lo, cut, false});
    lo = cut;
  }
  out.push_back({lo, std::nullopt, false});
  return out;
}

void cmd_eval(const EvalFlags & f, std::ostream & out)
{
  const Dataset eval_set = load_dataset(f.eval_data);
  const auto strata = strata_from(f);
  ExperimentReport report;
  if (!f.params.empty()) {
    MetricReport r = evaluate(load_params(f.params), eval_set, strata, f.miss_threshold, f.threads);
    r.arm = "model";
    report.arms.push_back(std::move(r));
  } else {
    if (f.data.empty() || f.selection.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "eval needs --params, or --data with --selection");
    }
    const Dataset full = load_dataset(f.data);
    const SelectionResult sel = read_selection(f.selection);
    ExperimentConfig cfg;
    cfg.epochs = f.epochs;
    cfg.lr = f.lr;
    cfg.seed = f.seed;
    cfg.hidden = f.hidden;
    cfg.latent = f.latent;
    cfg.modes = f.modes;
    cfg.include_full = f.full_arm;
    cfg.strata = strata;
    cfg.miss_threshold = f.miss_threshold;
    cfg.subset_label = sel.meta.method;
    cfg.threads = f.threads;
    if (cfg.subset_label == "random") {
      cfg.subset_label = "selected-random";
    }
    report = run_experiment(full, sel.ids(), eval_set, cfg);
  }
  const std::string text = format_report(report, f.miss_threshold);
  if (f.out.empty()) {
    out << text;
  } else {
    write_text(f.out, text);
    out << "wrote report with " << report.arms.size() << " arm(s) to " << f.out << "\n";
  }
  if (!f.table.empty()) {
    write_text(f.table, format_table(report));
  }
}

void cmd_stats(const StatsFlags & f, std::ostream & out)
{
  std::vector<std::string> ids;
  std::vector<int> densities;
  if (!f.data.empty()) {
    const Dataset ds = load_dataset(f.data);
    for (const auto & s : ds.scenes()) {
      ids.push_back(s.scene_id());
      densities.push_back(s.density());
    }
  } else if (!f.features.empty()) {
    const FeatureSet fs = read_features(f.features);
    for (const auto & r : fs.records()) {
      ids.push_back(r.scene_id);
      densities.push_back(r.density);
    }
  } else {
    throw Error(ErrorCode::kInvalidArgument, "stats needs --data or --features");
  }
  if (ids.empty()) {
    out << "scenes=0\n";
    return;
  }
  const PartitionPlan plan = partition(ids, densities, f.tau);
  std::unordered_map<std::string, int> density_of;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    density_of[ids[i]] = densities[i];
  }
  std::optional<std::unordered_map<std::string, bool>> selected;
  if (!f.selection.empty()) {
    selected.emplace();
    for (const auto & id : read_selection(f.selection).ids()) {
      if (!density_of.count(id)) {
        throw Error(ErrorCode::kMembershipViolation, "selected id '" + id + "' is not in the input");
      }
      (*selected)[id] = true;
    }
  }
  const double total = static_cast<double>(ids.size());
  const double total_sel = selected ? static_cast<double>(selected->size()) : 0.0;
  out << "scenes=" << ids.size() << " tau=" << plan.tau << " rho_min=" << plan.rho_min
      << " buckets=" << plan.num_buckets() << "\n";
  out << "k\tlo\thi\tcount\tshare";
  if (selected) {
    out << "\tselected\tselected_share";
  }
  out << "\n";
  out << std::fixed << std::setprecision(6);
  for (const auto & b : plan.buckets) {
    out << b.k << "\t" << b.lo << "\t" << b.hi << "\t" << b.ids.size() << "\t"
        << static_cast<double>(b.ids.size()) / total;
    if (selected) {
      std::size_t c = 0;
      for (const auto & id : b.ids) {
        c += selected->count(id);
      }
      out << "\t" << c << "\t" << (total_sel > 0 ? static_cast<double>(c) / total_sel : 0.0);
    }
    out << "\n";
  }
  std::size_t high = 0;
  std::size_t high_sel = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (densities[i] >= f.high_density) {
      ++high;
      high_sel += selected && selected->count(ids[i]) ? 1 : 0;
    }
  }
  out << "high_density_share_before=" << static_cast<double>(high) / total << "\n";
  if (selected) {
    out << "high_density_share_after="
        << (total_sel > 0 ? static_cast<double>(high_sel) / total_sel : 0.0) << "\n";
  }
}

}  // namespace

int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Density-partitioned submodular coreset selection for trajectory datasets"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "worker cap (falls back to SSTP_THREADS)");

  GenSynthFlags gen;
  auto * gen_cmd = app.add_subcommand("gen-synth", "write a synthetic long-tail scene file");
  gen_cmd->add_option("--scenes", gen.config.num_scenes, "number of scenes")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--out", gen.out)->required();
  gen_cmd->add_option("--t-obs", gen.config.t_obs)->capture_default_str();
  gen_cmd->add_option("--t-pred", gen.config.t_pred)->capture_default_str();
  gen_cmd->add_option("--head-lo", gen.config.head.lo)->capture_default_str();
  gen_cmd->add_option("--head-hi", gen.config.head.hi)->capture_default_str();
  gen_cmd->add_option("--tail-lo", gen.config.tail.lo)->capture_default_str();
  gen_cmd->add_option("--tail-hi", gen.config.tail.hi)->capture_default_str();
  gen_cmd->add_option("--head-weight", gen.config.head_weight)->capture_default_str();
  gen_cmd->add_option("--noise", gen.config.noise_std, "position noise std, meters")->capture_default_str();
  gen_cmd->add_flag("--turn-from-present", gen.config.turn_from_present, "turns start at the last observed step");
  gen_cmd->add_option("--brake", gen.config.congestion_brake, "future deceleration at full congestion, m/s^2")
    ->capture_default_str()
    ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--id-prefix", gen.config.id_prefix)->capture_default_str();

  PretrainFlags pre;
  auto * pre_cmd = app.add_subcommand("pretrain", "briefly train the toy predictor");
  pre_cmd->add_option("--data", pre.data)->required()->check(CLI::ExistingFile);
  pre_cmd->add_option("--out", pre.out)->required();
  pre_cmd->add_option("--epochs", pre.epochs)->capture_default_str();
  pre_cmd->add_option("--lr", pre.lr)->capture_default_str()->check(CLI::PositiveNumber);
  pre_cmd->add_option("--seed", pre.seed)->capture_default_str();
  pre_cmd->add_option("--hidden", pre.hidden)->capture_default_str()->check(CLI::PositiveNumber);
  pre_cmd->add_option("--latent", pre.latent)->capture_default_str()->check(CLI::PositiveNumber);
  pre_cmd->add_option("--modes", pre.modes)->capture_default_str()->check(CLI::Range(2, 1024));

  ExtractFlags ext;
  auto * ext_cmd = app.add_subcommand("extract", "compute gradient features for every scene");
  ext_cmd->add_option("--params", ext.params)->required()->check(CLI::ExistingFile);
  ext_cmd->add_option("--data", ext.data)->required()->check(CLI::ExistingFile);
  ext_cmd->add_option("--out", ext.out)->required();

  SelectFlags sel;
  auto * sel_cmd = app.add_subcommand("select", "choose a coreset");
  sel_cmd->add_option("--features", sel.features)->check(CLI::ExistingFile);
  sel_cmd->add_option("--data", sel.data, "scene file, for --feature-space input")->check(CLI::ExistingFile);
  sel_cmd->add_option("--params", sel.params, "params file recorded in provenance")->check(CLI::ExistingFile);
  sel_cmd->add_option("--out", sel.out)->required();
  sel_cmd->add_option("--method", sel.method)
    ->capture_default_str()
    ->check(CLI::IsMember({"sstp", "random", "kmeans", "herding"}));
  sel_cmd->add_option("--feature-space", sel.feature_space)
    ->capture_default_str()
    ->check(CLI::IsMember({"gradient", "input"}));
  sel_cmd->add_option("--alpha", sel.alpha, "kept fraction in (0, 1]")
    ->capture_default_str()
    ->check(CLI::Validator(
      [](std::string & s) -> std::string {
        try {
          const double a = std::stod(s);
          return a > 0.0 && a <= 1.0 ? std::string() : "alpha must lie in (0, 1]";
        } catch (...) {
          return "alpha must be a number";
        }
      },
      "(0,1]"));
  sel_cmd->add_option("--tau", sel.tau)->capture_default_str()->check(CLI::PositiveNumber);
  sel_cmd->add_option("--seed", sel.seed)->capture_default_str();
  sel_cmd->add_flag("--per-bucket", sel.per_bucket, "run baselines under the density budget plan");
  sel_cmd->add_flag("--include-self", sel.include_self, "count a candidate's self-similarity in its gain");
  sel_cmd->add_option("--kmeans-iters", sel.kmeans_iters)->capture_default_str();

  EvalFlags ev;
  auto * ev_cmd = app.add_subcommand("eval", "score a model, or train paired arms on a selection");
  ev_cmd->add_option("--params", ev.params, "score this model directly")->check(CLI::ExistingFile);
  ev_cmd->add_option("--data", ev.data, "full training set")->check(CLI::ExistingFile);
  ev_cmd->add_option("--selection", ev.selection)->check(CLI::ExistingFile);
  ev_cmd->add_option("--eval-data", ev.eval_data, "held-out scenes")->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--out", ev.out, "report path (stdout when omitted)");
  ev_cmd->add_option("--table", ev.table, "also write a tab-separated table");
  ev_cmd->add_option("--strata", ev.cuts, "density cut points")->delimiter(',')->capture_default_str();
  ev_cmd->add_flag("--cumulative", ev.cumulative, "use overlapping >=40/>=60/>=80 strata");
  ev_cmd->add_flag("--full-arm", ev.full_arm, "also train on the whole training set");
  ev_cmd->add_option("--epochs", ev.epochs)->capture_default_str();
  ev_cmd->add_option("--lr", ev.lr)->capture_default_str()->check(CLI::PositiveNumber);
  ev_cmd->add_option("--seed", ev.seed)->capture_default_str();
  ev_cmd->add_option("--hidden", ev.hidden)->capture_default_str()->check(CLI::PositiveNumber);
  ev_cmd->add_option("--latent", ev.latent)->capture_default_str()->check(CLI::PositiveNumber);
  ev_cmd->add_option("--modes", ev.modes)->capture_default_str()->check(CLI::Range(2, 1024));
  ev_cmd->add_option("--miss-threshold", ev.miss_threshold)->capture_default_str()->check(CLI::PositiveNumber);

  StatsFlags st;
  auto * st_cmd = app.add_subcommand("stats", "density histogram by bucket, optionally before/after selection");
  st_cmd->add_option("--data", st.data)->check(CLI::ExistingFile);
  st_cmd->add_option("--features", st.features)->check(CLI::ExistingFile);
  st_cmd->add_option("--selection", st.selection)->check(CLI::ExistingFile);
  st_cmd->add_option("--tau", st.tau)->capture_default_str()->check(CLI::PositiveNumber);
  st_cmd->add_option("--high-density", st.high_density, "threshold for the high-density share")
    ->capture_default_str();

  for (auto * cmd : {ext_cmd, sel_cmd, ev_cmd}) {
    cmd->add_option("--threads", threads, "worker cap (falls back to SSTP_THREADS)");
  }

  std::vector<const char *> argv;
  for (const auto & a : args) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp & e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError & e) {
    err << e.what() << "\n";
    if (auto * sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << sub->help();
    }
    return kExitUsage;
  }

  ext.threads = sel.threads = ev.threads = resolve_threads(threads);
  try {
    if (*gen_cmd) {
      cmd_gen_synth(gen, out);
    } else if (*pre_cmd) {
      cmd_pretrain(pre, out);
    } else if (*ext_cmd) {
      cmd_extract(ext, out);
    } else if (*sel_cmd) {
      cmd_select(sel, out);
    } else if (*ev_cmd) {
      cmd_eval(ev, out);
    } else if (*st_cmd) {
      cmd_stats(st, out);
    }
  } catch (const Error & e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kInvalidArgument ? kExitUsage : kExitData;
  } catch (const std::exception & e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace sstp::cli
