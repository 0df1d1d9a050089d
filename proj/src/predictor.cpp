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

#include "sstp/predictor.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "sstp/error.hpp"
#include "sstp/rng.hpp"
#include "sstp/util.hpp"

namespace sstp
{

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace
{

constexpr char kParamsMagic[5] = {'T', 'P', 'R', 'D', '1'};

void check_shape(const Matrix & m, std::size_t rows, std::size_t cols, const char * name)
{
  if (static_cast<std::size_t>(m.rows()) != rows || static_cast<std::size_t>(m.cols()) != cols) {
    throw Error(
      ErrorCode::kDimensionMismatch, std::string(name) + " is " + std::to_string(m.rows()) + "x" +
                                       std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
                                       "x" + std::to_string(cols));
  }
}

void check_shape(const Vector & v, std::size_t n, const char * name)
{
  if (static_cast<std::size_t>(v.size()) != n) {
    throw Error(
      ErrorCode::kDimensionMismatch,
      std::string(name) + " has " + std::to_string(v.size()) + " entries, expected " + std::to_string(n));
  }
}

void check_gt(const PredictionOutput & out, std::span<const Point2> gt)
{
  if (gt.size() != out.t_pred) {
    throw Error(
      ErrorCode::kDimensionMismatch, "ground truth has " + std::to_string(gt.size()) +
                                       " steps, prediction has " + std::to_string(out.t_pred));
  }
}

double mean_displacement(const PredictionOutput & out, std::size_t mode, std::span<const Point2> gt)
{
  double sum = 0.0;
  for (std::size_t t = 0; t < out.t_pred; ++t) {
    const Point2 p = out.position(mode, t);
    sum += std::hypot(p.x - gt[t].x, p.y - gt[t].y);
  }
  return sum / static_cast<double>(out.t_pred);
}

double log_sum_exp(const Vector & v)
{
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

// Intermediate activations needed by the backward pass.
struct Activations
{
  Vector hidden;
  PredictionOutput output;
};

Activations forward_with_hidden(const ToyPredictorParams & p, const Vector & x)
{
  const PredictorDims d = p.dims();
  if (static_cast<std::size_t>(x.size()) != d.input) {
    throw Error(
      ErrorCode::kDimensionMismatch,
      "input has " + std::to_string(x.size()) + " entries, model expects " + std::to_string(d.input));
  }
  Activations a;
  a.hidden = (p.w1 * x + p.b1).array().tanh();
  PredictionOutput & out = a.output;
  out.modes = d.modes;
  out.t_pred = d.t_pred;
  out.latent = (p.w2 * a.hidden + p.b2).array().tanh();
  out.trajectories = p.w_traj * out.latent + p.b_traj;
  // Offsets to positions: running sum per mode and coordinate.
  for (std::size_t m = 0; m < d.modes; ++m) {
    for (std::size_t t = 1; t < d.t_pred; ++t) {
      const auto i = static_cast<Eigen::Index>((m * d.t_pred + t) * 2);
      out.trajectories[i] += out.trajectories[i - 2];
      out.trajectories[i + 1] += out.trajectories[i - 1];
    }
  }
  out.logits = p.w_logit * out.latent + p.b_logit;
  return a;
}

// d loss / d offsets: reverse running sum of the position gradient.
Vector offsets_gradient(const OutputGradient & g, std::size_t modes, std::size_t t_pred)
{
  Vector d_off = g.d_traj;
  for (std::size_t m = 0; m < modes; ++m) {
    for (std::size_t t = t_pred - 1; t-- > 0;) {
      const auto i = static_cast<Eigen::Index>((m * t_pred + t) * 2);
      d_off[i] += d_off[i + 2];
      d_off[i + 1] += d_off[i + 3];
    }
  }
  return d_off;
}

std::string serialize_params(const ToyPredictorParams & p)
{
  const PredictorDims d = p.dims();
  std::string out(kParamsMagic, sizeof(kParamsMagic));
  auto put_u32 = [&out](std::uint32_t v) { out.append(reinterpret_cast<const char *>(&v), 4); };
  put_u32(static_cast<std::uint32_t>(d.input));
  put_u32(static_cast<std::uint32_t>(d.hidden));
  put_u32(static_cast<std::uint32_t>(d.latent));
  put_u32(static_cast<std::uint32_t>(d.modes));
  put_u32(static_cast<std::uint32_t>(d.t_pred));
  put_u32(0);
  auto put = [&out](const double * data, Eigen::Index n) {
    out.append(reinterpret_cast<const char *>(data), static_cast<std::size_t>(n) * sizeof(double));
  };
  put(p.w1.data(), p.w1.size());
  put(p.b1.data(), p.b1.size());
  put(p.w2.data(), p.w2.size());
  put(p.b2.data(), p.b2.size());
  put(p.w_traj.data(), p.w_traj.size());
  put(p.b_traj.data(), p.b_traj.size());
  put(p.w_logit.data(), p.w_logit.size());
  put(p.b_logit.data(), p.b_logit.size());
  return out;
}

}  // namespace

PredictorDims PredictorDims::for_horizons(
  std::size_t t_obs, std::size_t t_pred, std::size_t hidden, std::size_t latent, std::size_t modes)
{
  return PredictorDims{input_dim_for(t_obs), hidden, latent, modes, t_pred};
}

PredictorDims ToyPredictorParams::dims() const
{
  const auto modes = static_cast<std::size_t>(w_logit.rows());
  const std::size_t t_pred = modes == 0 ? 0 : static_cast<std::size_t>(w_traj.rows()) / (modes * 2);
  return PredictorDims{
    static_cast<std::size_t>(w1.cols()), static_cast<std::size_t>(w1.rows()),
    static_cast<std::size_t>(w2.rows()), modes, t_pred};
}

void ToyPredictorParams::validate() const
{
  const PredictorDims d = dims();
  if (d.modes < 2) {
    throw Error(ErrorCode::kInvalidArgument, "predictor needs at least 2 modes");
  }
  if (d.input < 4 || d.hidden == 0 || d.latent == 0 || d.t_pred == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "predictor has an empty dimension");
  }
  check_shape(w1, d.hidden, d.input, "w1");
  check_shape(b1, d.hidden, "b1");
  check_shape(w2, d.latent, d.hidden, "w2");
  check_shape(b2, d.latent, "b2");
  check_shape(w_traj, d.traj_size(), d.latent, "w_traj");
  check_shape(b_traj, d.traj_size(), "b_traj");
  check_shape(w_logit, d.modes, d.latent, "w_logit");
  check_shape(b_logit, d.modes, "b_logit");
  const bool finite = w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite() &&
                      w_traj.allFinite() && b_traj.allFinite() && w_logit.allFinite() &&
                      b_logit.allFinite();
  if (!finite) {
    throw Error(ErrorCode::kNonFinite, "predictor parameters contain non-finite entries");
  }
}

ToyPredictorParams ToyPredictorParams::zeros(const PredictorDims & d)
{
  ToyPredictorParams p;
  p.w1 = Matrix::Zero(d.hidden, d.input);
  p.b1 = Vector::Zero(d.hidden);
  p.w2 = Matrix::Zero(d.latent, d.hidden);
  p.b2 = Vector::Zero(d.latent);
  p.w_traj = Matrix::Zero(d.traj_size(), d.latent);
  p.b_traj = Vector::Zero(d.traj_size());
  p.w_logit = Matrix::Zero(d.modes, d.latent);
  p.b_logit = Vector::Zero(d.modes);
  p.validate();
  return p;
}

ToyPredictorParams ToyPredictorParams::init(const PredictorDims & d, std::uint64_t seed)
{
  ToyPredictorParams p = zeros(d);
  Rng rng(seed, 0x1417);
  auto fill = [&rng](double * data, Eigen::Index n, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index i = 0; i < n; ++i) {
      data[i] = rng.uniform(-bound, bound);
    }
  };
  fill(p.w1.data(), p.w1.size(), d.input);
  fill(p.b1.data(), p.b1.size(), d.input);
  fill(p.w2.data(), p.w2.size(), d.hidden);
  fill(p.b2.data(), p.b2.size(), d.hidden);
  fill(p.w_traj.data(), p.w_traj.size(), d.latent);
  fill(p.b_traj.data(), p.b_traj.size(), d.latent);
  fill(p.w_logit.data(), p.w_logit.size(), d.latent);
  fill(p.b_logit.data(), p.b_logit.size(), d.latent);
  return p;
}

bool operator==(const ToyPredictorParams & a, const ToyPredictorParams & b)
{
  return a.dims() == b.dims() && a.w1 == b.w1 && a.b1 == b.b1 && a.w2 == b.w2 && a.b2 == b.b2 &&
         a.w_traj == b.w_traj && a.b_traj == b.b_traj && a.w_logit == b.w_logit && a.b_logit == b.b_logit;
}

Vector encode_input(const Scene & scene)
{
  const std::size_t t_obs = scene.t_obs();
  Vector x = Vector::Zero(static_cast<Eigen::Index>(input_dim_for(t_obs)));
  const auto & obs = scene.focal().observed;
  for (std::size_t t = 1; t < t_obs; ++t) {
    x[static_cast<Eigen::Index>((t - 1) * 2)] = obs[t].x - obs[t - 1].x;
    x[static_cast<Eigen::Index>((t - 1) * 2 + 1)] = obs[t].y - obs[t - 1].y;
  }
  const Point2 anchor = obs.back();
  double dist_sum = 0.0;
  for (std::size_t a = 0; a < scene.agents().size(); ++a) {
    if (a == scene.focal_index()) {
      continue;
    }
    const Point2 q = scene.agents()[a].observed.back();
    dist_sum += std::hypot(q.x - anchor.x, q.y - anchor.y);
  }
  const auto base = static_cast<Eigen::Index>((t_obs - 1) * 2);
  x[base] = scene.density() > 1 ? dist_sum / (scene.density() - 1) : 0.0;
  x[base + 1] = scene.density() / kDensityCap;
  return x;
}

Vector encode_input(const Scene & scene, const PredictorDims & dims)
{
  if (input_dim_for(scene.t_obs()) != dims.input || scene.t_pred() != dims.t_pred) {
    throw Error(
      ErrorCode::kHorizonMismatch, "scene '" + scene.scene_id() + "' horizons (" +
                                     std::to_string(scene.t_obs()) + ", " + std::to_string(scene.t_pred()) +
                                     ") do not fit the model");
  }
  return encode_input(scene);
}

std::vector<Point2> focal_future_relative(const Scene & scene)
{
  const Point2 anchor = scene.focal().observed.back();
  std::vector<Point2> out;
  out.reserve(scene.t_pred());
  for (const auto & p : scene.focal().future) {
    out.push_back({p.x - anchor.x, p.y - anchor.y});
  }
  return out;
}

PredictionOutput forward(const ToyPredictorParams & params, const Vector & input)
{
  return forward_with_hidden(params, input).output;
}

std::size_t best_mode(const PredictionOutput & output, std::span<const Point2> gt)
{
  check_gt(output, gt);
  std::size_t best = 0;
  double best_err = mean_displacement(output, 0, gt);
  for (std::size_t m = 1; m < output.modes; ++m) {
    const double e = mean_displacement(output, m, gt);
    if (e < best_err) {
      best_err = e;
      best = m;
    }
  }
  return best;
}

LossBreakdown loss(const PredictionOutput & output, std::span<const Point2> gt)
{
  check_gt(output, gt);
  if (static_cast<std::size_t>(output.logits.size()) != output.modes) {
    throw Error(ErrorCode::kDimensionMismatch, "logit count differs from mode count");
  }
  LossBreakdown l;
  l.best_mode = best_mode(output, gt);
  l.reg = mean_displacement(output, l.best_mode, gt);
  l.cls = log_sum_exp(output.logits) - output.logits[static_cast<Eigen::Index>(l.best_mode)];
  // Rounding can leave a tiny negative when one logit dominates.
  l.cls = std::max(l.cls, 0.0);
  l.total = l.reg + l.cls;
  return l;
}

OutputGradient grad_wrt_output(const PredictionOutput & output, std::span<const Point2> gt)
{
  OutputGradient g;
  g.best_mode = best_mode(output, gt);
  g.d_traj = Vector::Zero(output.trajectories.size());
  const double inv_t = 1.0 / static_cast<double>(output.t_pred);
  for (std::size_t t = 0; t < output.t_pred; ++t) {
    const Point2 p = output.position(g.best_mode, t);
    const double rx = p.x - gt[t].x;
    const double ry = p.y - gt[t].y;
    const double scale = inv_t / std::max(std::hypot(rx, ry), kGradEpsilon);
    const auto i = static_cast<Eigen::Index>((g.best_mode * output.t_pred + t) * 2);
    g.d_traj[i] = rx * scale;
    g.d_traj[i + 1] = ry * scale;
  }
  const double lse = log_sum_exp(output.logits);
  g.d_logits = (output.logits.array() - lse).exp();
  g.d_logits[static_cast<Eigen::Index>(g.best_mode)] -= 1.0;
  return g;
}

Vector pull_back_to_latent(const ToyPredictorParams & params, const OutputGradient & grad)
{
  const PredictorDims d = params.dims();
  const Vector d_off = offsets_gradient(grad, d.modes, d.t_pred);
  return params.w_traj.transpose() * d_off + params.w_logit.transpose() * grad.d_logits;
}

LossBreakdown sgd_step(ToyPredictorParams & p, const Scene & scene, double lr)
{
  const PredictorDims d = p.dims();
  const Vector x = encode_input(scene, d);
  const auto gt = focal_future_relative(scene);
  const Activations act = forward_with_hidden(p, x);
  const LossBreakdown l = loss(act.output, gt);
  if (!std::isfinite(l.total)) {
    return l;
  }
  const OutputGradient g = grad_wrt_output(act.output, gt);
  const Vector & e = act.output.latent;
  const Vector d_off = offsets_gradient(g, d.modes, d.t_pred);
  const Vector h = p.w_traj.transpose() * d_off + p.w_logit.transpose() * g.d_logits;
  const Vector dz2 = h.array() * (1.0 - e.array().square());
  const Vector da1 = p.w2.transpose() * dz2;
  const Vector dz1 = da1.array() * (1.0 - act.hidden.array().square());

  p.w_traj.noalias() -= lr * d_off * e.transpose();
  p.b_traj.noalias() -= lr * d_off;
  p.w_logit.noalias() -= lr * g.d_logits * e.transpose();
  p.b_logit.noalias() -= lr * g.d_logits;
  p.w2.noalias() -= lr * dz2 * act.hidden.transpose();
  p.b2.noalias() -= lr * dz2;
  p.w1.noalias() -= lr * dz1 * x.transpose();
  p.b1.noalias() -= lr * dz1;
  return l;
}

double mean_loss(const ToyPredictorParams & params, const Dataset & dataset)
{
  if (dataset.empty()) {
    return 0.0;
  }
  const PredictorDims d = params.dims();
  double sum = 0.0;
  for (const auto & s : dataset.scenes()) {
    sum += loss(forward(params, encode_input(s, d)), focal_future_relative(s)).total;
  }
  return sum / static_cast<double>(dataset.size());
}

ToyPredictorParams pretrain(
  const ToyPredictorParams & params, const Dataset & dataset, std::size_t epochs, double lr,
  std::uint64_t seed, std::vector<double> * epoch_losses)
{
  params.validate();
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw Error(ErrorCode::kInvalidArgument, "learning rate must be positive and finite");
  }
  ToyPredictorParams p = params;
  if (epochs == 0 || dataset.empty()) {
    return p;
  }
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t e = 0; e < epochs; ++e) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed, e);
    rng.shuffle(std::span<std::size_t>(order));
    double sum = 0.0;
    for (std::size_t i : order) {
      const LossBreakdown l = sgd_step(p, dataset[i], lr);
      if (!std::isfinite(l.total)) {
        throw Error(
          ErrorCode::kNonFinite, "loss diverged at epoch " + std::to_string(e) + " on scene '" +
                                   dataset[i].scene_id() + "'; learning rate too high?");
      }
      sum += l.total;
    }
    if (!p.w1.allFinite() || !p.w_traj.allFinite()) {
      throw Error(
        ErrorCode::kNonFinite, "parameters diverged at epoch " + std::to_string(e) + "; learning rate too high?");
    }
    if (epoch_losses != nullptr) {
      epoch_losses->push_back(sum / static_cast<double>(dataset.size()));
    }
  }
  return p;
}

void save_params(const ToyPredictorParams & params, const std::string & path)
{
  params.validate();
  const std::string bytes = serialize_params(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::kIo, "write to '" + path + "' failed");
  }
}

ToyPredictorParams load_params(const std::string & path)
{
  const std::string bytes = read_file_bytes(path);
  constexpr std::size_t kHeader = sizeof(kParamsMagic) + 6 * 4;
  if (bytes.size() < kHeader || std::memcmp(bytes.data(), kParamsMagic, sizeof(kParamsMagic)) != 0) {
    throw Error(ErrorCode::kFormat, "'" + path + "' is not a TPRD1 params file");
  }
  std::uint32_t dims[6];
  std::memcpy(dims, bytes.data() + sizeof(kParamsMagic), sizeof(dims));
  if (dims[5] != 0) {
    throw Error(ErrorCode::kFormat, "'" + path + "' has a nonzero reserved field");
  }
  const PredictorDims d{dims[0], dims[1], dims[2], dims[3], dims[4]};
  if (d.modes < 2 || d.input == 0 || d.hidden == 0 || d.latent == 0 || d.t_pred == 0) {
    throw Error(ErrorCode::kFormat, "'" + path + "' has invalid dimensions");
  }
  ToyPredictorParams p = ToyPredictorParams::zeros(d);
  std::size_t pos = kHeader;
  auto take = [&](double * data, Eigen::Index n) {
    const std::size_t len = static_cast<std::size_t>(n) * sizeof(double);
    if (pos + len > bytes.size()) {
      throw Error(ErrorCode::kFormat, "'" + path + "' is truncated");
    }
    std::memcpy(data, bytes.data() + pos, len);
    pos += len;
  };
  take(p.w1.data(), p.w1.size());
  take(p.b1.data(), p.b1.size());
  take(p.w2.data(), p.w2.size());
  take(p.b2.data(), p.b2.size());
  take(p.w_traj.data(), p.w_traj.size());
  take(p.b_traj.data(), p.b_traj.size());
  take(p.w_logit.data(), p.w_logit.size());
  take(p.b_logit.data(), p.b_logit.size());
  if (pos != bytes.size()) {
    throw Error(ErrorCode::kFormat, "'" + path + "' has trailing bytes");
  }
  p.validate();
  return p;
}

std::string params_fingerprint(const ToyPredictorParams & params)
{
  return hex64(fnv1a64(serialize_params(params)));
}

}  // namespace sstp
