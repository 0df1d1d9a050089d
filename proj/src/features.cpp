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

#include "sstp/features.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include "sstp/error.hpp"
#include "sstp/util.hpp"

namespace sstp
{

namespace
{

constexpr char kFeatureMagic[5] = {'S', 'S', 'T', 'F', '1'};

template <typename T>
void put(std::string & out, T v)
{
  out.append(reinterpret_cast<const char *>(&v), sizeof(T));
}

class Reader
{
public:
  Reader(const std::string & bytes, const std::string & path) : bytes_(bytes), path_(path) {}

  template <typename T>
  T get()
  {
    T v;
    need(sizeof(T));
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string get_string(std::size_t n)
  {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

private:
  void need(std::size_t n) const
  {
    if (pos_ + n > bytes_.size()) {
      throw Error(ErrorCode::kFormat, "'" + path_ + "' is truncated at byte " + std::to_string(pos_));
    }
  }

  const std::string & bytes_;
  const std::string & path_;
  std::size_t pos_ = 0;
};

}  // namespace

FeatureSet::FeatureSet(std::size_t dim, std::vector<FeatureRecord> records)
: dim_(dim), records_(std::move(records))
{
  if (dim_ == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "feature dim must be positive");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto & r : records_) {
    if (r.g.size() != dim_) {
      throw Error(
        ErrorCode::kDimensionMismatch, "record '" + r.scene_id + "' has " + std::to_string(r.g.size()) +
                                         " values, set dim is " + std::to_string(dim_));
    }
    if (r.density < 1) {
      throw Error(ErrorCode::kInvalidArgument, "record '" + r.scene_id + "' has density < 1");
    }
    for (double v : r.g) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFinite, "record '" + r.scene_id + "' has a non-finite feature");
      }
    }
    if (!seen.insert(r.scene_id).second) {
      throw Error(ErrorCode::kDuplicateId, "feature id '" + r.scene_id + "' appears twice");
    }
  }
}

std::vector<double> gradient_feature(const ToyPredictorParams & params, const Scene & scene)
{
  const PredictorDims d = params.dims();
  const PredictionOutput out = forward(params, encode_input(scene, d));
  const OutputGradient grad = grad_wrt_output(out, focal_future_relative(scene));
  const Vector h = pull_back_to_latent(params, grad);
  std::vector<double> g(d.latent);
  for (std::size_t i = 0; i < d.latent; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    g[i] = h[k] * out.latent[k];
    if (!std::isfinite(g[i])) {
      throw Error(ErrorCode::kNonFinite, "non-finite feature for scene '" + scene.scene_id() + "'");
    }
  }
  return g;
}

FeatureSet extract_features(const ToyPredictorParams & params, const Dataset & dataset, std::size_t threads)
{
  params.validate();
  const PredictorDims d = params.dims();
  if (input_dim_for(dataset.t_obs()) != d.input || dataset.t_pred() != d.t_pred) {
    throw Error(ErrorCode::kHorizonMismatch, "dataset horizons do not fit the model");
  }
  std::vector<FeatureRecord> records(dataset.size());
  parallel_for(dataset.size(), resolve_threads(threads), [&](std::size_t i) {
    const Scene & s = dataset[i];
    records[i] = FeatureRecord{s.scene_id(), s.density(), gradient_feature(params, s)};
  });
  return FeatureSet(d.latent, std::move(records));
}

void write_features(const FeatureSet & fs, const std::string & path)
{
  std::string out(kFeatureMagic, sizeof(kFeatureMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(fs.dim()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(fs.size()));
  for (const auto & r : fs.records()) {
    if (r.scene_id.size() > UINT16_MAX) {
      throw Error(ErrorCode::kInvalidArgument, "scene id too long for SSTF1");
    }
    put<std::uint16_t>(out, static_cast<std::uint16_t>(r.scene_id.size()));
    out += r.scene_id;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(r.density));
    for (double v : r.g) {
      put<float>(out, static_cast<float>(v));
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

FeatureSet read_features(const std::string & path, std::optional<std::size_t> expected_dim)
{
  const std::string bytes = read_file_bytes(path);
  Reader in(bytes, path);
  if (bytes.size() < sizeof(kFeatureMagic) ||
      std::memcmp(bytes.data(), kFeatureMagic, sizeof(kFeatureMagic)) != 0) {
    throw Error(ErrorCode::kFormat, "'" + path + "' is not an SSTF1 feature file");
  }
  in.get_string(sizeof(kFeatureMagic));
  const auto dim = in.get<std::uint32_t>();
  const auto count = in.get<std::uint64_t>();
  if (dim == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "'" + path + "' declares dim 0");
  }
  if (expected_dim && *expected_dim != dim) {
    throw Error(
      ErrorCode::kDimensionMismatch,
      "'" + path + "' has dim " + std::to_string(dim) + ", expected " + std::to_string(*expected_dim));
  }
  // Smallest possible record: empty id + density + values.
  const std::uint64_t min_record = 2 + 4 + 4ULL * dim;
  if (count > in.remaining() / min_record) {
    throw Error(ErrorCode::kFormat, "'" + path + "' declares more records than it holds");
  }
  std::vector<FeatureRecord> records;
  records.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    FeatureRecord r;
    const auto len = in.get<std::uint16_t>();
    r.scene_id = in.get_string(len);
    r.density = static_cast<int>(in.get<std::uint32_t>());
    r.g.resize(dim);
    for (auto & v : r.g) {
      v = static_cast<double>(in.get<float>());
    }
    records.push_back(std::move(r));
  }
  if (in.remaining() != 0) {
    throw Error(
      ErrorCode::kDimensionMismatch,
      "'" + path + "' has " + std::to_string(in.remaining()) + " bytes beyond its declared records");
  }
  return FeatureSet(dim, std::move(records));
}

FeatureSet input_features(const Dataset & dataset)
{
  std::vector<FeatureRecord> records;
  records.reserve(dataset.size());
  for (const auto & s : dataset.scenes()) {
    const Vector x = encode_input(s);
    records.push_back({s.scene_id(), s.density(), std::vector<double>(x.data(), x.data() + x.size())});
  }
  return FeatureSet(input_dim_for(dataset.t_obs()), std::move(records));
}

FeatureSet quantize_f32(const FeatureSet & fs)
{
  std::vector<FeatureRecord> records = fs.records();
  for (auto & r : records) {
    for (auto & v : r.g) {
      v = static_cast<double>(static_cast<float>(v));
    }
  }
  return FeatureSet(fs.dim(), std::move(records));
}

}  // namespace sstp
