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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "oracles.hpp"
#include "sstp/error.hpp"
#include "sstp/rng.hpp"
#include "sstp/submodular.hpp"

using namespace sstp;

namespace
{

using oracle::Vecs;

Vecs random_bucket(Rng & rng, std::size_t n, std::size_t dim, bool with_duplicates)
{
  Vecs v(n, std::vector<double>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    if (with_duplicates && i > 0 && rng.bernoulli(0.25)) {
      v[i] = v[rng.below(i)];
      continue;
    }
    for (auto & x : v[i]) {
      x = rng.normal();
    }
  }
  return v;
}

}  // namespace

TEST_CASE("cosine: self, orthogonal, opposite, zero")
{
  const std::vector<double> a{0.3, -2.0, 5.0};
  CHECK(cosine_sim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine_sim(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
  CHECK(cosine_sim(std::vector<double>{1, 0}, std::vector<double>{-1, 0}) == -1.0);
  CHECK(std::abs(cosine_sim(std::vector<double>{0, 0}, std::vector<double>{1, 2})) < 1e-9);
  CHECK_THROWS_AS(cosine_sim(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
}

TEST_CASE("gain: duplicate pair plus an orthogonal vector")
{
  const Vecs v{{1, 0}, {1, 0}, {0, 1}};
  BucketSelector s(v);
  CHECK(s.gain(0) == doctest::Approx(-1.0));
  CHECK(s.gain(1) == doctest::Approx(-1.0));
  CHECK(s.gain(2) == doctest::Approx(0.0));
  CHECK(s.step() == 0);
  CHECK(s.gain(1) == doctest::Approx(1.0));
  CHECK(s.gain(2) == doctest::Approx(0.0));
  CHECK(s.step() == 2);
  CHECK(s.selected() == std::vector<std::size_t>{0, 2});
  CHECK_THROWS_AS(s.gain(0), Error);
  CHECK_THROWS_AS(s.gain(3), Error);
}

TEST_CASE("gain: orthogonal bucket stays at zero")
{
  const Vecs v{{1, 0, 0, 0}, {0, 2, 0, 0}, {0, 0, 3, 0}, {0, 0, 0, 4}};
  BucketSelector s(v);
  for (int step = 0; step < 4; ++step) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (!s.is_selected(j)) {
        CHECK(s.gain(j) == 0.0);
      }
    }
    CHECK(s.step() == static_cast<std::size_t>(step));
  }
  CHECK_THROWS_AS(s.step(), Error);
}

TEST_CASE("select: budget edges")
{
  const Vecs v{{1, 0}, {1, 0}, {0, 1}};
  CHECK(select_bucket(v, 2) == std::vector<std::size_t>{0, 2});
  CHECK(select_bucket(v, 0).empty());
  const auto all = select_bucket(v, 3);
  CHECK(all == std::vector<std::size_t>{0, 2, 1});
  try {
    select_bucket(v, 4);
    FAIL("expected a throw");
  } catch (const Error & e) {
    CHECK(e.code() == ErrorCode::kBudgetViolation);
  }
  CHECK(select_bucket(Vecs{}, 0).empty());
  CHECK_THROWS_AS(select_bucket(Vecs{{1, 0}, {1}}, 1), Error);
}

TEST_CASE("select: matches the from-scratch oracle")
{
  Rng rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + rng.below(20);
    const Vecs v = random_bucket(rng, n, 1 + rng.below(8), trial % 2 == 0);
    const std::size_t n_k = rng.below(n + 1);
    CHECK(select_bucket(v, n_k) == oracle::select(v, n_k));
  }
}

TEST_CASE("select: incremental sums track naive recomputation")
{
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 20 + rng.below(100);
    const Vecs v = random_bucket(rng, n, 1 + rng.below(16), true);
    BucketSelector s(v);
    std::vector<char> sel(n, 0);
    for (std::size_t step = 0; step < n; ++step) {
      sel[s.step()] = 1;
      for (std::size_t j = 0; j < n; ++j) {
        double tot = 0.0;
        double in_sel = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i != j) {
            const double c = oracle::cos(v[i], v[j]);
            tot += c;
            in_sel += sel[i] ? c : 0.0;
          }
        }
        CHECK(std::abs(s.total_sim()[j] - tot) <= 1e-9);
        CHECK(std::abs(s.sel_sim()[j] - in_sel) <= 1e-9);
        if (!sel[j]) {
          CHECK(std::abs(s.gain(j) - oracle::gain(v, sel, j)) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("select: include-self and exclude-self agree")
{
  Rng rng(55);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    const Vecs v = random_bucket(rng, n, 1 + rng.below(8), trial % 3 == 0);
    const std::size_t n_k = rng.below(n + 1);
    CHECK(select_bucket(v, n_k, SelfTerm::kInclude) == select_bucket(v, n_k, SelfTerm::kExclude));
  }
  BucketSelector inc(Vecs{{1, 0}, {1, 0}, {0, 1}}, SelfTerm::kInclude);
  CHECK(inc.gain(0) == doctest::Approx(-2.0));
  CHECK(inc.gain(2) == doctest::Approx(-1.0));
}

TEST_CASE("select: positive rescaling leaves the sequence unchanged")
{
  Rng rng(91);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.below(30);
    Vecs v = random_bucket(rng, n, 1 + rng.below(6), false);
    Vecs scaled = v;
    const double c = std::exp(rng.uniform(-5.0, 5.0));
    for (auto & row : scaled) {
      for (auto & x : row) {
        x *= c;
      }
    }
    const std::size_t n_k = rng.below(n + 1);
    CHECK(select_bucket(v, n_k) == select_bucket(scaled, n_k));
  }
}

TEST_CASE("select: zero vectors are neutral and still selectable")
{
  const Vecs v{{0, 0}, {1, 0}, {1, 0}, {0, 1}};
  BucketSelector s(v);
  CHECK(std::abs(s.gain(0)) < 1e-9);
  CHECK(s.norms()[0] == 0.0);
  const auto all = select_bucket(v, 4);
  CHECK(all.size() == 4);
  CHECK(all.front() == 1);
}

TEST_CASE("select: state invariant on selected similarity")
{
  Rng rng(3);
  const Vecs v = random_bucket(rng, 50, 5, true);
  BucketSelector s(v);
  for (std::size_t step = 0; step < 50; ++step) {
    s.step();
    for (std::size_t j = 0; j < 50; ++j) {
      // Cosines lie in [-1, 1]: sel_sim is bounded by the other selected count, and
      // total_sim - sel_sim (the unselected sum) by the other unselected count.
      const double others_sel = static_cast<double>(s.selected().size() - (s.is_selected(j) ? 1 : 0));
      const double others_unsel = 49.0 - others_sel;
      CHECK(std::abs(s.sel_sim()[j]) <= others_sel + 1e-12);
      CHECK(std::abs(s.total_sim()[j] - s.sel_sim()[j]) <= others_unsel + 1e-12);
    }
  }
}
