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
#include <fstream>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "sstp/error.hpp"
#include "sstp/partition.hpp"
#include "sstp/rng.hpp"

using namespace sstp;
using sstp::testing::TempDir;

namespace
{

struct Input
{
  std::vector<std::string> ids;
  std::vector<int> dens;
};

Input make_input(const std::vector<int> & dens)
{
  Input in;
  in.dens = dens;
  for (std::size_t i = 0; i < dens.size(); ++i) {
    in.ids.push_back("s" + std::to_string(i));
  }
  return in;
}

PartitionPlan plan_of(const Input & in, int tau)
{
  return partition(std::span<const std::string>(in.ids), std::span<const int>(in.dens), tau);
}

// Plan with bucket sizes given for k = 1..K (densities 1..K with tau = 1).
PartitionPlan plan_with_sizes(const std::vector<std::size_t> & sizes)
{
  std::vector<int> dens;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    dens.insert(dens.end(), sizes[k], static_cast<int>(k + 1));
  }
  // Empty leading buckets would shift rho_min; anchor it with a zero-size guard.
  REQUIRE((sizes.empty() || sizes.front() > 0));
  return plan_of(make_input(dens), 1);
}

ErrorCode code_of(auto && fn)
{
  try {
    fn();
  } catch (const Error & e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("partition: identical densities form one bucket")
{
  const auto plan = plan_of(make_input({3, 3, 3}), 5);
  REQUIRE(plan.num_buckets() == 1);
  CHECK(plan.rho_min == 3);
  CHECK(plan.bucket(1).ids.size() == 3);
  CHECK(plan.bucket(1).lo == 3);
  CHECK(plan.bucket(1).hi == 8);
}

TEST_CASE("partition: densities 2, 7, 12 with tau 5")
{
  const auto plan = plan_of(make_input({12, 2, 7}), 5);
  REQUIRE(plan.num_buckets() == 3);
  CHECK(plan.rho_min == 2);
  CHECK(plan.bucket(1).lo == 2);
  CHECK(plan.bucket(1).hi == 7);
  CHECK(plan.bucket(2).lo == 7);
  CHECK(plan.bucket(3).hi == 17);
  CHECK(plan.bucket(1).ids == std::vector<std::string>{"s1"});
  CHECK(plan.bucket(2).ids == std::vector<std::string>{"s2"});
  CHECK(plan.bucket(3).ids == std::vector<std::string>{"s0"});
}

TEST_CASE("partition: wide tau collapses to one bucket, gaps stay as empty buckets")
{
  CHECK(plan_of(make_input({4, 9, 13}), 10).num_buckets() == 1);
  CHECK(plan_of(make_input({4, 9, 13}), 100).num_buckets() == 1);
  const auto gap = plan_of(make_input({2, 3, 45}), 10);
  REQUIRE(gap.num_buckets() == 5);
  CHECK(gap.bucket(1).ids.size() == 2);
  CHECK(gap.bucket(2).ids.empty());
  CHECK(gap.bucket(3).ids.empty());
  CHECK(gap.bucket(4).ids.empty());
  CHECK(gap.bucket(5).ids.size() == 1);
}

TEST_CASE("partition: random multisets are true partitions")
{
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int tau = std::vector<int>{1, 5, 10, 20}[rng.below(4)];
    std::vector<int> dens(1 + rng.below(60));
    for (auto & d : dens) {
      d = static_cast<int>(rng.integer(1, 90));
    }
    const auto plan = plan_of(make_input(dens), tau);
    const int lo = *std::min_element(dens.begin(), dens.end());
    const int hi = *std::max_element(dens.begin(), dens.end());
    CHECK(plan.num_buckets() == static_cast<std::size_t>((hi - lo + 1 + tau - 1) / tau));
    std::vector<int> seen(dens.size(), 0);
    for (const auto & b : plan.buckets) {
      for (std::size_t m : b.members) {
        ++seen[m];
        CHECK(dens[m] >= b.lo);
        CHECK(dens[m] < b.hi);
        CHECK((dens[m] - lo) / tau + 1 == b.k);
      }
      CHECK(std::is_sorted(b.members.begin(), b.members.end()));
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  }
}

TEST_CASE("partition: invalid input")
{
  const auto in = make_input({1, 2});
  CHECK(code_of([&] { plan_of(in, 0); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { plan_of(make_input({}), 5); }) == ErrorCode::kInvalidArgument);
  std::vector<int> short_dens{1};
  CHECK(
    code_of([&] { partition(std::span<const std::string>(in.ids), std::span<const int>(short_dens), 5); }) ==
    ErrorCode::kDimensionMismatch);
}

TEST_CASE("budget: total uses floor with a tolerance for representation error")
{
  CHECK(total_budget(0.5, 7) == 3);
  CHECK(total_budget(0.29, 100) == 29);
  CHECK(total_budget(0.7, 10) == 7);
  CHECK(total_budget(1.0, 13) == 13);
  CHECK(total_budget(0.999, 10) == 9);
  CHECK(total_budget(0.01, 50) == 0);
  CHECK(code_of([] { total_budget(0.0, 5); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { total_budget(1.5, 5); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { check_alpha(std::nan("")); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("budget: sizes 100/50/10 with B = 100")
{
  const auto plan = plan_with_sizes({100, 50, 10});
  const auto bp = dynamic_budget(plan, 100.0 / 160.0);
  CHECK(bp.total == 100);
  REQUIRE(bp.per_bucket.size() == 3);
  CHECK(bp.per_bucket[0].k == 3);
  CHECK(bp.per_bucket[0].n == 10);
  CHECK(bp.per_bucket[1].n == 45);
  CHECK(bp.per_bucket[2].n == 45);
  CHECK(bp.allocated() == 100);
}

TEST_CASE("budget: three large buckets with B = 10")
{
  const auto plan = plan_with_sizes({40, 40, 20});
  const auto bp = dynamic_budget(plan, 0.1);
  CHECK(bp.total == 10);
  CHECK(bp.budget_for(3) == 3);
  CHECK(bp.budget_for(2) == 3);
  CHECK(bp.budget_for(1) == 4);
  CHECK(bp.allocated() == 10);
}

TEST_CASE("budget: alpha = 1 keeps everything")
{
  const auto plan = plan_of(make_input({2, 2, 3, 17, 40, 41, 41, 90}), 10);
  const auto bp = dynamic_budget(plan, 1.0);
  for (const auto & b : plan.buckets) {
    CHECK(bp.budget_for(b.k) == b.ids.size());
  }
}

TEST_CASE("budget: empty buckets keep their index in the divisor")
{
  // K = 3 with bucket 2 empty: k = 3 gets floor(6/3) = 2, k = 1 takes the remaining 4.
  const auto plan = plan_of(make_input({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 21, 22, 23}), 10);
  REQUIRE(plan.num_buckets() == 3);
  const auto bp = dynamic_budget(plan, 6.0 / 13.0);
  CHECK(bp.total == 6);
  CHECK(bp.budget_for(3) == 2);
  CHECK(bp.budget_for(2) == 0);
  CHECK(bp.budget_for(1) == 4);
  CHECK(code_of([&] { bp.budget_for(7); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("budget: invariants over random plans")
{
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<int> dens(1 + rng.below(200));
    for (auto & d : dens) {
      d = rng.bernoulli(0.8) ? static_cast<int>(rng.integer(1, 10)) : static_cast<int>(rng.integer(30, 80));
    }
    const auto plan = plan_of(make_input(dens), std::vector<int>{5, 10, 20}[rng.below(3)]);
    const double alpha = rng.uniform(0.01, 1.0);
    const auto bp = dynamic_budget(plan, alpha);
    CHECK(bp.total == total_budget(alpha, dens.size()));
    CHECK(bp.allocated() <= bp.total);
    const bool keep_all = bp.total == dens.size();
    std::size_t remaining = bp.total;
    int expect_k = static_cast<int>(plan.num_buckets());
    for (const auto & b : bp.per_bucket) {
      CHECK(b.k == expect_k--);
      CHECK(b.n <= plan.bucket(b.k).ids.size());
      if (!keep_all) {
        CHECK(b.n <= remaining / static_cast<std::size_t>(b.k));
      }
      remaining -= b.n;
    }
    if (plan.bucket(1).ids.size() >= bp.total) {
      CHECK(bp.allocated() == bp.total);
    }
  }
}

TEST_CASE("assemble: exact budgets pass, violations are typed")
{
  const auto plan = plan_of(make_input({1, 1, 12, 13}), 10);
  const auto bp = dynamic_budget(plan, 0.5);
  REQUIRE(bp.budget_for(2) == 1);
  REQUIRE(bp.budget_for(1) == 1);
  Provenance meta;
  meta.seed = 3;
  const auto ok = assemble(plan, bp, {{"s1"}, {"s3"}}, meta);
  CHECK(ok.size() == 2);
  CHECK(ok.ids() == std::vector<std::string>{"s3", "s1"});
  CHECK(ok.buckets[0].k == 2);
  CHECK(ok.meta.seed == 3);

  CHECK(code_of([&] { assemble(plan, bp, {{"s0", "s1"}, {"s3"}}, meta); }) == ErrorCode::kBudgetViolation);
  CHECK(code_of([&] { assemble(plan, bp, {{}, {"s3"}}, meta); }) == ErrorCode::kBudgetViolation);
  CHECK(code_of([&] { assemble(plan, bp, {{"s2"}, {"s3"}}, meta); }) == ErrorCode::kMembershipViolation);
  CHECK(code_of([&] { assemble(plan, bp, {{"s1"}}, meta); }) == ErrorCode::kInvalidArgument);

  const auto full = dynamic_budget(plan, 1.0);
  CHECK(code_of([&] { assemble(plan, full, {{"s0", "s0"}, {"s2", "s3"}}, meta); }) == ErrorCode::kMembershipViolation);
  const auto all = assemble(plan, full, {{"s0", "s1"}, {"s2", "s3"}}, meta);
  const auto all_ids = all.ids();
  CHECK(std::set<std::string>(all_ids.begin(), all_ids.end()).size() == 4);
}

TEST_CASE("selection file: round trip and exact header")
{
  TempDir dir;
  SelectionResult r;
  r.meta = {"sstp", "per-bucket", 0.7, 10, 18446744073709551615ULL, "abc", "def"};
  r.buckets = {{2, {"x", "y"}}, {1, {"z"}}};
  write_selection(r, dir.file("sel.txt"));
  std::ifstream in(dir.file("sel.txt"));
  std::string first;
  std::getline(in, first);
  CHECK(
    first ==
    "#META method=sstp scope=per-bucket alpha=0.7 tau=10 seed=18446744073709551615 features=abc "
    "params=def buckets=2:2,1:1");
  const auto back = read_selection(dir.file("sel.txt"));
  CHECK(back.meta.seed == r.meta.seed);
  CHECK(back.meta.alpha == 0.7);
  CHECK(back.meta.features_hash == "abc");
  REQUIRE(back.buckets.size() == 2);
  CHECK(back.buckets[0].k == 2);
  CHECK(back.buckets[0].ids == r.buckets[0].ids);
  CHECK(back.ids() == r.ids());

  SelectionResult g;
  g.meta.scope = "global";
  g.buckets = {{0, {"a"}}};
  write_selection(g, dir.file("g.txt"));
  CHECK(read_selection(dir.file("g.txt")).buckets[0].k == 0);

  SelectionResult empty;
  write_selection(empty, dir.file("e.txt"));
  CHECK(read_selection(dir.file("e.txt")).size() == 0);
}

TEST_CASE("selection file: malformed input")
{
  TempDir dir;
  auto code_for = [&](const std::string & text) {
    {
      std::ofstream o(dir.file("s.txt"));
      o << text;
    }
    return code_of([&] { read_selection(dir.file("s.txt")); });
  };
  const std::string head = "#META method=sstp scope=global alpha=0.5 tau=10 seed=1 features=- params=- ";
  CHECK(code_for("a\nb\n") == ErrorCode::kParse);
  CHECK(code_for(head + "buckets=global:2 junk\na\nb\n") == ErrorCode::kParse);
  CHECK(code_for("#META method=sstp buckets=-\n") == ErrorCode::kParse);
  CHECK(code_for(head + "buckets=global:2\na\na\n") == ErrorCode::kDuplicateId);
  CHECK(code_for(head + "buckets=global:3\na\nb\n") == ErrorCode::kFormat);
  CHECK(code_for(head + "buckets=global:1\na\nb\n") == ErrorCode::kFormat);
  CHECK(code_for(head + "buckets=global\na\n") == ErrorCode::kParse);
  CHECK(code_for(
          "#META method=sstp scope=global alpha=zz tau=10 seed=1 features=- params=- buckets=-\n") ==
        ErrorCode::kParse);
  CHECK(code_of([&] { read_selection(dir.file("none.txt")); }) == ErrorCode::kIo);
}
