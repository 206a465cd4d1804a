// Copyright 2026 The Forge Authors
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

#include "forge/sampler.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "forge/errors.h"
#include "forge/random.h"

namespace forge {
namespace {

using Ids = std::vector<std::string>;

std::vector<ScoredId> Scored(const std::vector<double>& conf, const std::string& prefix) {
  std::vector<ScoredId> out;
  for (std::size_t i = 0; i < conf.size(); ++i) {
    out.push_back({prefix + std::to_string(i), conf[i]});
  }
  return out;
}

Ids FiftyIds() {
  Ids ids;
  for (int i = 0; i < 50; ++i) ids.push_back(std::to_string(5000 + i * 7));
  return ids;
}

std::set<std::string> AsSet(const Ids& v) { return {v.begin(), v.end()}; }

//===----------------------------------------------------------------------===//
// Generator portability
//===----------------------------------------------------------------------===//

TEST(Rng, EngineMatchesStandardSequence) {
  // The standard pins the 10000th output of a default-seeded mt19937_64.
  std::mt19937_64 e;
  e.discard(9999);
  EXPECT_EQ(e(), 9981545732273789042ULL);
}

TEST(Rng, BelowIsInRangeAndRoughlyUniform) {
  Rng rng(1);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

//===----------------------------------------------------------------------===//
// Ledger
//===----------------------------------------------------------------------===//

TEST(UsageLedger, ConsumeAndConflict) {
  UsageLedger l;
  l.consume({"1", "2"}, "r1");
  EXPECT_TRUE(l.contains("1"));
  EXPECT_EQ(l.round_of("2").value(), "r1");
  EXPECT_THROW(l.consume({"3", "2"}, "r2"), ConflictError);
  EXPECT_FALSE(l.contains("3"));  // nothing recorded on error
  EXPECT_THROW(l.consume({"4", "4"}, "r2"), ConflictError);
  EXPECT_EQ(l.size(), 2u);
}

//===----------------------------------------------------------------------===//
// Type 1
//===----------------------------------------------------------------------===//

TEST(Type1, TopPointOnlyAtEightiethPercentile) {
  const std::vector<ScoredId> pos = Scored({5, 4, 3, 2, 1}, "p");
  SampleSpec spec;
  spec.k = 1;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    spec.seed = seed;
    EXPECT_EQ(sample_type1(pos, spec, UsageLedger{}), Ids{"p0"});
  }
  EXPECT_EQ(quantile_threshold({5, 4, 3, 2, 1}, 0.8), 5.0);
}

TEST(Type1, ExhaustionAndLedger) {
  const std::vector<ScoredId> pos = Scored({5, 4, 3, 2, 1, 6, 7, 8, 9, 10}, "p");
  SampleSpec spec;
  spec.k = 100;
  spec.percentile = 0.5;
  // Ascending rank floor(0.5 * 10) = 5 holds 6, so 6..10 qualify.
  EXPECT_EQ(AsSet(sample_type1(pos, spec, UsageLedger{})),
            (std::set<std::string>{"p5", "p6", "p7", "p8", "p9"}));
  UsageLedger l;
  l.consume({"p5", "p6", "p7", "p8", "p9"}, "r1");
  EXPECT_TRUE(sample_type1(pos, spec, l).empty());
  EXPECT_TRUE(sample_type1({}, spec, UsageLedger{}).empty());
}

TEST(Type1, ResultsClearTheThreshold) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> conf;
    for (std::size_t i = 1 + rng.below(80); i > 0; --i) conf.push_back(rng.uniform() * 3);
    const std::vector<ScoredId> pos = Scored(conf, "t");
    SampleSpec spec;
    spec.k = 1 + rng.below(10);
    spec.seed = trial + 1;
    const double thr = quantile_threshold(conf, spec.percentile);
    const Ids got = sample_type1(pos, spec, UsageLedger{});
    for (const auto& id : got) {
      const std::size_t i = std::stoul(id.substr(1));
      ASSERT_GE(conf[i], thr);
    }
    ASSERT_EQ(got, sample_type1(pos, spec, UsageLedger{}));
  }
}

TEST(SampleSpecValidation, RejectsOpenIntervalEdges) {
  SampleSpec spec;
  spec.k = 1;
  spec.percentile = 1.0;
  EXPECT_THROW(sample_type1(Scored({1}, "p"), spec, UsageLedger{}), InvalidArgument);
  spec.percentile = 0.8;
  spec.band_fraction = 0.0;
  EXPECT_THROW(sample_type2(Scored({1}, "p"), {}, spec, UsageLedger{}), InvalidArgument);
}

//===----------------------------------------------------------------------===//
// Type 2
//===----------------------------------------------------------------------===//

TEST(Type2, BandEnumeration) {
  const std::vector<ScoredId> pos = {{"p1", 0.1}, {"p2", 0.2}, {"p9", 0.9}};
  const std::vector<ScoredId> neg = {{"n05", -0.05}, {"n8", -0.8}};
  SampleSpec spec;
  spec.k = 2;
  spec.band_fraction = 0.5;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    spec.seed = seed;
    const Ids got = sample_type2(pos, neg, spec, UsageLedger{});
    ASSERT_EQ(got.size(), 2u);
    EXPECT_TRUE(got[0] == "p1" || got[0] == "p2") << got[0];
    EXPECT_EQ(got[1], "n05");
  }
}

TEST(Type2, DegenerateSides) {
  const std::vector<ScoredId> pos = Scored({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}, "p");
  SampleSpec spec;
  spec.band_fraction = 0.5;
  spec.k = 0;
  EXPECT_TRUE(sample_type2(pos, {}, spec, UsageLedger{}).empty());
  spec.k = 3;
  const Ids got = sample_type2(pos, {}, spec, UsageLedger{});
  ASSERT_EQ(got.size(), 3u);
  for (const auto& id : got) EXPECT_LT(std::stoul(id.substr(1)), 5u);
}

TEST(Type2, OddKFavoursPositives) {
  const std::vector<ScoredId> pos = Scored({0.1, 0.2, 0.3, 0.4}, "p");
  const std::vector<ScoredId> neg = Scored({-0.1, -0.2, -0.3, -0.4}, "n");
  SampleSpec spec;
  spec.band_fraction = 0.9;
  spec.k = 5;
  const Ids got = sample_type2(pos, neg, spec, UsageLedger{});
  EXPECT_EQ(std::count_if(got.begin(), got.end(), [](const auto& s) { return s[0] == 'p'; }), 3);
}

//===----------------------------------------------------------------------===//
// Random negatives and rule pools
//===----------------------------------------------------------------------===//

TEST(RandomNegatives, SetDifference) {
  const Ids got = sample_random_negatives({"a", "b", "c"}, {"b"}, 2, 1, UsageLedger{});
  EXPECT_EQ(AsSet(got), (std::set<std::string>{"a", "c"}));
  EXPECT_TRUE(sample_random_negatives({"a"}, {}, 0, 1, UsageLedger{}).empty());
}

TEST(RandomNegatives, SeededReplay) {
  Ids all = FiftyIds();
  const std::set<std::string> likely = {all[3], all[10], all[11]};
  const Ids got = sample_random_negatives(all, likely, 8, 1234, UsageLedger{});
  // Replay: sorted pool minus job-likely, then the first 8 of a seeded
  // partial Fisher-Yates.
  Ids pool;
  for (const auto& id : all) {
    if (!likely.count(id)) pool.push_back(id);
  }
  std::sort(pool.begin(), pool.end());
  Rng rng(1234);
  for (std::size_t i = 0; i < 8; ++i) {
    std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  }
  pool.resize(8);
  EXPECT_EQ(got, pool);
  // Input order does not matter.
  std::reverse(all.begin(), all.end());
  EXPECT_EQ(sample_random_negatives(all, likely, 8, 1234, UsageLedger{}), got);
}

TEST(RulePool, ExclusionExhaustionAndEmpty) {
  UsageLedger l;
  l.consume({"y"}, "r1");
  EXPECT_EQ(sample_rule_pool({"x", "y"}, 5, 1, l), Ids{"x"});
  EXPECT_TRUE(sample_rule_pool({}, 5, 1, UsageLedger{}).empty());
}

TEST(RulePool, FiftyIdGolden) {
  std::ifstream in(std::string(FORGE_FIXTURE_DIR) + "/rule_pool_golden.txt");
  Ids golden;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) golden.push_back(line);
  }
  ASSERT_EQ(golden.size(), 10u);
  UsageLedger l;
  l.consume({FiftyIds()[0], FiftyIds()[49]}, "r1");
  EXPECT_EQ(sample_rule_pool(FiftyIds(), 10, 2026, l), golden);
}

TEST(Samplers, NeverReturnLedgeredIds) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    Ids all = FiftyIds();
    UsageLedger l;
    Ids used;
    for (const auto& id : all) {
      if (rng.bernoulli(0.3)) used.push_back(id);
    }
    l.consume(used, "prior");
    const Ids got = sample_rule_pool(all, 1 + rng.below(60), trial, l);
    for (const auto& id : got) ASSERT_FALSE(l.contains(id));
    ASSERT_EQ(AsSet(got).size(), got.size());
    l.consume(got, "next");
    for (const auto& id : got) ASSERT_EQ(l.round_of(id).value(), "next");
  }
}

TEST(Strategy, Names) {
  for (Strategy s : {Strategy::kType1, Strategy::kType2, Strategy::kRandomNegative,
                     Strategy::kRulePool}) {
    EXPECT_EQ(strategy_from_string(strategy_name(s)), s);
  }
  EXPECT_THROW(strategy_from_string("nope"), InvalidArgument);
}

}  // namespace
}  // namespace forge
