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

#include "forge/simulation.h"

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "forge/errors.h"
#include "forge/lexicon.h"
#include "forge/store.h"

namespace forge {
namespace {

namespace fs = std::filesystem;

class SimulationTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("forge-sim-" + std::to_string(::getpid()) + "-" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Publishes `n` synthetic tweets as one round of 40-tweet HITs.
  std::map<std::string, Label> Publish(Store& store, std::size_t n, std::uint64_t seed) {
    SyntheticConfig cfg;
    cfg.corpus_size = n;
    cfg.seed = seed;
    const SyntheticCorpus c = generate_synthetic_corpus(cfg);
    store.add_tweets(c.tweets);
    RoundInfo info;
    info.round_id = "r";
    store.put_round(info);
    store.add_hits(build_hits("r", c.tweets, 40, 5, seed));
    return c.truth.topic;
  }

  AggregateResult Aggregate(Store& store) {
    const auto hits = store.hits("r");
    const auto rs = store.responses("r");
    return aggregate(rs, hits, screen_workers(rs, hits), 5);
  }

  fs::path dir_;
};

//===----------------------------------------------------------------------===//
// Corpus generator
//===----------------------------------------------------------------------===//

TEST(SyntheticCorpus, ExactJobCount) {
  for (double frac : {0.15, 0.3, 0.01}) {
    SyntheticConfig cfg;
    cfg.corpus_size = 3001;
    cfg.job_fraction = frac;
    const SyntheticCorpus c = generate_synthetic_corpus(cfg);
    ASSERT_EQ(c.tweets.size(), 3001u);
    std::size_t jobs = 0;
    for (const auto& [id, l] : c.truth.topic) jobs += l == Label::kJob;
    EXPECT_EQ(jobs, static_cast<std::size_t>(std::llround(3001 * frac)));
  }
}

TEST(SyntheticCorpus, ByteIdenticalForFixedSeed) {
  SyntheticConfig cfg;
  cfg.corpus_size = 2000;
  cfg.seed = 17;
  const SyntheticCorpus a = generate_synthetic_corpus(cfg);
  const SyntheticCorpus b = generate_synthetic_corpus(cfg);
  ASSERT_EQ(a.tweets.size(), b.tweets.size());
  for (std::size_t i = 0; i < a.tweets.size(); ++i) {
    ASSERT_EQ(tweet_json(a.tweets[i]), tweet_json(b.tweets[i]));
  }
  cfg.seed = 18;
  EXPECT_NE(tweet_json(generate_synthetic_corpus(cfg).tweets[0]), tweet_json(a.tweets[0]));
}

TEST(SyntheticCorpus, ConfoundersReachTheSeedFilter) {
  SyntheticConfig cfg;
  cfg.corpus_size = 10000;
  cfg.confounder_rate = 0.1;
  cfg.seed = 3;
  const SyntheticCorpus c = generate_synthetic_corpus(cfg);
  const std::set<std::string> matched = job_likely_filter(c.tweets, c0_ruleset(), 5);
  ASSERT_FALSE(matched.empty());
  std::size_t negatives = 0;
  for (const auto& id : matched) negatives += c.truth.topic.at(id) == Label::kNotJob;
  EXPECT_GE(static_cast<double>(negatives) / static_cast<double>(matched.size()), 0.05);
}

TEST_F(SimulationTest, TruthRoundTrip) {
  SyntheticConfig cfg;
  cfg.corpus_size = 300;
  const SyntheticCorpus c = generate_synthetic_corpus(cfg);
  fs::create_directories(dir_);
  const std::string path = (dir_ / "truth.jsonl").string();
  write_truth(c.truth, path);
  const GroundTruth back = read_truth(path);
  EXPECT_EQ(back.topic, c.truth.topic);
  EXPECT_EQ(back.account, c.truth.account);
  EXPECT_EQ(back.confounder, c.truth.confounder);
}

//===----------------------------------------------------------------------===//
// Simulated crowd
//===----------------------------------------------------------------------===//

TEST_F(SimulationTest, PerfectWorkersAreUnanimous) {
  Store store(dir_);
  const auto truth = Publish(store, 400, 5);
  const AnnotatorPool pool = AnnotatorPool::make(10, 1.0, 0.0, 5);
  const SimulationSummary s = simulate_round(store, "r", truth, pool, 5, 9);
  EXPECT_EQ(s.rejected_pairs, 0u);
  EXPECT_EQ(s.unfilled_hits, 0u);
  const AggregateResult r = Aggregate(store);
  ASSERT_EQ(r.labels.size(), 400u);
  for (const auto& l : r.labels) {
    ASSERT_TRUE(l.unanimous());
    ASSERT_EQ(l.majority_label(), truth.at(l.tweet_id));
  }
}

TEST_F(SimulationTest, CoinFlipWorkersRarelyAgree) {
  Store store(dir_);
  const auto truth = Publish(store, 2400, 6);
  const AnnotatorPool pool = AnnotatorPool::make(10, 0.5, 0.0, 6);
  simulate_round(store, "r", truth, pool, 5, 10);
  const AggregateResult r = Aggregate(store);
  ASSERT_GE(r.labels.size(), 2000u);
  std::size_t unanimous = 0;
  for (const auto& l : r.labels) unanimous += l.unanimous();
  // P(all five agree) = 2 * 0.5^5.
  EXPECT_NEAR(static_cast<double>(unanimous) / static_cast<double>(r.labels.size()), 0.0625,
              0.02);
}

TEST(SimulatedAnnotator, CarelessWorkerScreenedOut) {
  SyntheticConfig cfg;
  cfg.corpus_size = 40 * 400;
  cfg.seed = 8;
  const SyntheticCorpus c = generate_synthetic_corpus(cfg);
  const std::vector<Hit> hits = build_hits("r", c.tweets, 40, 5, 8);
  SimulatedAnnotator careless{"w-careless", 0.9, 77, true};
  std::size_t rejected = 0;
  for (const auto& h : hits) {
    std::vector<WorkerResponse> rs;
    for (const auto& it : h.items) {
      rs.push_back({careless.worker_id, h.hit_id, it.item_id,
                    careless.answer(it.tweet_id, it.item_id, c.truth.topic.at(it.tweet_id))});
    }
    rejected += !screen_workers(rs, {h}).is_valid(careless.worker_id, h.hit_id);
  }
  EXPECT_NEAR(static_cast<double>(rejected) / static_cast<double>(hits.size()), 1.0 - 1.0 / 32.0,
              0.05);
}

TEST(SimulatedAnnotator, CarefulWorkerConsistentAndAccurate) {
  SimulatedAnnotator w{"w1", 0.9, 3, false};
  std::size_t right = 0;
  for (int i = 0; i < 5000; ++i) {
    const std::string t = std::to_string(i);
    const Answer a = w.answer(t, "a" + t, Label::kJob);
    ASSERT_EQ(a, w.answer(t, "b" + t, Label::kJob));
    right += a == Answer::kY;
  }
  EXPECT_NEAR(right / 5000.0, 0.9, 0.02);
}

TEST(AnnotatorPool, CarelessShareAndNames) {
  const AnnotatorPool p = AnnotatorPool::make(1000, 0.9, 0.1, 4);
  std::size_t careless = 0;
  for (const auto& w : p.workers) careless += w.careless;
  EXPECT_NEAR(careless / 1000.0, 0.1, 0.03);
  EXPECT_EQ(p.workers.front().worker_id, "w001");
  EXPECT_THROW(AnnotatorPool::make(3, 1.5, 0, 1), InvalidArgument);
}

TEST(SimulatedSourceVote, MajorityAndOddPanel) {
  const AnnotatorPool perfect = AnnotatorPool::make(5, 1.0, 0.0, 1);
  EXPECT_EQ(simulated_source_vote(perfect.workers, "1", Source::kBusiness), Source::kBusiness);
  const std::vector<SimulatedAnnotator> even(perfect.workers.begin(), perfect.workers.begin() + 4);
  EXPECT_THROW(simulated_source_vote(even, "1", Source::kBusiness), InvalidArgument);
}

TEST(SimulatedExpert, Accuracy) {
  SimulatedExpert e{"e1", 0.95, 2};
  std::size_t right = 0;
  for (int i = 0; i < 4000; ++i) right += e.label(std::to_string(i), Label::kNotJob) == Label::kNotJob;
  EXPECT_NEAR(right / 4000.0, 0.95, 0.015);
}

TEST_F(SimulationTest, MissingTruthAndRound) {
  Store store(dir_);
  Publish(store, 50, 1);
  const AnnotatorPool pool = AnnotatorPool::make(5, 1.0, 0.0, 1);
  EXPECT_THROW(simulate_round(store, "r", {}, pool, 5, 1), InvalidArgument);
  EXPECT_THROW(simulate_round(store, "nope", {}, pool, 5, 1), NotFound);
}

}  // namespace
}  // namespace forge
