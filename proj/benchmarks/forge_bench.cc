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

#include <vector>

#include <benchmark/benchmark.h>

#include "forge/agreement.h"
#include "forge/lexicon.h"
#include "forge/metrics.h"
#include "forge/model.h"
#include "forge/normalize.h"
#include "forge/random.h"
#include "forge/simulation.h"

namespace forge {
namespace {

std::vector<Tweet> Corpus(std::size_t n) {
  SyntheticConfig cfg;
  cfg.corpus_size = n;
  cfg.seed = 42;
  return generate_synthetic_corpus(cfg).tweets;
}

void BM_Normalize(benchmark::State& state) {
  const auto tweets = Corpus(1000);
  const SlangDictionary& dict = SlangDictionary::builtin();
  for (auto _ : state) {
    for (const auto& t : tweets) benchmark::DoNotOptimize(normalize(t, dict));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tweets.size()));
}
BENCHMARK(BM_Normalize);

void BM_JobLikelyFilter(benchmark::State& state) {
  const auto tweets = Corpus(1000);
  for (auto _ : state) benchmark::DoNotOptimize(job_likely_filter(tweets, c0_ruleset(), 5));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tweets.size()));
}
BENCHMARK(BM_JobLikelyFilter);

void BM_Fit(benchmark::State& state) {
  SyntheticConfig cfg;
  cfg.corpus_size = static_cast<std::size_t>(state.range(0));
  cfg.seed = 42;
  const auto corpus = generate_synthetic_corpus(cfg);
  std::vector<NormalizedDoc> docs;
  std::vector<Label> y;
  for (const auto& t : corpus.tweets) {
    docs.push_back(normalize(t, SlangDictionary::builtin()));
    y.push_back(corpus.truth.topic.at(t.tweet_id));
  }
  TrainConfig tc;
  tc.class_weight_pos = 3;
  for (auto _ : state) benchmark::DoNotOptimize(fit(docs, y, tc));
}
BENCHMARK(BM_Fit)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_FleissKappa(benchmark::State& state) {
  Rng rng(1);
  std::vector<std::vector<int>> rows;
  for (int i = 0; i < 45; ++i) {
    const int y = static_cast<int>(rng.below(6));
    rows.push_back({y, 5 - y});
  }
  const RatingMatrix m(rows);
  for (auto _ : state) benchmark::DoNotOptimize(fleiss_kappa(m));
}
BENCHMARK(BM_FleissKappa);

void BM_EffectiveRecall(benchmark::State& state) {
  const EffectiveRecallInputs in{233187, 6873142, 729, 871, 0.97};
  for (auto _ : state) benchmark::DoNotOptimize(effective_recall(in));
}
BENCHMARK(BM_EffectiveRecall);

}  // namespace
}  // namespace forge

BENCHMARK_MAIN();
