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

// Desk-scale stand-ins for the data collection and the crowd: a synthetic
// tweet generator with known labels, and seeded annotators whose answers go
// through the same HIT, screening and aggregation path as imported ones.

#ifndef FORGE_SIMULATION_H_
#define FORGE_SIMULATION_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "forge/labels.h"
#include "forge/normalize.h"
#include "forge/rounds.h"

namespace forge {

class Store;

struct SyntheticConfig {
  std::size_t corpus_size = 10000;
  double job_fraction = 0.15;
  double confounder_rate = 0.1;   // notjob tweets carrying a job-looking phrase
  double recruit_fraction = 0.15; // job tweets that are "hashtags + URL" ads
  double short_rate = 0.08;       // tweets under five tokens
  std::uint64_t seed = 1;
};

struct GroundTruth {
  std::map<std::string, Label> topic;     // by tweet_id
  std::map<std::string, Source> account;  // by account_id
  std::map<std::string, bool> confounder; // notjob tweets built around a trap phrase
};

struct SyntheticCorpus {
  std::vector<Tweet> tweets;
  GroundTruth truth;
};

// Exactly round(corpus_size * job_fraction) job tweets; byte-identical for a
// fixed config.
SyntheticCorpus generate_synthetic_corpus(const SyntheticConfig& cfg);

void write_truth(const GroundTruth& truth, const std::string& path);
GroundTruth read_truth(const std::string& path);

struct SimulatedAnnotator {
  std::string worker_id;
  double accuracy = 0.9;
  std::uint64_t seed = 1;
  // A careless worker flips a fresh coin per item, so the two copies of a
  // duplicate can disagree. A careful one answers per tweet.
  bool careless = false;

  Answer answer(const std::string& tweet_id, const std::string& item_id, Label truth) const;
};

struct AnnotatorPool {
  std::vector<SimulatedAnnotator> workers;

  // `count` workers named "<prefix>NNN"; a `careless_rate` share of them
  // (chosen with the seed) answer carelessly.
  static AnnotatorPool make(std::size_t count, double accuracy, double careless_rate,
                            std::uint64_t seed, const std::string& prefix = "w");
};

struct SimulationSummary {
  std::size_t responses = 0;
  std::size_t worker_hits = 0;    // (worker, HIT) pairs answered
  std::size_t rejected_pairs = 0; // screened out
  std::size_t unfilled_hits = 0;  // pool ran out before n_required valid workers
};

// Every HIT of the round is answered by workers drawn from the pool in a
// seeded order until `n_required` of them pass screening. Responses are
// submitted to the store.
SimulationSummary simulate_round(Store& store, const std::string& round_id,
                                 const std::map<std::string, Label>& truth,
                                 const AnnotatorPool& pool, int n_required = 5,
                                 std::uint64_t seed = 1);

// Majority of the workers' seeded answers to "personal or business?" for one
// tweet. An odd number of workers is required.
Source simulated_source_vote(const std::vector<SimulatedAnnotator>& workers,
                             const std::string& tweet_id, Source truth);

struct SimulatedExpert {
  std::string expert_id;
  double accuracy = 0.95;
  std::uint64_t seed = 1;
  Label label(const std::string& tweet_id, Label truth) const;
};

}  // namespace forge

#endif  // FORGE_SIMULATION_H_
