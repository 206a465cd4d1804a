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

// Selection of tweets for annotation rounds. Every sampler excludes ids
// already recorded in the usage ledger, sorts its candidate pool by tweet id
// and draws a seeded partial Fisher-Yates sample, so results do not depend on
// input order.

#ifndef FORGE_SAMPLER_H_
#define FORGE_SAMPLER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forge/model.h"

namespace forge {

class UsageLedger {
 public:
  bool contains(const std::string& id) const { return used_.count(id) > 0; }
  // Round that consumed `id`, if any.
  std::optional<std::string> round_of(const std::string& id) const;

  // Records ids under round_id. Throws ConflictError naming the first id
  // already present (and its round); on error nothing is recorded. Repeated
  // ids inside `ids` are also a conflict.
  void consume(const std::vector<std::string>& ids, const std::string& round_id);

  std::size_t size() const { return used_.size(); }
  const std::map<std::string, std::string>& entries() const { return used_; }

 private:
  std::map<std::string, std::string> used_;
};

enum class Strategy { kType1, kType2, kRandomNegative, kRulePool };

std::string_view strategy_name(Strategy s);
Strategy strategy_from_string(std::string_view s);

struct SampleSpec {
  Strategy strategy = Strategy::kType1;
  std::size_t k = 0;
  double percentile = 0.8;     // type1
  double band_fraction = 0.1;  // type2
  std::uint64_t seed = 1;
};

// Throws InvalidArgument when percentile or band_fraction is outside (0,1).
void validate(const SampleSpec& spec);

// Confidence at 0-based ascending rank floor(p * n), clamped to the last
// element. Items at or above it form the type-1 pool. Throws on empty input.
double quantile_threshold(std::vector<double> values, double p);

// Positives with confidence >= the spec.percentile quantile, minus the
// ledger; min(k, |pool|) ids.
std::vector<std::string> sample_type1(const std::vector<ScoredId>& ranked_pos,
                                      const SampleSpec& spec, const UsageLedger& ledger);

// The ceil(band_fraction * n) smallest-|confidence| ids per side, minus the
// ledger. ceil(k/2) from the positive band and floor(k/2) from the negative
// band; a side that runs short is topped up from the other.
std::vector<std::string> sample_type2(const std::vector<ScoredId>& ranked_pos,
                                      const std::vector<ScoredId>& ranked_neg,
                                      const SampleSpec& spec, const UsageLedger& ledger);

std::vector<std::string> sample_random_negatives(const std::vector<std::string>& all_ids,
                                                 const std::set<std::string>& job_likely,
                                                 std::size_t k, std::uint64_t seed,
                                                 const UsageLedger& ledger);

std::vector<std::string> sample_rule_pool(const std::vector<std::string>& matched_ids,
                                          std::size_t k, std::uint64_t seed,
                                          const UsageLedger& ledger);

// The shared draw: sorted, deduplicated, ledger-free pool, then a seeded
// sample of min(k, |pool|).
std::vector<std::string> sample_ids(std::vector<std::string> pool, std::size_t k,
                                    std::uint64_t seed, const UsageLedger& ledger);

}  // namespace forge

#endif  // FORGE_SAMPLER_H_
