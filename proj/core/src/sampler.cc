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

#include "forge/errors.h"
#include "forge/random.h"

namespace forge {
namespace {

std::vector<ScoredId> weakest_band(const std::vector<ScoredId>& side, double fraction) {
  std::vector<ScoredId> sorted = side;
  std::sort(sorted.begin(), sorted.end(), [](const ScoredId& a, const ScoredId& b) {
    const double fa = std::fabs(a.confidence);
    const double fb = std::fabs(b.confidence);
    if (fa != fb) return fa < fb;
    return a.tweet_id < b.tweet_id;
  });
  const auto n = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(sorted.size())));
  sorted.resize(std::min(n, sorted.size()));
  return sorted;
}

std::vector<std::string> ids_of(const std::vector<ScoredId>& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(s.tweet_id);
  return out;
}

}  // namespace

std::optional<std::string> UsageLedger::round_of(const std::string& id) const {
  auto it = used_.find(id);
  if (it == used_.end()) return std::nullopt;
  return it->second;
}

void UsageLedger::consume(const std::vector<std::string>& ids, const std::string& round_id) {
  std::set<std::string> batch;
  for (const auto& id : ids) {
    if (auto prior = round_of(id)) {
      throw ConflictError("tweet " + id + " was already consumed by round " + *prior);
    }
    if (!batch.insert(id).second) {
      throw ConflictError("tweet " + id + " appears twice in round " + round_id);
    }
  }
  for (const auto& id : ids) used_.emplace(id, round_id);
}

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kType1: return "type1";
    case Strategy::kType2: return "type2";
    case Strategy::kRandomNegative: return "random-negative";
    case Strategy::kRulePool: return "rule-pool";
  }
  return "unknown";
}

Strategy strategy_from_string(std::string_view s) {
  for (Strategy st : {Strategy::kType1, Strategy::kType2, Strategy::kRandomNegative,
                      Strategy::kRulePool}) {
    if (strategy_name(st) == s) return st;
  }
  throw InvalidArgument("unknown sampling strategy '" + std::string(s) + "'");
}

void validate(const SampleSpec& spec) {
  if (!(spec.percentile > 0 && spec.percentile < 1)) {
    throw InvalidArgument("percentile must lie in (0,1)");
  }
  if (!(spec.band_fraction > 0 && spec.band_fraction < 1)) {
    throw InvalidArgument("band_fraction must lie in (0,1)");
  }
}

double quantile_threshold(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidArgument("quantile of an empty list");
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::floor(p * static_cast<double>(values.size())));
  return values[std::min(rank, values.size() - 1)];
}

std::vector<std::string> sample_ids(std::vector<std::string> pool, std::size_t k,
                                    std::uint64_t seed, const UsageLedger& ledger) {
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  std::erase_if(pool, [&](const std::string& id) { return ledger.contains(id); });
  Rng rng(seed);
  return rng.sample(std::move(pool), k);
}

std::vector<std::string> sample_type1(const std::vector<ScoredId>& ranked_pos,
                                      const SampleSpec& spec, const UsageLedger& ledger) {
  validate(spec);
  if (ranked_pos.empty() || spec.k == 0) return {};
  std::vector<double> conf;
  conf.reserve(ranked_pos.size());
  for (const auto& s : ranked_pos) conf.push_back(s.confidence);
  const double threshold = quantile_threshold(conf, spec.percentile);
  std::vector<std::string> pool;
  for (const auto& s : ranked_pos) {
    if (s.confidence >= threshold) pool.push_back(s.tweet_id);
  }
  return sample_ids(std::move(pool), spec.k, spec.seed, ledger);
}

std::vector<std::string> sample_type2(const std::vector<ScoredId>& ranked_pos,
                                      const std::vector<ScoredId>& ranked_neg,
                                      const SampleSpec& spec, const UsageLedger& ledger) {
  validate(spec);
  if (spec.k == 0) return {};
  const auto pos_pool = ids_of(weakest_band(ranked_pos, spec.band_fraction));
  const auto neg_pool = ids_of(weakest_band(ranked_neg, spec.band_fraction));
  // Draw each side fully permuted, then take the split.
  auto pos = sample_ids(pos_pool, pos_pool.size(), derive_seed(spec.seed, "type2-pos"), ledger);
  auto neg = sample_ids(neg_pool, neg_pool.size(), derive_seed(spec.seed, "type2-neg"), ledger);
  std::size_t want_pos = (spec.k + 1) / 2;
  std::size_t want_neg = spec.k / 2;
  if (pos.size() < want_pos) {
    want_neg += want_pos - pos.size();
    want_pos = pos.size();
  }
  if (neg.size() < want_neg) {
    want_pos = std::min(pos.size(), want_pos + (want_neg - neg.size()));
    want_neg = neg.size();
  }
  std::vector<std::string> out(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(want_pos));
  out.insert(out.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(want_neg));
  return out;
}

std::vector<std::string> sample_random_negatives(const std::vector<std::string>& all_ids,
                                                 const std::set<std::string>& job_likely,
                                                 std::size_t k, std::uint64_t seed,
                                                 const UsageLedger& ledger) {
  std::vector<std::string> pool;
  pool.reserve(all_ids.size());
  for (const auto& id : all_ids) {
    if (!job_likely.count(id)) pool.push_back(id);
  }
  return sample_ids(std::move(pool), k, seed, ledger);
}

std::vector<std::string> sample_rule_pool(const std::vector<std::string>& matched_ids,
                                          std::size_t k, std::uint64_t seed,
                                          const UsageLedger& ledger) {
  return sample_ids(matched_ids, k, seed, ledger);
}

}  // namespace forge
