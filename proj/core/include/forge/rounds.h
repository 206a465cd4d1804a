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

// Annotation rounds: HITs with injected duplicates, worker screening on the
// duplicates, vote aggregation and expert adjudication of disagreements.

#ifndef FORGE_ROUNDS_H_
#define FORGE_ROUNDS_H_

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "forge/agreement.h"
#include "forge/labels.h"
#include "forge/normalize.h"

namespace forge {

inline constexpr std::string_view kTaskQuestion = "Is this tweet about job or employment?";

struct HitItem {
  std::string item_id;
  std::string tweet_id;
  std::string text;  // anonymized
  bool operator==(const HitItem&) const = default;
};

struct Hit {
  std::string hit_id;
  std::string round_id;
  std::vector<HitItem> items;
  std::size_t n_base = 0;
  std::size_t n_dups = 0;

  const HitItem* find_item(const std::string& item_id) const;
  bool operator==(const Hit&) const = default;
};

// Splits `tweets` in order into subsets of subset_size (the remainder forms a
// short last HIT). In each subset min(n_dups, subset) tweets chosen with the
// seed appear twice, and the items are shuffled. Hit ids are
// "<round>-hNNN", item ids "<hit>-iNN". Throws InvalidArgument if
// subset_size < 1 or n_dups > subset_size.
std::vector<Hit> build_hits(const std::string& round_id, const std::vector<Tweet>& tweets,
                            std::size_t subset_size, std::size_t n_dups, std::uint64_t seed);

struct WorkerResponse {
  std::string worker_id;
  std::string hit_id;
  std::string item_id;
  Answer answer = Answer::kN;
  bool operator==(const WorkerResponse&) const = default;
};

// CSV with a header row. HITs: hit_id,item_id,anonymized_text. Responses:
// worker_id,hit_id,item_id,answer.
void write_hits_csv(const std::vector<Hit>& hits, std::ostream& out);
void write_responses_csv(const std::vector<WorkerResponse>& responses, std::ostream& out);
// Throws ParseError with the offending line.
std::vector<WorkerResponse> read_responses_csv(std::istream& in);
std::vector<std::vector<std::string>> read_csv(std::istream& in);
std::string csv_escape(std::string_view field);

using WorkerHit = std::pair<std::string, std::string>;  // (worker_id, hit_id)

struct ScreeningResult {
  std::set<WorkerHit> valid;
  std::set<WorkerHit> rejected;
  // Reason per rejected pair: "inconsistent" or "incomplete".
  std::map<WorkerHit, std::string> reasons;

  bool is_valid(const std::string& worker, const std::string& hit) const {
    return valid.count({worker, hit}) > 0;
  }
  std::set<std::string> valid_workers() const;
  std::set<std::string> rejected_workers() const;
};

// A (worker, hit) pair is rejected if the worker left any item unanswered or
// answered the two copies of a duplicate differently. A later response for
// the same (worker, item) replaces an earlier one. Throws InvalidArgument for
// responses naming unknown HITs or items.
ScreeningResult screen_workers(const std::vector<WorkerResponse>& responses,
                               const std::vector<Hit>& hits);

enum class Consensus { kUnanimousJob, kUnanimousNotJob, kMajorityJob, kMajorityNotJob };

std::string_view consensus_name(Consensus c);

struct AggregatedLabel {
  std::string tweet_id;
  int y = 0;
  int n = 0;
  Consensus consensus = Consensus::kUnanimousNotJob;
  bool needs_adjudication = false;

  Label majority_label() const { return y > n ? Label::kJob : Label::kNotJob; }
  bool unanimous() const { return !needs_adjudication; }
  bool operator==(const AggregatedLabel&) const = default;
};

struct AggregateResult {
  std::vector<AggregatedLabel> labels;     // by tweet_id
  std::vector<std::string> short_staffed;  // valid votes != n_required
};

// One vote per valid (worker, tweet); duplicate copies collapse. n_required
// must be odd.
AggregateResult aggregate(const std::vector<WorkerResponse>& responses,
                          const std::vector<Hit>& hits, const ScreeningResult& screening,
                          int n_required = 5);

// Y/N count table over the distinct tweets of each HIT, from its valid
// workers. HITs with fewer than two valid workers are skipped.
std::vector<RatingMatrix> hit_rating_matrices(const std::vector<WorkerResponse>& responses,
                                              const std::vector<Hit>& hits,
                                              const ScreeningResult& screening);

// Non-unanimous tweets, closest splits first, then by tweet_id.
std::vector<std::string> adjudication_queue(const std::vector<AggregatedLabel>& aggregated);

struct Adjudication {
  std::string tweet_id;
  std::string expert_id;
  Label final_label = Label::kNotJob;
  bool operator==(const Adjudication&) const = default;
};

enum class AdjudicationStatus { kPending, kResolved, kUnresolved };

class AdjudicationBook {
 public:
  AdjudicationBook(std::vector<std::string> experts, const std::vector<AggregatedLabel>& aggregated);

  // Throws InvalidArgument for an unknown expert or a tweet that is not in
  // the queue. A second label from the same expert replaces the first.
  Adjudication record(const std::string& tweet_id, const std::string& expert_id, Label label);

  AdjudicationStatus status(const std::string& tweet_id) const;
  // Resolved tweets: every configured expert answered and they agree.
  std::map<std::string, Label> resolved() const;
  std::vector<std::string> unresolved() const;
  // Queue entries the expert has not labeled yet, in queue order.
  std::vector<std::string> pending_for(const std::string& expert_id) const;

  const std::vector<std::string>& queue() const { return queue_; }
  const std::vector<std::string>& experts() const { return experts_; }
  const std::vector<Adjudication>& log() const { return log_; }
  const AggregatedLabel* crowd(const std::string& tweet_id) const;

 private:
  std::vector<std::string> experts_;
  std::vector<std::string> queue_;
  std::map<std::string, AggregatedLabel> crowd_;
  std::map<std::string, std::map<std::string, Label>> labels_;  // tweet -> expert -> label
  std::vector<Adjudication> log_;
};

// Unanimous crowd labels from every round plus resolved adjudications,
// adjudications taking precedence; one row per tweet, sorted by tweet_id.
std::vector<std::pair<std::string, Label>> gold_training_set(
    const std::vector<std::vector<AggregatedLabel>>& rounds,
    const std::map<std::string, Label>& adjudicated);

}  // namespace forge

#endif  // FORGE_ROUNDS_H_
