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

#include "forge/rounds.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <numeric>

#include "forge/errors.h"
#include "forge/random.h"

namespace forge {
namespace {

std::string numbered(const std::string& prefix, const char* tag, std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "-%s%0*zu", tag, width, n);
  return prefix + buf;
}

void write_row(std::ostream& out, std::initializer_list<std::string_view> fields) {
  bool first = true;
  for (auto f : fields) {
    if (!first) out << ',';
    out << csv_escape(f);
    first = false;
  }
  out << '\n';
}

struct ItemRef {
  const Hit* hit;
  const HitItem* item;
};

// item_id -> (hit, item), validating that responses point at real items.
std::map<std::string, ItemRef> index_items(const std::vector<Hit>& hits) {
  std::map<std::string, ItemRef> index;
  for (const auto& h : hits) {
    for (const auto& it : h.items) index[it.item_id] = {&h, &it};
  }
  return index;
}

// (worker, item) -> answer with later responses winning.
std::map<std::pair<std::string, std::string>, Answer> latest_answers(
    const std::vector<WorkerResponse>& responses, const std::map<std::string, ItemRef>& index) {
  std::map<std::pair<std::string, std::string>, Answer> out;
  for (const auto& r : responses) {
    auto it = index.find(r.item_id);
    if (it == index.end()) throw InvalidArgument("response names unknown item " + r.item_id);
    if (it->second.hit->hit_id != r.hit_id) {
      throw InvalidArgument("item " + r.item_id + " does not belong to HIT " + r.hit_id);
    }
    out[{r.worker_id, r.item_id}] = r.answer;
  }
  return out;
}

// Per valid (worker, hit): tweet -> answer.
std::map<WorkerHit, std::map<std::string, Answer>> valid_votes(
    const std::vector<WorkerResponse>& responses, const std::vector<Hit>& hits,
    const ScreeningResult& screening) {
  const auto index = index_items(hits);
  const auto answers = latest_answers(responses, index);
  std::map<WorkerHit, std::map<std::string, Answer>> out;
  for (const auto& [key, answer] : answers) {
    const auto& ref = index.at(key.second);
    WorkerHit wh{key.first, ref.hit->hit_id};
    if (!screening.valid.count(wh)) continue;
    out[wh][ref.item->tweet_id] = answer;
  }
  return out;
}

}  // namespace

const HitItem* Hit::find_item(const std::string& item_id) const {
  for (const auto& it : items) {
    if (it.item_id == item_id) return &it;
  }
  return nullptr;
}

std::vector<Hit> build_hits(const std::string& round_id, const std::vector<Tweet>& tweets,
                            std::size_t subset_size, std::size_t n_dups, std::uint64_t seed) {
  if (subset_size < 1) throw InvalidArgument("subset_size must be at least 1");
  if (n_dups > subset_size) throw InvalidArgument("n_dups cannot exceed subset_size");
  std::vector<Hit> hits;
  for (std::size_t start = 0; start < tweets.size(); start += subset_size) {
    const std::size_t end = std::min(tweets.size(), start + subset_size);
    Hit h;
    h.round_id = round_id;
    h.hit_id = numbered(round_id, "h", hits.size() + 1, 3);
    h.n_base = end - start;
    h.n_dups = std::min(n_dups, h.n_base);
    Rng rng(derive_seed(seed, h.hit_id));
    std::vector<std::size_t> order(h.n_base);
    std::iota(order.begin(), order.end(), start);
    auto dups = rng.sample(order, h.n_dups);
    order.insert(order.end(), dups.begin(), dups.end());
    rng.shuffle(order);
    for (std::size_t i = 0; i < order.size(); ++i) {
      const Tweet& t = tweets[order[i]];
      h.items.push_back({numbered(h.hit_id, "i", i + 1, 2), t.tweet_id, anonymize(t.text)});
    }
    hits.push_back(std::move(h));
  }
  return hits;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  std::size_t line = 1;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (!field.empty()) throw ParseError(line, "stray quote in unquoted field");
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      // CRLF line endings
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
      ++line;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError(line, "unterminated quoted field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_hits_csv(const std::vector<Hit>& hits, std::ostream& out) {
  write_row(out, {"hit_id", "item_id", "anonymized_text"});
  for (const auto& h : hits) {
    for (const auto& it : h.items) write_row(out, {h.hit_id, it.item_id, it.text});
  }
}

void write_responses_csv(const std::vector<WorkerResponse>& responses, std::ostream& out) {
  write_row(out, {"worker_id", "hit_id", "item_id", "answer"});
  for (const auto& r : responses) {
    write_row(out, {r.worker_id, r.hit_id, r.item_id, answer_name(r.answer)});
  }
}

std::vector<WorkerResponse> read_responses_csv(std::istream& in) {
  const auto rows = read_csv(in);
  std::vector<WorkerResponse> out;
  if (rows.empty()) return out;
  const std::vector<std::string> header = {"worker_id", "hit_id", "item_id", "answer"};
  if (rows[0] != header) throw ParseError(1, "expected header worker_id,hit_id,item_id,answer");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() == 1 && r[0].empty()) continue;
    if (r.size() != 4) throw ParseError(i + 1, "expected 4 fields");
    auto a = parse_answer(r[3]);
    if (!a) throw ParseError(i + 1, "answer must be Y or N, got '" + r[3] + "'");
    out.push_back({r[0], r[1], r[2], *a});
  }
  return out;
}

std::set<std::string> ScreeningResult::valid_workers() const {
  std::set<std::string> out;
  for (const auto& [w, h] : valid) out.insert(w);
  return out;
}

std::set<std::string> ScreeningResult::rejected_workers() const {
  std::set<std::string> out;
  for (const auto& [w, h] : rejected) out.insert(w);
  return out;
}

ScreeningResult screen_workers(const std::vector<WorkerResponse>& responses,
                               const std::vector<Hit>& hits) {
  const auto index = index_items(hits);
  const auto answers = latest_answers(responses, index);
  std::map<WorkerHit, std::map<std::string, Answer>> by_pair;  // -> item -> answer
  for (const auto& [key, answer] : answers) {
    by_pair[{key.first, index.at(key.second).hit->hit_id}][key.second] = answer;
  }
  std::map<std::string, const Hit*> hit_by_id;
  for (const auto& h : hits) hit_by_id[h.hit_id] = &h;

  ScreeningResult result;
  for (const auto& [pair, items] : by_pair) {
    const Hit& hit = *hit_by_id.at(pair.second);
    std::string reason;
    if (items.size() != hit.items.size()) {
      reason = "incomplete";
    } else {
      std::map<std::string, Answer> seen;
      for (const auto& it : hit.items) {
        const Answer a = items.at(it.item_id);
        auto [pos, fresh] = seen.emplace(it.tweet_id, a);
        if (!fresh && pos->second != a) {
          reason = "inconsistent";
          break;
        }
      }
    }
    if (reason.empty()) {
      result.valid.insert(pair);
    } else {
      result.rejected.insert(pair);
      result.reasons[pair] = reason;
    }
  }
  return result;
}

std::string_view consensus_name(Consensus c) {
  switch (c) {
    case Consensus::kUnanimousJob: return "unanimous_job";
    case Consensus::kUnanimousNotJob: return "unanimous_notjob";
    case Consensus::kMajorityJob: return "majority_job";
    case Consensus::kMajorityNotJob: return "majority_notjob";
  }
  return "unknown";
}

AggregateResult aggregate(const std::vector<WorkerResponse>& responses,
                          const std::vector<Hit>& hits, const ScreeningResult& screening,
                          int n_required) {
  if (n_required < 1 || n_required % 2 == 0) {
    throw InvalidArgument("n_required must be a positive odd number");
  }
  // tweet -> worker -> answer; a worker seeing a tweet in two HITs still
  // casts one vote.
  std::map<std::string, std::map<std::string, Answer>> votes;
  for (const auto& h : hits) {
    for (const auto& it : h.items) votes[it.tweet_id];
  }
  for (const auto& [wh, tweets] : valid_votes(responses, hits, screening)) {
    for (const auto& [tweet, a] : tweets) votes[tweet][wh.first] = a;
  }
  AggregateResult result;
  for (const auto& [tweet, by_worker] : votes) {
    if (static_cast<int>(by_worker.size()) != n_required) {
      result.short_staffed.push_back(tweet);
      continue;
    }
    AggregatedLabel l;
    l.tweet_id = tweet;
    for (const auto& [w, a] : by_worker) (a == Answer::kY ? l.y : l.n)++;
    if (l.y == n_required) {
      l.consensus = Consensus::kUnanimousJob;
    } else if (l.n == n_required) {
      l.consensus = Consensus::kUnanimousNotJob;
    } else {
      l.consensus = l.y > l.n ? Consensus::kMajorityJob : Consensus::kMajorityNotJob;
      l.needs_adjudication = true;
    }
    result.labels.push_back(std::move(l));
  }
  return result;
}

std::vector<RatingMatrix> hit_rating_matrices(const std::vector<WorkerResponse>& responses,
                                              const std::vector<Hit>& hits,
                                              const ScreeningResult& screening) {
  std::map<std::string, std::vector<const std::map<std::string, Answer>*>> by_hit;
  const auto votes = valid_votes(responses, hits, screening);
  for (const auto& [wh, tweets] : votes) by_hit[wh.second].push_back(&tweets);
  std::vector<RatingMatrix> out;
  for (const auto& h : hits) {
    const auto& workers = by_hit[h.hit_id];
    if (workers.size() < 2) continue;
    std::map<std::string, std::pair<int, int>> counts;  // tweet -> (y, n)
    for (const auto* tweets : workers) {
      for (const auto& [tweet, a] : *tweets) {
        auto& c = counts[tweet];
        (a == Answer::kY ? c.first : c.second)++;
      }
    }
    std::vector<std::pair<int, int>> rows;
    for (const auto& [tweet, c] : counts) rows.push_back(c);
    out.push_back(RatingMatrix::from_yes_no(rows));
  }
  return out;
}

std::vector<std::string> adjudication_queue(const std::vector<AggregatedLabel>& aggregated) {
  std::vector<const AggregatedLabel*> pending;
  for (const auto& l : aggregated) {
    if (l.needs_adjudication) pending.push_back(&l);
  }
  std::sort(pending.begin(), pending.end(), [](const AggregatedLabel* a, const AggregatedLabel* b) {
    const int da = std::abs(a->y - a->n);
    const int db = std::abs(b->y - b->n);
    if (da != db) return da < db;
    return a->tweet_id < b->tweet_id;
  });
  std::vector<std::string> out;
  out.reserve(pending.size());
  for (const auto* l : pending) out.push_back(l->tweet_id);
  return out;
}

AdjudicationBook::AdjudicationBook(std::vector<std::string> experts,
                                   const std::vector<AggregatedLabel>& aggregated)
    : experts_(std::move(experts)), queue_(adjudication_queue(aggregated)) {
  if (experts_.empty()) throw InvalidArgument("adjudication needs at least one expert");
  for (const auto& l : aggregated) {
    if (l.needs_adjudication) crowd_[l.tweet_id] = l;
  }
}

Adjudication AdjudicationBook::record(const std::string& tweet_id, const std::string& expert_id,
                                      Label label) {
  if (std::find(experts_.begin(), experts_.end(), expert_id) == experts_.end()) {
    throw InvalidArgument("unknown expert " + expert_id);
  }
  if (!crowd_.count(tweet_id)) {
    throw InvalidArgument("tweet " + tweet_id + " is not in the adjudication queue");
  }
  labels_[tweet_id][expert_id] = label;
  log_.push_back({tweet_id, expert_id, label});
  return log_.back();
}

AdjudicationStatus AdjudicationBook::status(const std::string& tweet_id) const {
  auto it = labels_.find(tweet_id);
  // Decided only once every configured expert has answered.
  if (it == labels_.end() || it->second.size() < experts_.size()) {
    return AdjudicationStatus::kPending;
  }
  const Label first = it->second.begin()->second;
  for (const auto& [e, l] : it->second) {
    if (l != first) return AdjudicationStatus::kUnresolved;
  }
  return AdjudicationStatus::kResolved;
}

std::map<std::string, Label> AdjudicationBook::resolved() const {
  std::map<std::string, Label> out;
  for (const auto& [tweet, by_expert] : labels_) {
    if (status(tweet) == AdjudicationStatus::kResolved) out[tweet] = by_expert.begin()->second;
  }
  return out;
}

std::vector<std::string> AdjudicationBook::unresolved() const {
  std::vector<std::string> out;
  for (const auto& [tweet, by_expert] : labels_) {
    if (status(tweet) == AdjudicationStatus::kUnresolved) out.push_back(tweet);
  }
  return out;
}

std::vector<std::string> AdjudicationBook::pending_for(const std::string& expert_id) const {
  std::vector<std::string> out;
  for (const auto& tweet : queue_) {
    auto it = labels_.find(tweet);
    if (it == labels_.end() || !it->second.count(expert_id)) out.push_back(tweet);
  }
  return out;
}

const AggregatedLabel* AdjudicationBook::crowd(const std::string& tweet_id) const {
  auto it = crowd_.find(tweet_id);
  return it == crowd_.end() ? nullptr : &it->second;
}

std::vector<std::pair<std::string, Label>> gold_training_set(
    const std::vector<std::vector<AggregatedLabel>>& rounds,
    const std::map<std::string, Label>& adjudicated) {
  std::map<std::string, Label> gold;
  for (const auto& round : rounds) {
    for (const auto& l : round) {
      if (l.unanimous()) gold[l.tweet_id] = l.majority_label();
    }
  }
  for (const auto& [tweet, label] : adjudicated) gold[tweet] = label;
  return {gold.begin(), gold.end()};
}

}  // namespace forge
