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

// Append-only JSON-lines store. Each collection is one segment file in the
// store directory; opening a store replays every segment into memory.
// Mutations take an exclusive lock and append before updating the index, so
// readers always see a state that is also on disk.

#ifndef FORGE_STORE_H_
#define FORGE_STORE_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "forge/labels.h"
#include "forge/normalize.h"
#include "forge/rounds.h"
#include "forge/sampler.h"

namespace forge {

struct CorpusRecord {
  std::string tweet_id;
  std::optional<Label> topic_human;  // nullopt renders as "NA"
  Label topic_machine = Label::kNotJob;
  std::optional<Source> source_human;
  Source source_machine = Source::kPersonal;
  bool operator==(const CorpusRecord&) const = default;
};

// One release line with the fields in canonical order; `text`, when given,
// is appended as a sixth field.
std::string release_line(const CorpusRecord& r, const std::string* text = nullptr);
// Records are written in numeric tweet_id order. With ids_only false the
// text of each tweet is looked up in `texts` (missing ids get no text).
void export_release(std::vector<CorpusRecord> records, std::ostream& out, bool ids_only,
                    const std::map<std::string, std::string>* texts = nullptr);
// Throws ParseError naming the line for malformed input.
std::vector<CorpusRecord> parse_release(std::istream& in);

struct LabelCounts {
  std::size_t positive = 0;  // job / business
  std::size_t negative = 0;  // notjob / personal
  std::size_t na = 0;
  bool operator==(const LabelCounts&) const = default;
};

struct CorpusStats {
  LabelCounts topic_human;
  LabelCounts topic_machine;
  LabelCounts source_human;
  LabelCounts source_machine;
  std::size_t records = 0;
  bool operator==(const CorpusStats&) const = default;
};

CorpusStats corpus_stats(const std::vector<CorpusRecord>& records);
std::string format_stats(const CorpusStats& s);

// Parses one ingestion line: {"tweet_id","text","account_id"} plus optional
// "created_at", "lat", "lon". Throws InvalidArgument with a reason.
Tweet parse_tweet_json(std::string_view line);
std::string tweet_json(const Tweet& t);

bool is_tweet_id(std::string_view s);
// Numeric order for decimal ids: shorter first, then lexicographic.
bool id_less(const std::string& a, const std::string& b);

struct IngestError {
  std::size_t line = 0;
  std::string message;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::size_t duplicates = 0;
  std::vector<IngestError> errors;
};

enum class RoundKind { kAnnotation, kAdjudication };

struct AdjudicationItem {
  std::string item_id;
  std::string tweet_id;
  int y = 0;
  int n = 0;
  bool operator==(const AdjudicationItem&) const = default;
};

struct RoundInfo {
  std::string round_id;
  RoundKind kind = RoundKind::kAnnotation;
  bool open = true;
  int workers_per_hit = 5;
  std::vector<std::string> experts;       // adjudication rounds
  std::vector<AdjudicationItem> queue;    // adjudication rounds
  bool operator==(const RoundInfo&) const = default;
};

struct ResponseAuditEntry {
  std::uint64_t seq = 0;
  Answer answer = Answer::kN;
};

struct AuditReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

class Store {
 public:
  // Creates the directory if needed and replays existing segments. Throws
  // ParseError (with file name in the message) for corrupt segments.
  explicit Store(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }

  // Tweets.
  IngestReport ingest(std::istream& in);
  IngestReport ingest_file(const std::string& path);
  // Appends tweets whose ids are new; returns how many were added.
  std::size_t add_tweets(const std::vector<Tweet>& tweets);
  std::optional<Tweet> tweet(const std::string& id) const;
  std::vector<Tweet> tweets() const;  // ingestion order
  std::vector<std::string> tweet_ids() const;
  std::size_t tweet_count() const;

  // Usage ledger; ConflictError names the id and its earlier round.
  void consume(const std::vector<std::string>& ids, const std::string& round_id);
  UsageLedger ledger() const;

  // Rounds and HITs.
  void put_round(const RoundInfo& info);
  std::optional<RoundInfo> round(const std::string& round_id) const;
  std::vector<RoundInfo> rounds() const;
  // Throws ConflictError for an existing hit id.
  void add_hits(const std::vector<Hit>& hits);
  std::vector<Hit> hits(const std::string& round_id) const;
  std::optional<Hit> hit(const std::string& hit_id) const;
  // HIT containing the item, if any.
  std::optional<Hit> hit_for_item(const std::string& item_id) const;

  // Worker assignments: at most one HIT per (round, worker).
  std::optional<std::string> assignment(const std::string& round_id,
                                        const std::string& worker_id) const;
  // Returns the existing assignment, or assigns the first HIT of the round
  // with fewer than workers_per_hit workers. nullopt when every HIT is full.
  std::optional<std::string> assign(const std::string& round_id, const std::string& worker_id);
  std::vector<std::string> workers_of(const std::string& hit_id) const;

  // Responses: last write per (worker, item) wins; all writes are kept for
  // the audit trail. Returns the audit length for the pair.
  std::size_t submit_response(const WorkerResponse& r);
  void submit_responses(const std::vector<WorkerResponse>& rs);
  std::vector<WorkerResponse> responses(const std::string& round_id) const;
  std::vector<ResponseAuditEntry> response_audit(const std::string& worker_id,
                                                 const std::string& item_id) const;
  std::optional<Answer> answer(const std::string& worker_id, const std::string& item_id) const;

  void record_adjudication(const std::string& round_id, const Adjudication& a);
  std::vector<Adjudication> adjudications(const std::string& round_id) const;

  // Last record per tweet_id wins.
  void put_records(const std::vector<CorpusRecord>& records);
  std::vector<CorpusRecord> records() const;

  // Referential integrity over every collection.
  AuditReport audit() const;

 private:
  void append(const std::string& segment, const std::vector<std::string>& lines);
  void replay();
  void apply_tweet(Tweet t);
  void apply_response(const WorkerResponse& r, std::uint64_t seq);

  std::filesystem::path dir_;
  mutable std::shared_mutex mu_;

  std::vector<Tweet> tweets_;
  std::map<std::string, std::size_t> tweet_index_;
  UsageLedger ledger_;
  std::map<std::string, RoundInfo> rounds_;
  std::map<std::string, Hit> hits_;
  std::map<std::string, std::vector<std::string>> round_hits_;  // round -> hit ids in order
  std::map<std::string, std::string> item_hit_;                 // item -> hit
  std::map<std::pair<std::string, std::string>, std::string> assignments_;  // (round, worker)
  std::map<std::string, std::vector<std::string>> hit_workers_;
  std::map<std::pair<std::string, std::string>, std::vector<ResponseAuditEntry>> responses_;
  std::uint64_t next_seq_ = 1;
  std::map<std::string, std::vector<Adjudication>> adjudications_;
  std::map<std::string, CorpusRecord> records_;
};

}  // namespace forge

#endif  // FORGE_STORE_H_
