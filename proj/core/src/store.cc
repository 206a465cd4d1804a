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

#include "forge/store.h"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "forge/errors.h"

namespace forge {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kTweets = "tweets.jsonl";
constexpr const char* kLedger = "ledger.jsonl";
constexpr const char* kRounds = "rounds.jsonl";
constexpr const char* kHits = "hits.jsonl";
constexpr const char* kAssignments = "assignments.jsonl";
constexpr const char* kResponses = "responses.jsonl";
constexpr const char* kAdjudications = "adjudications.jsonl";
constexpr const char* kRecords = "records.jsonl";

const std::string& str_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw InvalidArgument(std::string("missing field '") + key + "'");
  if (!it->is_string()) throw InvalidArgument(std::string("field '") + key + "' must be a string");
  return it->get_ref<const std::string&>();
}

template <typename T, typename Parse>
T enum_field(const json& j, const char* key, Parse parse) {
  const auto& s = str_field(j, key);
  auto v = parse(s);
  if (!v) throw InvalidArgument(std::string("bad value '") + s + "' for '" + key + "'");
  return *v;
}

std::string_view round_kind_name(RoundKind k) {
  return k == RoundKind::kAnnotation ? "annotation" : "adjudication";
}

json hit_to_json(const Hit& h) {
  json items = json::array();
  for (const auto& it : h.items) {
    items.push_back({{"item_id", it.item_id}, {"tweet_id", it.tweet_id}, {"text", it.text}});
  }
  return {{"hit_id", h.hit_id}, {"round_id", h.round_id}, {"n_base", h.n_base},
          {"n_dups", h.n_dups}, {"items", std::move(items)}};
}

Hit hit_from_json(const json& j) {
  Hit h;
  h.hit_id = str_field(j, "hit_id");
  h.round_id = str_field(j, "round_id");
  h.n_base = j.at("n_base").get<std::size_t>();
  h.n_dups = j.at("n_dups").get<std::size_t>();
  for (const auto& it : j.at("items")) {
    h.items.push_back({str_field(it, "item_id"), str_field(it, "tweet_id"), str_field(it, "text")});
  }
  return h;
}

json round_to_json(const RoundInfo& r) {
  json queue = json::array();
  for (const auto& q : r.queue) {
    queue.push_back({{"item_id", q.item_id}, {"tweet_id", q.tweet_id}, {"y", q.y}, {"n", q.n}});
  }
  return {{"round_id", r.round_id}, {"kind", round_kind_name(r.kind)}, {"open", r.open},
          {"workers_per_hit", r.workers_per_hit}, {"experts", r.experts},
          {"queue", std::move(queue)}};
}

RoundInfo round_from_json(const json& j) {
  RoundInfo r;
  r.round_id = str_field(j, "round_id");
  const auto& kind = str_field(j, "kind");
  if (kind == "annotation") {
    r.kind = RoundKind::kAnnotation;
  } else if (kind == "adjudication") {
    r.kind = RoundKind::kAdjudication;
  } else {
    throw InvalidArgument("bad round kind '" + kind + "'");
  }
  r.open = j.at("open").get<bool>();
  r.workers_per_hit = j.at("workers_per_hit").get<int>();
  r.experts = j.at("experts").get<std::vector<std::string>>();
  for (const auto& q : j.at("queue")) {
    r.queue.push_back({str_field(q, "item_id"), str_field(q, "tweet_id"), q.at("y").get<int>(),
                       q.at("n").get<int>()});
  }
  return r;
}

CorpusRecord record_from_json(const json& j) {
  CorpusRecord r;
  r.tweet_id = str_field(j, "tweet_id");
  if (!is_tweet_id(r.tweet_id)) throw InvalidArgument("tweet_id must be decimal digits");
  const auto& th = str_field(j, "topic_human");
  if (th != "NA") r.topic_human = enum_field<Label>(j, "topic_human", parse_label);
  r.topic_machine = enum_field<Label>(j, "topic_machine", parse_label);
  const auto& sh = str_field(j, "source_human");
  if (sh != "NA") r.source_human = enum_field<Source>(j, "source_human", parse_source);
  r.source_machine = enum_field<Source>(j, "source_machine", parse_source);
  return r;
}

void count(LabelCounts& c, std::optional<bool> positive) {
  if (!positive) {
    ++c.na;
  } else if (*positive) {
    ++c.positive;
  } else {
    ++c.negative;
  }
}

}  // namespace

bool is_tweet_id(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool id_less(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::string release_line(const CorpusRecord& r, const std::string* text) {
  ordered_json j;
  j["topic_human"] = r.topic_human ? std::string(label_name(*r.topic_human)) : "NA";
  j["tweet_id"] = r.tweet_id;
  j["topic_machine"] = label_name(r.topic_machine);
  j["source_machine"] = source_name(r.source_machine);
  j["source_human"] = r.source_human ? std::string(source_name(*r.source_human)) : "NA";
  if (text) j["text"] = *text;
  return j.dump();
}

void export_release(std::vector<CorpusRecord> records, std::ostream& out, bool ids_only,
                    const std::map<std::string, std::string>* texts) {
  std::sort(records.begin(), records.end(),
            [](const CorpusRecord& a, const CorpusRecord& b) { return id_less(a.tweet_id, b.tweet_id); });
  for (const auto& r : records) {
    const std::string* text = nullptr;
    if (!ids_only && texts) {
      auto it = texts->find(r.tweet_id);
      if (it != texts->end()) text = &it->second;
    }
    out << release_line(r, text) << '\n';
  }
}

std::vector<CorpusRecord> parse_release(std::istream& in) {
  std::vector<CorpusRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(n, e.what());
    } catch (const InvalidArgument& e) {
      throw ParseError(n, e.what());
    }
  }
  return out;
}

CorpusStats corpus_stats(const std::vector<CorpusRecord>& records) {
  CorpusStats s;
  s.records = records.size();
  for (const auto& r : records) {
    count(s.topic_human, r.topic_human ? std::optional(*r.topic_human == Label::kJob) : std::nullopt);
    count(s.topic_machine, r.topic_machine == Label::kJob);
    count(s.source_human,
          r.source_human ? std::optional(*r.source_human == Source::kBusiness) : std::nullopt);
    count(s.source_machine, r.source_machine == Source::kBusiness);
  }
  return s;
}

std::string format_stats(const CorpusStats& s) {
  std::ostringstream out;
  out << "axis\tlabeler\tjob/business\tnotjob/personal\tNA\n";
  auto row = [&](const char* axis, const char* who, const LabelCounts& c, bool human) {
    out << axis << '\t' << who << '\t' << c.positive << '\t' << c.negative << '\t';
    if (human) {
      out << c.na;
    } else {
      out << "--";
    }
    out << '\n';
  };
  row("topic", "human", s.topic_human, true);
  row("topic", "machine", s.topic_machine, false);
  row("source", "human", s.source_human, true);
  row("source", "machine", s.source_machine, false);
  return out.str();
}

Tweet parse_tweet_json(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("line is not a JSON object");
  Tweet t;
  t.tweet_id = str_field(j, "tweet_id");
  if (!is_tweet_id(t.tweet_id)) throw InvalidArgument("tweet_id must be decimal digits");
  t.text = str_field(j, "text");
  if (t.text.empty()) throw InvalidArgument("text is empty");
  t.account_id = str_field(j, "account_id");
  if (t.account_id.empty()) throw InvalidArgument("account_id is empty");
  if (auto it = j.find("created_at"); it != j.end() && !it->is_null()) {
    t.created_at = str_field(j, "created_at");
  }
  const bool has_lat = j.contains("lat") && !j["lat"].is_null();
  const bool has_lon = j.contains("lon") && !j["lon"].is_null();
  if (has_lat != has_lon) throw InvalidArgument("lat and lon must be given together");
  if (has_lat) {
    if (!j["lat"].is_number() || !j["lon"].is_number()) {
      throw InvalidArgument("lat/lon must be numbers");
    }
    GeoPoint g{j["lat"].get<double>(), j["lon"].get<double>()};
    if (g.lat < -90 || g.lat > 90 || g.lon < -180 || g.lon > 180) {
      throw InvalidArgument("lat/lon out of range");
    }
    t.geo = g;
  }
  return t;
}

std::string tweet_json(const Tweet& t) {
  ordered_json j;
  j["tweet_id"] = t.tweet_id;
  j["text"] = t.text;
  j["account_id"] = t.account_id;
  if (t.created_at) j["created_at"] = *t.created_at;
  if (t.geo) {
    j["lat"] = t.geo->lat;
    j["lon"] = t.geo->lon;
  }
  return j.dump();
}

Store::Store(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  replay();
}

void Store::append(const std::string& segment, const std::vector<std::string>& lines) {
  if (lines.empty()) return;
  std::ofstream out(dir_ / segment, std::ios::app | std::ios::binary);
  if (!out) throw Error("cannot open segment " + (dir_ / segment).string());
  for (const auto& l : lines) out << l << '\n';
  out.flush();
  if (!out) throw Error("write failed on segment " + (dir_ / segment).string());
}

void Store::apply_tweet(Tweet t) {
  tweet_index_.emplace(t.tweet_id, tweets_.size());
  tweets_.push_back(std::move(t));
}

void Store::apply_response(const WorkerResponse& r, std::uint64_t seq) {
  responses_[{r.worker_id, r.item_id}].push_back({seq, r.answer});
  next_seq_ = std::max(next_seq_, seq + 1);
}

void Store::replay() {
  auto each_line = [&](const char* segment, auto&& fn) {
    std::ifstream in(dir_ / segment, std::ios::binary);
    if (!in) return;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (line.empty()) continue;
      try {
        fn(line);
      } catch (const std::exception& e) {
        throw ParseError(n, std::string(segment) + ": " + e.what());
      }
    }
  };
  each_line(kTweets, [&](const std::string& l) {
    Tweet t = parse_tweet_json(l);
    if (!tweet_index_.count(t.tweet_id)) apply_tweet(std::move(t));
  });
  each_line(kLedger, [&](const std::string& l) {
    const auto j = json::parse(l);
    ledger_.consume({str_field(j, "tweet_id")}, str_field(j, "round"));
  });
  each_line(kRounds, [&](const std::string& l) {
    RoundInfo r = round_from_json(json::parse(l));
    rounds_[r.round_id] = std::move(r);
  });
  each_line(kHits, [&](const std::string& l) {
    Hit h = hit_from_json(json::parse(l));
    round_hits_[h.round_id].push_back(h.hit_id);
    for (const auto& it : h.items) item_hit_[it.item_id] = h.hit_id;
    hits_[h.hit_id] = std::move(h);
  });
  each_line(kAssignments, [&](const std::string& l) {
    const auto j = json::parse(l);
    const auto& hit = str_field(j, "hit_id");
    assignments_[{str_field(j, "round_id"), str_field(j, "worker_id")}] = hit;
    hit_workers_[hit].push_back(str_field(j, "worker_id"));
  });
  each_line(kResponses, [&](const std::string& l) {
    const auto j = json::parse(l);
    WorkerResponse r{str_field(j, "worker_id"), str_field(j, "hit_id"), str_field(j, "item_id"),
                     enum_field<Answer>(j, "answer", parse_answer)};
    apply_response(r, j.at("seq").get<std::uint64_t>());
  });
  each_line(kAdjudications, [&](const std::string& l) {
    const auto j = json::parse(l);
    adjudications_[str_field(j, "round_id")].push_back(
        {str_field(j, "tweet_id"), str_field(j, "expert_id"),
         enum_field<Label>(j, "label", parse_label)});
  });
  each_line(kRecords, [&](const std::string& l) {
    CorpusRecord r = record_from_json(json::parse(l));
    records_[r.tweet_id] = std::move(r);
  });
}

IngestReport Store::ingest(std::istream& in) {
  std::unique_lock lock(mu_);
  IngestReport report;
  std::vector<std::string> lines;
  std::vector<Tweet> fresh;
  std::set<std::string> batch;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Tweet t;
    try {
      t = parse_tweet_json(line);
    } catch (const InvalidArgument& e) {
      report.errors.push_back({n, e.what()});
      continue;
    }
    if (tweet_index_.count(t.tweet_id) || !batch.insert(t.tweet_id).second) {
      ++report.duplicates;
      continue;
    }
    lines.push_back(tweet_json(t));
    fresh.push_back(std::move(t));
  }
  append(kTweets, lines);
  for (auto& t : fresh) apply_tweet(std::move(t));
  report.accepted = fresh.size();
  return report;
}

IngestReport Store::ingest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("input file not found: " + path);
  return ingest(in);
}

std::size_t Store::add_tweets(const std::vector<Tweet>& tweets) {
  std::unique_lock lock(mu_);
  std::vector<std::string> lines;
  std::vector<Tweet> fresh;
  std::set<std::string> batch;
  for (const auto& t : tweets) {
    if (!is_tweet_id(t.tweet_id)) throw InvalidArgument("tweet_id must be decimal digits");
    if (t.text.empty()) throw InvalidArgument("tweet " + t.tweet_id + " has empty text");
    if (tweet_index_.count(t.tweet_id) || !batch.insert(t.tweet_id).second) continue;
    lines.push_back(tweet_json(t));
    fresh.push_back(t);
  }
  append(kTweets, lines);
  for (auto& t : fresh) apply_tweet(std::move(t));
  return fresh.size();
}

std::optional<Tweet> Store::tweet(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = tweet_index_.find(id);
  if (it == tweet_index_.end()) return std::nullopt;
  return tweets_[it->second];
}

std::vector<Tweet> Store::tweets() const {
  std::shared_lock lock(mu_);
  return tweets_;
}

std::vector<std::string> Store::tweet_ids() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  out.reserve(tweets_.size());
  for (const auto& t : tweets_) out.push_back(t.tweet_id);
  return out;
}

std::size_t Store::tweet_count() const {
  std::shared_lock lock(mu_);
  return tweets_.size();
}

void Store::consume(const std::vector<std::string>& ids, const std::string& round_id) {
  std::unique_lock lock(mu_);
  UsageLedger next = ledger_;
  next.consume(ids, round_id);  // throws before anything is written
  std::vector<std::string> lines;
  lines.reserve(ids.size());
  for (const auto& id : ids) lines.push_back(json{{"tweet_id", id}, {"round", round_id}}.dump());
  append(kLedger, lines);
  ledger_ = std::move(next);
}

UsageLedger Store::ledger() const {
  std::shared_lock lock(mu_);
  return ledger_;
}

void Store::put_round(const RoundInfo& info) {
  std::unique_lock lock(mu_);
  if (info.round_id.empty()) throw InvalidArgument("round id is empty");
  append(kRounds, {round_to_json(info).dump()});
  rounds_[info.round_id] = info;
}

std::optional<RoundInfo> Store::round(const std::string& round_id) const {
  std::shared_lock lock(mu_);
  auto it = rounds_.find(round_id);
  if (it == rounds_.end()) return std::nullopt;
  return it->second;
}

std::vector<RoundInfo> Store::rounds() const {
  std::shared_lock lock(mu_);
  std::vector<RoundInfo> out;
  for (const auto& [id, r] : rounds_) out.push_back(r);
  return out;
}

void Store::add_hits(const std::vector<Hit>& hits) {
  std::unique_lock lock(mu_);
  std::set<std::string> batch;
  for (const auto& h : hits) {
    if (hits_.count(h.hit_id) || !batch.insert(h.hit_id).second) {
      throw ConflictError("HIT " + h.hit_id + " already exists");
    }
    for (const auto& it : h.items) {
      if (item_hit_.count(it.item_id)) throw ConflictError("item " + it.item_id + " already exists");
    }
  }
  std::vector<std::string> lines;
  for (const auto& h : hits) lines.push_back(hit_to_json(h).dump());
  append(kHits, lines);
  for (const auto& h : hits) {
    round_hits_[h.round_id].push_back(h.hit_id);
    for (const auto& it : h.items) item_hit_[it.item_id] = h.hit_id;
    hits_[h.hit_id] = h;
  }
}

std::vector<Hit> Store::hits(const std::string& round_id) const {
  std::shared_lock lock(mu_);
  std::vector<Hit> out;
  auto it = round_hits_.find(round_id);
  if (it == round_hits_.end()) return out;
  for (const auto& id : it->second) out.push_back(hits_.at(id));
  return out;
}

std::optional<Hit> Store::hit(const std::string& hit_id) const {
  std::shared_lock lock(mu_);
  auto it = hits_.find(hit_id);
  if (it == hits_.end()) return std::nullopt;
  return it->second;
}

std::optional<Hit> Store::hit_for_item(const std::string& item_id) const {
  std::shared_lock lock(mu_);
  auto it = item_hit_.find(item_id);
  if (it == item_hit_.end()) return std::nullopt;
  return hits_.at(it->second);
}

std::optional<std::string> Store::assignment(const std::string& round_id,
                                             const std::string& worker_id) const {
  std::shared_lock lock(mu_);
  auto it = assignments_.find({round_id, worker_id});
  if (it == assignments_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Store::assign(const std::string& round_id,
                                         const std::string& worker_id) {
  std::unique_lock lock(mu_);
  if (auto it = assignments_.find({round_id, worker_id}); it != assignments_.end()) {
    return it->second;
  }
  auto r = rounds_.find(round_id);
  const int cap = r == rounds_.end() ? 5 : r->second.workers_per_hit;
  auto hits = round_hits_.find(round_id);
  if (hits == round_hits_.end()) return std::nullopt;
  for (const auto& hit_id : hits->second) {
    auto& workers = hit_workers_[hit_id];
    if (static_cast<int>(workers.size()) >= cap) continue;
    append(kAssignments,
           {json{{"round_id", round_id}, {"worker_id", worker_id}, {"hit_id", hit_id}}.dump()});
    assignments_[{round_id, worker_id}] = hit_id;
    workers.push_back(worker_id);
    return hit_id;
  }
  return std::nullopt;
}

std::vector<std::string> Store::workers_of(const std::string& hit_id) const {
  std::shared_lock lock(mu_);
  auto it = hit_workers_.find(hit_id);
  if (it == hit_workers_.end()) return {};
  return it->second;
}

std::size_t Store::submit_response(const WorkerResponse& r) {
  submit_responses({r});
  std::shared_lock lock(mu_);
  return responses_.at({r.worker_id, r.item_id}).size();
}

void Store::submit_responses(const std::vector<WorkerResponse>& rs) {
  std::unique_lock lock(mu_);
  for (const auto& r : rs) {
    auto it = item_hit_.find(r.item_id);
    if (it == item_hit_.end()) throw InvalidArgument("unknown item " + r.item_id);
    if (it->second != r.hit_id) {
      throw InvalidArgument("item " + r.item_id + " does not belong to HIT " + r.hit_id);
    }
    if (r.worker_id.empty()) throw InvalidArgument("worker id is empty");
  }
  std::vector<std::string> lines;
  std::uint64_t seq = next_seq_;
  for (const auto& r : rs) {
    lines.push_back(json{{"seq", seq++}, {"worker_id", r.worker_id}, {"hit_id", r.hit_id},
                         {"item_id", r.item_id}, {"answer", answer_name(r.answer)}}
                        .dump());
  }
  append(kResponses, lines);
  for (const auto& r : rs) apply_response(r, next_seq_);
}

std::vector<WorkerResponse> Store::responses(const std::string& round_id) const {
  std::shared_lock lock(mu_);
  std::vector<std::pair<std::uint64_t, WorkerResponse>> out;
  for (const auto& [key, trail] : responses_) {
    const auto& hit = hits_.at(item_hit_.at(key.second));
    if (hit.round_id != round_id) continue;
    out.push_back({trail.back().seq, {key.first, hit.hit_id, key.second, trail.back().answer}});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<WorkerResponse> result;
  result.reserve(out.size());
  for (auto& [seq, r] : out) result.push_back(std::move(r));
  return result;
}

std::vector<ResponseAuditEntry> Store::response_audit(const std::string& worker_id,
                                                      const std::string& item_id) const {
  std::shared_lock lock(mu_);
  auto it = responses_.find({worker_id, item_id});
  if (it == responses_.end()) return {};
  return it->second;
}

std::optional<Answer> Store::answer(const std::string& worker_id,
                                    const std::string& item_id) const {
  std::shared_lock lock(mu_);
  auto it = responses_.find({worker_id, item_id});
  if (it == responses_.end()) return std::nullopt;
  return it->second.back().answer;
}

void Store::record_adjudication(const std::string& round_id, const Adjudication& a) {
  std::unique_lock lock(mu_);
  append(kAdjudications, {json{{"round_id", round_id}, {"tweet_id", a.tweet_id},
                               {"expert_id", a.expert_id}, {"label", label_name(a.final_label)}}
                              .dump()});
  adjudications_[round_id].push_back(a);
}

std::vector<Adjudication> Store::adjudications(const std::string& round_id) const {
  std::shared_lock lock(mu_);
  auto it = adjudications_.find(round_id);
  if (it == adjudications_.end()) return {};
  return it->second;
}

void Store::put_records(const std::vector<CorpusRecord>& records) {
  std::unique_lock lock(mu_);
  std::vector<std::string> lines;
  lines.reserve(records.size());
  for (const auto& r : records) {
    if (!is_tweet_id(r.tweet_id)) throw InvalidArgument("record tweet_id must be decimal digits");
    lines.push_back(release_line(r));
  }
  append(kRecords, lines);
  for (const auto& r : records) records_[r.tweet_id] = r;
}

std::vector<CorpusRecord> Store::records() const {
  std::shared_lock lock(mu_);
  std::vector<CorpusRecord> out;
  out.reserve(records_.size());
  for (const auto& [id, r] : records_) out.push_back(r);
  std::sort(out.begin(), out.end(),
            [](const CorpusRecord& a, const CorpusRecord& b) { return id_less(a.tweet_id, b.tweet_id); });
  return out;
}

AuditReport Store::audit() const {
  std::shared_lock lock(mu_);
  AuditReport report;
  auto problem = [&](std::string s) { report.problems.push_back(std::move(s)); };
  for (const auto& [id, round] : ledger_.entries()) {
    if (!tweet_index_.count(id)) problem("ledger entry " + id + " has no tweet");
  }
  for (const auto& [hit_id, hit] : hits_) {
    if (!rounds_.count(hit.round_id)) problem("HIT " + hit_id + " names unknown round " + hit.round_id);
    if (hit.items.size() != hit.n_base + hit.n_dups) problem("HIT " + hit_id + " item count mismatch");
    std::map<std::string, std::pair<int, std::string>> copies;
    for (const auto& it : hit.items) {
      if (!tweet_index_.count(it.tweet_id)) {
        problem("item " + it.item_id + " names unknown tweet " + it.tweet_id);
      }
      auto& c = copies[it.tweet_id];
      if (c.first > 0 && c.second != it.text) problem("duplicate copies differ in HIT " + hit_id);
      ++c.first;
      c.second = it.text;
    }
    std::size_t twice = 0;
    for (const auto& [t, c] : copies) {
      if (c.first == 2) ++twice;
      if (c.first > 2) problem("tweet " + t + " appears more than twice in HIT " + hit_id);
    }
    if (twice != hit.n_dups) problem("HIT " + hit_id + " duplicate count mismatch");
  }
  for (const auto& [key, trail] : responses_) {
    if (!item_hit_.count(key.second)) problem("response names unknown item " + key.second);
  }
  for (const auto& [key, hit] : assignments_) {
    if (!hits_.count(hit)) problem("assignment names unknown HIT " + hit);
  }
  for (const auto& [round, list] : adjudications_) {
    for (const auto& a : list) {
      if (!tweet_index_.count(a.tweet_id)) problem("adjudication names unknown tweet " + a.tweet_id);
    }
  }
  for (const auto& [id, r] : records_) {
    if (!tweet_index_.count(id)) problem("record names unknown tweet " + id);
  }
  return report;
}

}  // namespace forge
