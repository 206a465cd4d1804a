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

#include "forge/api.h"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include <httplib.h>

#include "forge/agreement.h"
#include "forge/errors.h"
#include "forge/rounds.h"

namespace forge {
using json = nlohmann::json;

namespace {

// Missing or unknown credentials; answered with 401 rather than 403.
class Unauthenticated : public Forbidden {
 public:
  using Forbidden::Forbidden;
};

ApiResponse error(int status, const std::string& message) {
  return {status, json{{"error", message}}};
}

json statistic_json(const std::vector<RatingMatrix>& hits, AgreementStatistic stat) {
  try {
    const auto s = round_summary(hits, stat);
    return json{{"statistic", statistic_name(stat)},
                {"mean", s.mean},
                {"stdev", s.stdev},
                {"band", band_name(s.band)},
                {"hits", s.per_hit_values.size()},
                {"undefined_hits", s.undefined_hits}};
  } catch (const UndefinedStatistic& e) {
    return json{{"statistic", statistic_name(stat)}, {"undefined", true}, {"reason", e.what()}};
  }
}

json counts_json(const LabelCounts& c) {
  return json{{"positive", c.positive}, {"negative", c.negative}, {"na", c.na}};
}

// Rebuilds the adjudication state of one round from the store.
AdjudicationBook book_for(const Store& store, const RoundInfo& info) {
  std::vector<AggregatedLabel> crowd;
  for (const auto& item : info.queue) {
    AggregatedLabel l;
    l.tweet_id = item.tweet_id;
    l.y = item.y;
    l.n = item.n;
    l.consensus = item.y > item.n ? Consensus::kMajorityJob : Consensus::kMajorityNotJob;
    l.needs_adjudication = true;
    crowd.push_back(l);
  }
  AdjudicationBook book(info.experts, crowd);
  for (const auto& a : store.adjudications(info.round_id)) {
    book.record(a.tweet_id, a.expert_id, a.final_label);
  }
  return book;
}

bool is_expert(const RoundInfo& info, const std::string& id) {
  return std::find(info.experts.begin(), info.experts.end(), id) != info.experts.end();
}

}  // namespace

std::map<std::string, std::string> parse_tokens(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw ParseError(lineno, "expected token<TAB>principal");
    }
    if (!out.emplace(line.substr(0, tab), line.substr(tab + 1)).second) {
      throw ParseError(lineno, "duplicate token");
    }
  }
  return out;
}

std::map<std::string, std::string> load_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open token file " + path);
  return parse_tokens(in);
}

ApiService::ApiService(Store& store, std::map<std::string, std::string> tokens,
                       std::filesystem::path report_path)
    : store_(store), tokens_(std::move(tokens)), report_path_(std::move(report_path)) {}

std::string ApiService::principal(const ApiRequest& req) const {
  static constexpr std::string_view kBearer = "Bearer ";
  if (!req.authorization || req.authorization->rfind(kBearer, 0) != 0) {
    throw Unauthenticated("missing bearer token");
  }
  auto it = tokens_.find(req.authorization->substr(kBearer.size()));
  if (it == tokens_.end()) throw Unauthenticated("unknown token");
  return it->second;
}

ApiResponse ApiService::handle(const ApiRequest& req) {
  static const std::regex kNext(R"(^/rounds/([^/]+)/next$)");
  static const std::regex kAgreement(R"(^/stats/agreement/([^/]+)$)");
  try {
    std::smatch m;
    if (req.method == "GET" && std::regex_match(req.path, m, kNext)) {
      return next_task(principal(req), m[1]);
    }
    if (req.method == "POST" && req.path == "/labels") {
      const auto who = principal(req);
      return post_label(who, json::parse(req.body));
    }
    if (req.method == "GET" && req.path == "/adjudication/next") {
      return next_adjudication(principal(req));
    }
    if (req.method == "POST" && req.path == "/adjudication") {
      const auto who = principal(req);
      return post_adjudication(who, json::parse(req.body));
    }
    if (req.method == "GET" && std::regex_match(req.path, m, kAgreement)) {
      principal(req);
      return agreement(m[1]);
    }
    if (req.method == "GET" && req.path == "/stats/corpus") {
      principal(req);
      return corpus();
    }
    if (req.method == "GET" && req.path == "/stats/models") {
      principal(req);
      return models();
    }
    return error(404, "no route for " + req.method + " " + req.path);
  } catch (const Unauthenticated& e) {
    return error(401, e.what());
  } catch (const Forbidden& e) {
    return error(403, e.what());
  } catch (const NotFound& e) {
    return error(404, e.what());
  } catch (const ConflictError& e) {
    return error(409, e.what());
  } catch (const InvalidArgument& e) {
    return error(400, e.what());
  } catch (const ParseError& e) {
    return error(400, e.what());
  } catch (const json::exception& e) {
    return error(400, std::string("malformed request body: ") + e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

ApiResponse ApiService::next_task(const std::string& worker, const std::string& round_id) {
  const auto info = store_.round(round_id);
  if (!info || !info->open) throw NotFound("no open round " + round_id);
  if (info->kind != RoundKind::kAnnotation) {
    throw InvalidArgument("round " + round_id + " is not an annotation round");
  }
  const auto hit_id = store_.assign(round_id, worker);
  if (!hit_id) throw NotFound("every HIT of round " + round_id + " is fully staffed");
  const auto hit = store_.hit(*hit_id);
  std::size_t answered = 0;
  const HitItem* next = nullptr;
  for (const auto& item : hit->items) {
    if (store_.answer(worker, item.item_id)) {
      ++answered;
    } else if (!next) {
      next = &item;
    }
  }
  json progress{{"answered", answered}, {"total", hit->items.size()}};
  if (!next) return {200, json{{"round_id", round_id}, {"task", nullptr}, {"progress", progress}}};
  return {200, json{{"round_id", round_id},
                    {"task",
                     {{"item_id", next->item_id},
                      {"anonymized_text", next->text},
                      {"round_id", round_id},
                      {"question", kTaskQuestion}}},
                    {"progress", progress}}};
}

ApiResponse ApiService::post_label(const std::string& worker, const json& body) {
  const std::string item_id = body.at("item_id").get<std::string>();
  const auto answer = parse_answer(body.at("answer").get<std::string>());
  if (!answer) throw InvalidArgument("answer must be Y or N");
  const auto hit = store_.hit_for_item(item_id);
  if (!hit) throw Forbidden("item " + item_id + " is not assigned to " + worker);
  const auto assigned = store_.assignment(hit->round_id, worker);
  if (!assigned || *assigned != hit->hit_id) {
    throw Forbidden("item " + item_id + " is not assigned to " + worker);
  }
  const auto info = store_.round(hit->round_id);
  if (info && !info->open) throw Forbidden("round " + hit->round_id + " is closed");
  const std::size_t revisions = store_.submit_response({worker, hit->hit_id, item_id, *answer});
  return {200, json{{"item_id", item_id}, {"answer", answer_name(*answer)}, {"revisions", revisions}}};
}

ApiResponse ApiService::next_adjudication(const std::string& expert) {
  bool known = false;
  for (const auto& info : store_.rounds()) {
    if (info.kind != RoundKind::kAdjudication || !is_expert(info, expert)) continue;
    known = true;
    const auto book = book_for(store_, info);
    const auto pending = book.pending_for(expert);
    if (pending.empty()) continue;
    const auto& tweet_id = pending.front();
    const auto* crowd = book.crowd(tweet_id);
    const auto tweet = store_.tweet(tweet_id);
    std::string item_id;
    for (const auto& item : info.queue) {
      if (item.tweet_id == tweet_id) item_id = item.item_id;
    }
    return {200, json{{"round_id", info.round_id},
                      {"task",
                       {{"item_id", item_id},
                        {"anonymized_text", tweet ? anonymize(tweet->text) : std::string()},
                        {"round_id", info.round_id},
                        {"question", kTaskQuestion},
                        {"context", {{"votes", {{"Y", crowd->y}, {"N", crowd->n}}}}}}},
                      {"remaining", pending.size()}}};
  }
  if (!known) throw Forbidden(expert + " is not an expert of any adjudication round");
  return {200, json{{"task", nullptr}, {"remaining", 0}}};
}

ApiResponse ApiService::post_adjudication(const std::string& expert, const json& body) {
  const std::string item_id = body.at("item_id").get<std::string>();
  const auto label = parse_label(body.at("label").get<std::string>());
  if (!label) throw InvalidArgument("label must be job or notjob");
  for (const auto& info : store_.rounds()) {
    if (info.kind != RoundKind::kAdjudication) continue;
    auto it = std::find_if(info.queue.begin(), info.queue.end(),
                           [&](const AdjudicationItem& q) { return q.item_id == item_id; });
    if (it == info.queue.end()) continue;
    if (!is_expert(info, expert)) throw Forbidden(expert + " is not an expert of " + info.round_id);
    auto book = book_for(store_, info);
    book.record(it->tweet_id, expert, *label);
    store_.record_adjudication(info.round_id, {it->tweet_id, expert, *label});
    const auto status = book.status(it->tweet_id);
    const char* name = status == AdjudicationStatus::kResolved     ? "resolved"
                       : status == AdjudicationStatus::kUnresolved ? "unresolved"
                                                                   : "pending";
    return {200, json{{"round_id", info.round_id}, {"item_id", item_id}, {"status", name}}};
  }
  throw NotFound("unknown adjudication item " + item_id);
}

ApiResponse ApiService::agreement(const std::string& round_id) const {
  const auto info = store_.round(round_id);
  if (!info) throw NotFound("unknown round " + round_id);
  if (info->kind != RoundKind::kAnnotation) {
    throw InvalidArgument("round " + round_id + " is not an annotation round");
  }
  const auto hits = store_.hits(round_id);
  const auto responses = store_.responses(round_id);
  const auto screening = screen_workers(responses, hits);
  const auto matrices = hit_rating_matrices(responses, hits, screening);
  return {200, json{{"round_id", round_id},
                    {"hits", hits.size()},
                    {"rated_hits", matrices.size()},
                    {"fleiss_kappa", statistic_json(matrices, AgreementStatistic::kFleissKappa)},
                    {"krippendorff_alpha",
                     statistic_json(matrices, AgreementStatistic::kKrippendorffAlpha)}}};
}

ApiResponse ApiService::corpus() const {
  const auto s = corpus_stats(store_.records());
  return {200, json{{"tweets", store_.tweet_count()},
                    {"records", s.records},
                    {"topic_human", counts_json(s.topic_human)},
                    {"topic_machine", counts_json(s.topic_machine)},
                    {"source_human", counts_json(s.source_human)},
                    {"source_machine", counts_json(s.source_machine)}}};
}

ApiResponse ApiService::models() const {
  if (report_path_.empty() || !std::filesystem::exists(report_path_)) {
    throw NotFound("no run report yet");
  }
  std::ifstream in(report_path_);
  const json report = json::parse(in);
  json out{{"evaluation", report.value("evaluation", json::object())},
           {"effective_recall", report.value("effective_recall", json::object())},
           {"training", report.value("training", json::object())}};
  return {200, out};
}

struct ApiServer::Impl {
  ApiService service;
  httplib::Server server;
  int port = -1;

  Impl(Store& store, std::map<std::string, std::string> tokens, std::filesystem::path report)
      : service(store, std::move(tokens), std::move(report)) {
    auto route = [this](const httplib::Request& req, httplib::Response& res) {
      ApiRequest r;
      r.method = req.method;
      r.path = req.path;
      if (req.has_header("Authorization")) r.authorization = req.get_header_value("Authorization");
      r.body = req.body;
      const auto out = service.handle(r);
      res.status = out.status;
      res.set_content(out.body.dump(), "application/json");
    };
    server.Get(".*", route);
    server.Post(".*", route);
  }
};

ApiServer::ApiServer(Store& store, std::map<std::string, std::string> tokens,
                     std::filesystem::path report_path)
    : impl_(std::make_unique<Impl>(store, std::move(tokens), std::move(report_path))) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    impl_->port = port;
  } else {
    impl_->port = -1;
  }
  if (impl_->port < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return impl_->port;
}

void ApiServer::listen() {
  if (impl_->port < 0) throw Error("bind before listen");
  impl_->server.listen_after_bind();
}

void ApiServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

bool ApiServer::running() const { return impl_->server.is_running(); }

}  // namespace forge
