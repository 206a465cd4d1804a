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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "forge/errors.h"
#include "forge/random.h"
#include "forge/store.h"

namespace forge {
namespace {

using Words = std::vector<std::string_view>;

// Filler never stems to a lexicon phrase, so only the deliberate phrases
// below decide what the rule filters see.
const Words kFiller = {
    "today", "really", "so", "just", "lol", "the", "this", "that", "got", "going", "need",
    "love", "hate", "tired", "morning", "night", "tomorrow", "week", "weekend", "again",
    "finally", "always", "never", "still", "gonna", "wanna", "why", "how", "what", "when",
    "people", "life", "day", "time", "home", "bed", "coffee", "you", "your", "great", "happy",
    "long", "early", "late", "omg", "smh", "literally", "honestly", "ready", "done", "officially",
    "and", "but", "with", "for", "all", "some", "too", "here", "there", "now", "later", "yes",
    "no", "man", "girl", "guys", "haha", "ugh", "yay", "back", "about", "like", "kinda"};

// Job phrases the seed filter catches.
const Words kJobSeen = {
    "my boss", "my manager", "the manager", "new job", "my job", "job interview", "at work",
    "stuck at work", "jobless again", "their work", "her work", "the boss wants",
    "managers meeting", "looking for a job", "first day at the job", "quit my job",
    "boss called me", "hate my job", "love my job", "your work hours"};

// Job phrases only the signal-word lexicon catches.
const Words kJobSignal = {
    "wrk", "my career", "career fair", "grind and hustle", "finally employed", "training today",
    "payday", "the company", "my coworker", "coworkers", "insurance agent",
    "real estate agent", "new career", "hustle hard", "employee training"};

// Job phrases neither lexicon knows.
const Words kJobHidden = {
    "double shift", "overtime again", "got hired", "my resume", "got the promotion",
    "clocked in", "the office", "paycheck", "two weeks notice", "got fired",
    "on my lunch break", "customers today", "new position", "the interview went well",
    "night shift", "staff meeting", "shift starts", "my supervisor", "salary", "hiring event"};

const Words kTopics = {
    "pizza for dinner", "this burger is amazing", "craving tacos", "coffee first",
    "brunch with the girls", "its so cold outside", "rain again", "snow day",
    "sunny and warm", "what a game", "lets go knicks", "that touchdown", "overtime thriller",
    "the refs are blind", "so much homework", "finals week", "class at 8am", "study group tonight",
    "love my friends", "party tonight", "miss you", "happy birthday", "new album drops",
    "watching netflix", "this song tho", "my mom called", "date night", "my baby girl",
    "road trip", "beach day", "gym time", "movie night", "shopping spree", "lazy sunday",
    "my dog", "traffic is crazy", "cant sleep", "sunday brunch with friends"};

// Notjob phrases that look like job talk to one of the lexicons.
const Words kTraps = {
    "good job", "nice job", "great job", "boss ass", "the boss is on tour", "nose job",
    "sack the manager", "what a career from vince young", "free agent", "good company",
    "training camp", "best game of his career", "team manager"};

const Words kCompanies = {"Panera Bread", "Target",    "CVS Health", "Walgreens", "Marriott",
                          "Home Depot",   "Starbucks", "Kroger",     "Aramark",   "Macy's"};
const Words kRoles = {"Baker", "Cashier", "Shift Supervisor", "Sales Associate", "Registered Nurse",
                      "Line Cook", "Barista", "Store Manager", "Stocker", "Delivery Driver"};
const Words kShifts = {"Night", "Day", "Part Time", "Full Time", "Weekend"};
const Words kCities = {"#Rochester, NY", "#Austin, TX", "#Denver, CO", "#Tampa, FL",
                       "#Columbus, OH", "#Portland, OR", "#Atlanta, GA", "#Phoenix, AZ"};
const Words kAdTags = {"#VeteranJob", "#Job", "#Jobs", "#TweetMyJobs", "#Hiring"};
const Words kIndustry = {"#Hospitality", "#Retail", "#RealEstate", "#HR", "#Healthcare",
                         "#Transportation"};

std::string_view pick(Rng& rng, const Words& w) { return w[rng.below(w.size())]; }

std::string link(Rng& rng) {
  static constexpr char kAlnum[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::string s = "http://t.co/";
  for (int i = 0; i < 8; ++i) s.push_back(kAlnum[rng.below(sizeof(kAlnum) - 1)]);
  return s;
}

// Joins chunks in a shuffled order and dresses them up like a tweet.
std::string assemble(Rng& rng, std::vector<std::string> chunks) {
  rng.shuffle(chunks);
  std::string text;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    std::string c = chunks[i];
    if (rng.bernoulli(0.2)) {
      static const Words kPunct = {"!", "!!", ".", "...", "?", ","};
      c += pick(rng, kPunct);
    }
    if (!text.empty()) text.push_back(' ');
    text += c;
  }
  if (!text.empty() && text[0] >= 'a' && text[0] <= 'z' && rng.bernoulli(0.5)) {
    text[0] = static_cast<char>(text[0] - 'a' + 'A');
  }
  return text;
}

std::string slangify(Rng& rng, std::string_view word) {
  if (word == "you" && rng.bernoulli(0.4)) return "u";
  if (word == "your" && rng.bernoulli(0.4)) return "ur";
  if (word == "great" && rng.bernoulli(0.4)) return "gr8";
  return std::string(word);
}

std::size_t token_count(const std::vector<std::string>& chunks) {
  std::size_t n = 0;
  for (const auto& c : chunks) n += 1 + std::count(c.begin(), c.end(), ' ');
  return n;
}

std::string ordinary_tweet(Rng& rng, const SyntheticConfig& cfg, std::vector<std::string> chunks) {
  const bool short_one = rng.bernoulli(cfg.short_rate);
  const std::size_t target = short_one ? 1 + rng.below(4) : 5 + rng.below(10);
  // Short tweets keep only their first phrase.
  if (short_one) chunks.resize(1);
  while (token_count(chunks) < target) chunks.push_back(slangify(rng, pick(rng, kFiller)));
  if (rng.bernoulli(0.15)) chunks.push_back("@user" + std::to_string(100 + rng.below(9000)));
  if (rng.bernoulli(0.08)) chunks.push_back(link(rng));
  return assemble(rng, std::move(chunks));
}

std::string job_tweet(Rng& rng, const SyntheticConfig& cfg) {
  std::vector<std::string> chunks;
  const double u = rng.uniform();
  const Words& bank = u < 0.5 ? kJobSeen : (u < 0.75 ? kJobSignal : kJobHidden);
  chunks.emplace_back(pick(rng, bank));
  if (rng.bernoulli(0.5)) chunks.emplace_back(pick(rng, kJobHidden));
  return ordinary_tweet(rng, cfg, std::move(chunks));
}

std::string notjob_tweet(Rng& rng, const SyntheticConfig& cfg, bool trap) {
  std::vector<std::string> chunks;
  if (trap) chunks.emplace_back(pick(rng, kTraps));
  chunks.emplace_back(pick(rng, kTopics));
  if (rng.bernoulli(0.3)) chunks.emplace_back(pick(rng, kTopics));
  return ordinary_tweet(rng, cfg, std::move(chunks));
}

std::string recruit_tweet(Rng& rng) {
  std::string t = std::string(pick(rng, kCompanies)) + ": " + std::string(pick(rng, kRoles)) +
                  " - " + std::string(pick(rng, kShifts)) + " (" +
                  std::string(pick(rng, kCities)) + ") ";
  t += rng.bernoulli(0.6) ? std::string("HTTP://URL") : link(rng);
  t += " ";
  t += pick(rng, kIndustry);
  std::vector<std::string_view> tags(kAdTags.begin(), kAdTags.end());
  rng.shuffle(tags);
  const std::size_t n = 1 + rng.below(tags.size());
  for (std::size_t i = 0; i < n; ++i) {
    t += " ";
    t += tags[i];
  }
  return t;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticConfig& cfg) {
  if (cfg.corpus_size == 0) throw InvalidArgument("corpus_size must be positive");
  for (double p : {cfg.job_fraction, cfg.confounder_rate, cfg.recruit_fraction, cfg.short_rate}) {
    if (!(p >= 0 && p <= 1)) throw InvalidArgument("simulation rates must lie in [0,1]");
  }
  Rng rng(derive_seed(cfg.seed, "corpus"));
  const std::size_t n = cfg.corpus_size;
  const auto n_job = static_cast<std::size_t>(std::llround(cfg.job_fraction * static_cast<double>(n)));
  const auto n_recruit =
      static_cast<std::size_t>(std::llround(cfg.recruit_fraction * static_cast<double>(n_job)));

  // 0 = recruit ad, 1 = other job, 2 = notjob.
  std::vector<int> kind(n, 2);
  std::fill(kind.begin(), kind.begin() + static_cast<std::ptrdiff_t>(n_job), 1);
  std::fill(kind.begin(), kind.begin() + static_cast<std::ptrdiff_t>(n_recruit), 0);
  rng.shuffle(kind);

  const std::size_t n_business = n_recruit == 0 ? 0 : (n_recruit + 4) / 5;
  const std::size_t n_personal = std::max<std::size_t>(1, (n - n_recruit + 3) / 4);
  auto account_name = [](std::size_t i) { return std::to_string(1000000 + i); };

  SyntheticCorpus corpus;
  corpus.tweets.reserve(n);
  for (std::size_t i = 0; i < n_business; ++i) corpus.truth.account[account_name(i)] = Source::kBusiness;
  for (std::size_t i = 0; i < n_personal; ++i) {
    corpus.truth.account[account_name(n_business + i)] = Source::kPersonal;
  }

  const std::uint64_t base = 409000000000000000ULL;
  std::size_t next_business = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Tweet t;
    t.tweet_id = std::to_string(base + i * 1000 + rng.below(1000));
    std::size_t account;
    Label label = Label::kJob;
    bool trap = false;
    if (kind[i] == 0) {
      t.text = recruit_tweet(rng);
      // A few ads are shared from personal accounts.
      account = rng.bernoulli(0.05) ? n_business + rng.below(n_personal) : next_business++ % n_business;
    } else {
      if (kind[i] == 1) {
        t.text = job_tweet(rng, cfg);
      } else {
        label = Label::kNotJob;
        trap = rng.bernoulli(cfg.confounder_rate);
        t.text = notjob_tweet(rng, cfg, trap);
      }
      account = (n_business > 0 && rng.bernoulli(0.01)) ? rng.below(n_business)
                                                        : n_business + rng.below(n_personal);
    }
    t.account_id = account_name(account);
    char ts[32];
    std::snprintf(ts, sizeof(ts), "2013-%02d-%02dT%02d:%02d:%02dZ", static_cast<int>(1 + i * 12 / n),
                  static_cast<int>(1 + rng.below(28)), static_cast<int>(rng.below(24)),
                  static_cast<int>(rng.below(60)), static_cast<int>(rng.below(60)));
    t.created_at = ts;
    if (rng.bernoulli(0.5)) {
      t.geo = GeoPoint{std::round((25.0 + 24.0 * rng.uniform()) * 1e4) / 1e4,
                       std::round((-124.0 + 57.0 * rng.uniform()) * 1e4) / 1e4};
    }
    corpus.truth.topic[t.tweet_id] = label;
    if (trap) corpus.truth.confounder[t.tweet_id] = true;
    corpus.tweets.push_back(std::move(t));
  }
  return corpus;
}

void write_truth(const GroundTruth& truth, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  for (const auto& [id, label] : truth.topic) {
    nlohmann::ordered_json j;
    j["tweet_id"] = id;
    j["topic"] = label_name(label);
    if (truth.confounder.count(id)) j["confounder"] = true;
    out << j.dump() << '\n';
  }
  for (const auto& [id, src] : truth.account) {
    nlohmann::ordered_json j;
    j["account_id"] = id;
    j["source"] = source_name(src);
    out << j.dump() << '\n';
  }
}

GroundTruth read_truth(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("ground truth file not found: " + path);
  GroundTruth truth;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.contains("tweet_id")) {
        const auto id = j.at("tweet_id").get<std::string>();
        truth.topic[id] = label_from_string(j.at("topic").get<std::string>());
        if (j.value("confounder", false)) truth.confounder[id] = true;
      } else {
        truth.account[j.at("account_id").get<std::string>()] =
            source_from_string(j.at("source").get<std::string>());
      }
    } catch (const std::exception& e) {
      throw ParseError(n, e.what());
    }
  }
  return truth;
}

Answer SimulatedAnnotator::answer(const std::string& tweet_id, const std::string& item_id,
                                  Label truth) const {
  if (careless) return keyed_uniform(seed, worker_id, item_id) < 0.5 ? Answer::kY : Answer::kN;
  const bool right = keyed_uniform(seed, worker_id, tweet_id) < accuracy;
  const Answer correct = to_answer(truth);
  if (right) return correct;
  return correct == Answer::kY ? Answer::kN : Answer::kY;
}

AnnotatorPool AnnotatorPool::make(std::size_t count, double accuracy, double careless_rate,
                                  std::uint64_t seed, const std::string& prefix) {
  if (!(accuracy >= 0 && accuracy <= 1)) throw InvalidArgument("accuracy must lie in [0,1]");
  AnnotatorPool pool;
  Rng rng(derive_seed(seed, "pool"));
  for (std::size_t i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%s%03zu", prefix.c_str(), i + 1);
    pool.workers.push_back({name, accuracy, seed, rng.bernoulli(careless_rate)});
  }
  return pool;
}

SimulationSummary simulate_round(Store& store, const std::string& round_id,
                                 const std::map<std::string, Label>& truth,
                                 const AnnotatorPool& pool, int n_required, std::uint64_t seed) {
  const auto hits = store.hits(round_id);
  if (hits.empty()) throw NotFound("round " + round_id + " has no HITs");
  SimulationSummary summary;
  std::vector<WorkerResponse> batch;
  for (const auto& hit : hits) {
    Rng rng(derive_seed(seed, hit.hit_id));
    std::vector<std::size_t> order(pool.workers.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    int valid = 0;
    for (std::size_t w : order) {
      if (valid >= n_required) break;
      const auto& worker = pool.workers[w];
      std::vector<WorkerResponse> answers;
      for (const auto& item : hit.items) {
        auto it = truth.find(item.tweet_id);
        if (it == truth.end()) throw InvalidArgument("no ground truth for tweet " + item.tweet_id);
        answers.push_back({worker.worker_id, hit.hit_id, item.item_id,
                           worker.answer(item.tweet_id, item.item_id, it->second)});
      }
      ++summary.worker_hits;
      if (screen_workers(answers, {hit}).is_valid(worker.worker_id, hit.hit_id)) {
        ++valid;
      } else {
        ++summary.rejected_pairs;
      }
      batch.insert(batch.end(), answers.begin(), answers.end());
    }
    if (valid < n_required) ++summary.unfilled_hits;
  }
  store.submit_responses(batch);
  summary.responses = batch.size();
  return summary;
}

Source simulated_source_vote(const std::vector<SimulatedAnnotator>& workers,
                             const std::string& tweet_id, Source truth) {
  if (workers.empty() || workers.size() % 2 == 0) {
    throw InvalidArgument("source vote needs an odd number of workers");
  }
  std::size_t right = 0;
  for (const auto& w : workers) {
    if (keyed_uniform(w.seed, w.worker_id + "/source", tweet_id) < w.accuracy) ++right;
  }
  if (2 * right > workers.size()) return truth;
  return truth == Source::kBusiness ? Source::kPersonal : Source::kBusiness;
}

Label SimulatedExpert::label(const std::string& tweet_id, Label truth) const {
  if (keyed_uniform(seed, expert_id, tweet_id) < accuracy) return truth;
  return truth == Label::kJob ? Label::kNotJob : Label::kJob;
}

}  // namespace forge
