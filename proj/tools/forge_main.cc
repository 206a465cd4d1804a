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

// forge: command-line front end for the labeling workflow.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "forge/accounts.h"
#include "forge/agreement.h"
#include "forge/api.h"
#include "forge/errors.h"
#include "forge/lexicon.h"
#include "forge/metrics.h"
#include "forge/model.h"
#include "forge/normalize.h"
#include "forge/pipeline.h"
#include "forge/random.h"
#include "forge/rounds.h"
#include "forge/sampler.h"
#include "forge/store.h"

namespace {

using forge::Label;
using json = nlohmann::json;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw forge::NotFound("cannot open " + path);
  return in;
}

std::vector<forge::Tweet> read_tweets(const std::string& path) {
  auto in = open_in(path);
  std::vector<forge::Tweet> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(forge::parse_tweet_json(line));
    } catch (const forge::InvalidArgument& e) {
      throw forge::ParseError(n, e.what());
    }
  }
  return out;
}

// `tweet_id<TAB>label` lines.
std::vector<std::pair<std::string, std::string>> read_pairs(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw forge::ParseError(n, "expected id<TAB>value");
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

std::map<std::string, Label> read_labels(const std::string& path) {
  std::map<std::string, Label> out;
  for (const auto& [id, v] : read_pairs(path)) out[id] = forge::label_from_string(v);
  return out;
}

std::vector<std::string> read_ids(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    if (tab != std::string::npos) line.resize(tab);
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

const forge::SlangDictionary& slang_for(const std::string& path) {
  static forge::SlangDictionary loaded;
  if (path.empty()) return forge::SlangDictionary::builtin();
  loaded = forge::SlangDictionary::load(path);
  return loaded;
}

forge::LexiconRuleSet rules_for(const std::string& which) {
  if (which == "c0") return forge::c0_ruleset();
  if (which == "c4") return forge::c4_ruleset();
  return forge::load_rules(which);
}

// Labeled documents for train/gridsearch: tweets that have a label.
void labeled_docs(const std::string& input, const std::string& labels_path,
                  const forge::SlangDictionary& dict, std::vector<forge::NormalizedDoc>& docs,
                  std::vector<Label>& y) {
  const auto labels = read_labels(labels_path);
  for (const auto& t : read_tweets(input)) {
    auto it = labels.find(t.tweet_id);
    if (it == labels.end()) continue;
    docs.push_back(forge::normalize(t, dict));
    y.push_back(it->second);
  }
  if (docs.size() != labels.size()) {
    throw forge::InvalidArgument(std::to_string(labels.size() - docs.size()) +
                                 " labeled ids are missing from the input");
  }
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::function<void()> g_stop;

void on_signal(int) {
  if (g_stop) g_stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forge: crowd-labeled corpus construction"};
  app.require_subcommand(1);
  std::string store_dir = "forge-store";
  app.add_option("--store", store_dir, "Store directory")->capture_default_str();
  std::function<int()> action;

  // filter
  auto* filter = app.add_subcommand("filter", "Print ids of tweets matched by a lexicon rule set");
  std::string f_input, f_rules = "c0", f_slang;
  int f_min_tokens = 5;
  bool f_explain = false;
  filter->add_option("--input", f_input, "Tweets JSON-lines")->required();
  filter->add_option("--rules", f_rules, "c0, c4 or a rules file")->capture_default_str();
  filter->add_option("--min-tokens", f_min_tokens)->capture_default_str();
  filter->add_option("--slang", f_slang, "Slang dictionary (default: built-in)");
  filter->add_flag("--explain", f_explain, "Also print the matching include phrases");
  filter->callback([&] {
    action = [&] {
      const auto rules = rules_for(f_rules);
      const auto& dict = slang_for(f_slang);
      for (const auto& t : read_tweets(f_input)) {
        const auto doc = forge::normalize(t, dict);
        if (static_cast<int>(doc.tokens.size()) < f_min_tokens) continue;
        const auto v = forge::match_rules(doc, rules);
        if (!v.matched) continue;
        std::cout << t.tweet_id;
        if (f_explain) {
          for (const auto& p : v.hit_include) std::cout << '\t' << p;
        }
        std::cout << '\n';
      }
      return 0;
    };
  });

  // train
  auto* train = app.add_subcommand("train", "Fit a linear SVM on labeled tweets");
  std::string t_input, t_labels, t_out, t_slang;
  forge::TrainConfig t_cfg;
  int t_max_n = 3, t_min_df = 1;
  train->add_option("--input", t_input, "Tweets JSON-lines")->required();
  train->add_option("--labels", t_labels, "tweet_id<TAB>job|notjob")->required();
  train->add_option("--out", t_out, "Model file")->required();
  train->add_option("--c", t_cfg.c)->capture_default_str();
  train->add_option("--class-weight-pos", t_cfg.class_weight_pos)->capture_default_str();
  train->add_option("--class-weight-neg", t_cfg.class_weight_neg)->capture_default_str();
  train->add_option("--epochs", t_cfg.epochs)->capture_default_str();
  train->add_option("--tolerance", t_cfg.tolerance)->capture_default_str();
  train->add_option("--seed", t_cfg.seed)->required();
  train->add_option("--max-n", t_max_n)->capture_default_str();
  train->add_option("--min-df", t_min_df)->capture_default_str();
  train->add_option("--slang", t_slang);
  train->callback([&] {
    action = [&] {
      std::vector<forge::NormalizedDoc> docs;
      std::vector<Label> y;
      labeled_docs(t_input, t_labels, slang_for(t_slang), docs, y);
      const auto m = forge::fit(docs, y, t_cfg, t_max_n, t_min_df);
      forge::save_model_file(m, t_out);
      std::cout << "trained on " << docs.size() << " tweets, " << m.vocab.size() << " features\n";
      return 0;
    };
  });

  // predict
  auto* predict = app.add_subcommand("predict", "Label tweets with a trained model");
  std::string p_model, p_input, p_slang;
  predict->add_option("--model", p_model)->required();
  predict->add_option("--input", p_input, "Tweets JSON-lines")->required();
  predict->add_option("--slang", p_slang);
  predict->callback([&] {
    action = [&] {
      const auto m = forge::load_model_file(p_model);
      const auto& dict = slang_for(p_slang);
      for (const auto& t : read_tweets(p_input)) {
        const auto p = forge::predict(m, forge::normalize(t, dict));
        std::printf("%s\t%s\t%.6f\n", t.tweet_id.c_str(), std::string(label_name(p.label)).c_str(),
                    p.confidence);
      }
      return 0;
    };
  });

  // gridsearch
  auto* grid = app.add_subcommand("gridsearch", "Cross-validated grid search over C and class weights");
  std::string g_input, g_labels, g_slang, g_c = "0.1,1,10", g_pos = "1,2,3,5,8", g_neg = "1";
  int g_k = 10, g_max_n = 3, g_min_df = 1;
  std::uint64_t g_seed = 0;
  grid->add_option("--input", g_input)->required();
  grid->add_option("--labels", g_labels)->required();
  grid->add_option("--k", g_k)->capture_default_str();
  grid->add_option("--seed", g_seed)->required();
  grid->add_option("--c", g_c)->capture_default_str();
  grid->add_option("--pos", g_pos)->capture_default_str();
  grid->add_option("--neg", g_neg)->capture_default_str();
  grid->add_option("--max-n", g_max_n)->capture_default_str();
  grid->add_option("--min-df", g_min_df)->capture_default_str();
  grid->add_option("--slang", g_slang);
  grid->callback([&] {
    action = [&] {
      std::vector<forge::NormalizedDoc> docs;
      std::vector<Label> y;
      labeled_docs(g_input, g_labels, slang_for(g_slang), docs, y);
      const auto vocab = forge::build_vocab(docs, g_max_n, g_min_df);
      const auto x = forge::vectorize_all(docs, vocab, g_max_n);
      std::vector<forge::GridCell> cells;
      for (double c : parse_doubles(g_c)) {
        for (double p : parse_doubles(g_pos)) {
          for (double n : parse_doubles(g_neg)) cells.push_back({c, p, n});
        }
      }
      forge::TrainConfig base;
      base.seed = g_seed;
      const auto r = forge::grid_search_cv(x, y, vocab.size(), cells, g_k, base);
      std::printf("%8s %8s %8s %8s\n", "C", "w_pos", "w_neg", "mean_f1");
      for (std::size_t i = 0; i < r.cells.size(); ++i) {
        const auto& c = r.cells[i];
        std::printf("%8g %8g %8g %8.4f%s\n", c.cell.c, c.cell.class_weight_pos,
                    c.cell.class_weight_neg, c.mean_f1, i == r.best_index ? "  *" : "");
      }
      return 0;
    };
  });

  // sample
  auto* sample = app.add_subcommand("sample", "Draw tweet ids that no round has used");
  std::string s_strategy, s_model, s_pool, s_job_likely, s_consume;
  std::size_t s_k = 0;
  std::uint64_t s_seed = 0;
  double s_percentile = 0.8, s_band = 0.1;
  sample->add_option("--strategy", s_strategy, "type1, type2, random-negative or rule-pool")
      ->required();
  sample->add_option("--k", s_k)->required();
  sample->add_option("--seed", s_seed)->required();
  sample->add_option("--model", s_model, "Model scoring the store's tweets (type1, type2)");
  sample->add_option("--pool", s_pool, "Candidate ids (rule-pool)");
  sample->add_option("--job-likely", s_job_likely, "Ids to avoid (random-negative)");
  sample->add_option("--percentile", s_percentile)->capture_default_str();
  sample->add_option("--band", s_band)->capture_default_str();
  sample->add_option("--consume", s_consume, "Record the sample in the ledger under this round");
  sample->callback([&] {
    action = [&] {
      forge::Store store(store_dir);
      const auto ledger = store.ledger();
      const auto strategy = forge::strategy_from_string(s_strategy);
      std::vector<std::string> ids;
      if (strategy == forge::Strategy::kType1 || strategy == forge::Strategy::kType2) {
        if (s_model.empty()) throw forge::InvalidArgument("--model is required for " + s_strategy);
        const auto m = forge::load_model_file(s_model);
        std::vector<forge::ScoredId> scored;
        for (const auto& t : store.tweets()) {
          if (ledger.contains(t.tweet_id)) continue;
          scored.push_back(
              {t.tweet_id,
               forge::predict(m, forge::normalize(t, forge::SlangDictionary::builtin())).confidence});
        }
        const auto ranked = forge::decision_rank(std::move(scored));
        forge::SampleSpec spec{strategy, s_k, s_percentile, s_band, s_seed};
        ids = strategy == forge::Strategy::kType1
                  ? forge::sample_type1(ranked.positive, spec, ledger)
                  : forge::sample_type2(ranked.positive, ranked.negative, spec, ledger);
      } else if (strategy == forge::Strategy::kRandomNegative) {
        std::set<std::string> likely;
        if (!s_job_likely.empty()) {
          for (const auto& id : read_ids(s_job_likely)) likely.insert(id);
        }
        ids = forge::sample_random_negatives(store.tweet_ids(), likely, s_k, s_seed, ledger);
      } else {
        if (s_pool.empty()) throw forge::InvalidArgument("--pool is required for rule-pool");
        ids = forge::sample_rule_pool(read_ids(s_pool), s_k, s_seed, ledger);
      }
      if (!s_consume.empty()) store.consume(ids, s_consume);
      for (const auto& id : ids) std::cout << id << '\n';
      return 0;
    };
  });

  // hits
  auto* hits = app.add_subcommand("hits", "Build, export and import HITs");
  hits->require_subcommand(1);
  auto* hits_build = hits->add_subcommand("build", "Create a round's HITs from sampled ids");
  std::string h_round, h_ids, h_out, h_in;
  std::size_t h_subset = 40, h_dups = 5;
  int h_workers = 5;
  std::uint64_t h_seed = 0;
  bool h_consumed = false;
  hits_build->add_option("--round", h_round)->required();
  hits_build->add_option("--ids", h_ids, "One tweet id per line")->required();
  hits_build->add_option("--subset", h_subset)->capture_default_str();
  hits_build->add_option("--dups", h_dups)->capture_default_str();
  hits_build->add_option("--workers", h_workers, "Workers per HIT")->capture_default_str();
  hits_build->add_option("--seed", h_seed)->required();
  hits_build->add_flag("--already-consumed", h_consumed,
                       "The ids were recorded in the ledger by `sample --consume`");
  hits_build->callback([&] {
    action = [&] {
      forge::Store store(store_dir);
      const auto ids = read_ids(h_ids);
      std::vector<forge::Tweet> batch;
      for (const auto& id : ids) {
        auto t = store.tweet(id);
        if (!t) throw forge::NotFound("unknown tweet " + id);
        batch.push_back(*t);
      }
      const auto built = forge::build_hits(h_round, batch, h_subset, h_dups, h_seed);
      if (!h_consumed) store.consume(ids, h_round);
      forge::RoundInfo info;
      info.round_id = h_round;
      info.workers_per_hit = h_workers;
      store.put_round(info);
      store.add_hits(built);
      std::cout << built.size() << " HITs for " << ids.size() << " tweets\n";
      return 0;
    };
  });
  auto* hits_export = hits->add_subcommand("export", "Write a round's HITs as CSV");
  hits_export->add_option("--round", h_round)->required();
  hits_export->add_option("--out", h_out, "CSV path (default: stdout)");
  hits_export->callback([&] {
    action = [&] {
      forge::Store store(store_dir);
      const auto hs = store.hits(h_round);
      if (hs.empty()) throw forge::NotFound("round " + h_round + " has no HITs");
      if (h_out.empty()) {
        forge::write_hits_csv(hs, std::cout);
      } else {
        std::ofstream out(h_out);
        forge::write_hits_csv(hs, out);
      }
      return 0;
    };
  });
  auto* hits_import = hits->add_subcommand("import", "Load worker responses from CSV");
  hits_import->add_option("--in", h_in, "worker_id,hit_id,item_id,answer CSV")->required();
  hits_import->callback([&] {
    action = [&] {
      forge::Store store(store_dir);
      auto in = open_in(h_in);
      const auto rs = forge::read_responses_csv(in);
      store.submit_responses(rs);
      std::cout << rs.size() << " responses imported\n";
      return 0;
    };
  });

  // aggregate
  auto* agg = app.add_subcommand("aggregate", "Screen workers and aggregate a round");
  std::string a_round;
  int a_n = 5;
  agg->add_option("--round", a_round)->required();
  agg->add_option("--n", a_n, "Valid votes required per tweet")->capture_default_str();
  agg->callback([&] {
    action = [&] {
      forge::Store store(store_dir);
      const auto hs = store.hits(a_round);
      if (hs.empty()) throw forge::NotFound("round " + a_round + " has no HITs");
      const auto rs = store.responses(a_round);
      const auto screening = forge::screen_workers(rs, hs);
      const auto result = forge::aggregate(rs, hs, screening, a_n);
      std::cout << "tweet_id\ty\tn\tconsensus\n";
      for (const auto& l : result.labels) {
        std::cout << l.tweet_id << '\t' << l.y << '\t' << l.n << '\t'
                  << forge::consensus_name(l.consensus) << '\n';
      }
      std::cerr << screening.valid.size() << " valid and " << screening.rejected.size()
                << " rejected worker-HITs; " << result.short_staffed.size()
                << " tweets short-staffed\n";
      return 0;
    };
  });

  // adjudicate
  auto* adj = app.add_subcommand("adjudicate", "Open or record expert adjudication");
  std::string d_round = "r3", d_from, d_experts = "expert1,expert2", d_expert, d_tweet, d_label;
  int d_n = 5;
  adj->add_option("--round", d_round)->capture_default_str();
  adj->add_option("--from", d_from, "Comma-separated rounds whose disagreements to queue");
  adj->add_option("--experts", d_experts)->capture_default_str();
  adj->add_option("--n", d_n)->capture_default_str();
  adj->add_option("--expert", d_expert, "Record or list for this expert");
  adj->add_option("--tweet", d_tweet);
  adj->add_option("--label", d_label, "job or notjob");
  adj->callback([&] {
    action = [&] {
      forge::Store store(store_dir);
      if (!d_from.empty()) {
        std::vector<forge::AggregatedLabel> all;
        std::stringstream ss(d_from);
        std::string rid;
        while (std::getline(ss, rid, ',')) {
          const auto hs = store.hits(rid);
          const auto rs = store.responses(rid);
          const auto r = forge::aggregate(rs, hs, forge::screen_workers(rs, hs), d_n);
          all.insert(all.end(), r.labels.begin(), r.labels.end());
        }
        const auto queue = forge::adjudication_queue(all);
        std::map<std::string, const forge::AggregatedLabel*> by_id;
        for (const auto& l : all) by_id[l.tweet_id] = &l;
        forge::RoundInfo info;
        info.round_id = d_round;
        info.kind = forge::RoundKind::kAdjudication;
        info.workers_per_hit = 1;
        std::stringstream es(d_experts);
        std::string e;
        while (std::getline(es, e, ',')) info.experts.push_back(e);
        char buf[32];
        for (std::size_t i = 0; i < queue.size(); ++i) {
          std::snprintf(buf, sizeof(buf), "%s-a%04zu", d_round.c_str(), i + 1);
          info.queue.push_back({buf, queue[i], by_id[queue[i]]->y, by_id[queue[i]]->n});
        }
        store.put_round(info);
        std::cout << queue.size() << " tweets queued for adjudication\n";
        return 0;
      }
      const auto info = store.round(d_round);
      if (!info || info->kind != forge::RoundKind::kAdjudication) {
        throw forge::NotFound("no adjudication round " + d_round);
      }
      std::vector<forge::AggregatedLabel> crowd;
      for (const auto& item : info->queue) {
        forge::AggregatedLabel l;
        l.tweet_id = item.tweet_id;
        l.y = item.y;
        l.n = item.n;
        l.needs_adjudication = true;
        crowd.push_back(l);
      }
      forge::AdjudicationBook book(info->experts, crowd);
      for (const auto& a : store.adjudications(d_round)) book.record(a.tweet_id, a.expert_id, a.final_label);
      if (!d_tweet.empty()) {
        if (d_expert.empty() || d_label.empty()) {
          throw forge::InvalidArgument("--tweet needs --expert and --label");
        }
        const auto a = book.record(d_tweet, d_expert, forge::label_from_string(d_label));
        store.record_adjudication(d_round, a);
        return 0;
      }
      const auto pending = d_expert.empty() ? book.queue() : book.pending_for(d_expert);
      for (const auto& id : pending) {
        const auto* c = book.crowd(id);
        const auto t = store.tweet(id);
        std::cout << id << "\tY=" << c->y << "\tN=" << c->n << '\t'
                  << (t ? forge::anonymize(t->text) : std::string()) << '\n';
      }
      std::cerr << book.resolved().size() << " resolved, " << book.unresolved().size()
                << " unresolved\n";
      return 0;
    };
  });

  // agreement
  auto* agr = app.add_subcommand("agreement", "Fleiss kappa and Krippendorff alpha for a round");
  std::string r_round;
  agr->add_option("--round", r_round)->required();
  agr->callback([&] {
    action = [&] {
      forge::Store store(store_dir);
      const auto hs = store.hits(r_round);
      if (hs.empty()) throw forge::NotFound("round " + r_round + " has no HITs");
      const auto rs = store.responses(r_round);
      const auto m = forge::hit_rating_matrices(rs, hs, forge::screen_workers(rs, hs));
      for (auto stat : {forge::AgreementStatistic::kFleissKappa,
                        forge::AgreementStatistic::kKrippendorffAlpha}) {
        try {
          const auto s = forge::round_summary(m, stat);
          std::printf("%-20s %.4f +- %.4f  (%s, %zu HITs, %zu undefined)\n",
                      std::string(forge::statistic_name(stat)).c_str(), s.mean, s.stdev,
                      std::string(forge::band_name(s.band)).c_str(), s.per_hit_values.size(),
                      s.undefined_hits);
        } catch (const forge::UndefinedStatistic& e) {
          std::printf("%-20s undefined: %s\n", std::string(forge::statistic_name(stat)).c_str(),
                      e.what());
        }
      }
      return 0;
    };
  });

  // eval
  auto* ev = app.add_subcommand("eval", "Per-class precision, recall and F1");
  std::string e_pred, e_ref;
  ev->add_option("--pred", e_pred, "tweet_id<TAB>label predictions")->required();
  ev->add_option("--ref", e_ref, "tweet_id<TAB>label references")->required();
  ev->callback([&] {
    action = [&] {
      const auto preds = read_labels(e_pred);
      const auto refs = read_labels(e_ref);
      std::vector<Label> p, r;
      for (const auto& [id, l] : refs) {
        auto it = preds.find(id);
        if (it == preds.end()) throw forge::InvalidArgument("no prediction for " + id);
        p.push_back(it->second);
        r.push_back(l);
      }
      std::cout << forge::format_report(forge::eval_report(p, r));
      return 0;
    };
  });

  // effective-recall
  auto* er = app.add_subcommand("effective-recall", "Corpus-level recall from test-set recall");
  forge::EffectiveRecallInputs er_in;
  er->add_option("--corpus-job,-Y", er_in.corpus_job)->required();
  er->add_option("--corpus-notjob,-N", er_in.corpus_notjob)->required();
  er->add_option("--test-job", er_in.test_job)->required();
  er->add_option("--test-notjob", er_in.test_notjob)->required();
  er->add_option("--recall,-R", er_in.test_recall)->required();
  er->callback([&] {
    action = [&] {
      std::printf("%.6f\n", forge::effective_recall(er_in));
      return 0;
    };
  });

  // accounts
  auto* acc = app.add_subcommand("accounts", "Account heuristic and hashtag census");
  acc->require_subcommand(1);
  std::string c_input, c_labels, c_hashtags;
  auto pattern_for = [&]() {
    return c_hashtags.empty() ? forge::RecruitmentPattern::builtin()
                              : forge::RecruitmentPattern::load(c_hashtags);
  };
  auto* classify = acc->add_subcommand("classify", "Label accounts personal or business");
  classify->add_option("--input", c_input)->required();
  classify->add_option("--labels", c_labels, "tweet_id<TAB>job|notjob topic labels")->required();
  classify->add_option("--hashtags", c_hashtags);
  classify->callback([&] {
    action = [&] {
      const auto labels = read_labels(c_labels);
      std::vector<std::pair<forge::Tweet, Label>> rows;
      for (const auto& t : read_tweets(c_input)) {
        auto it = labels.find(t.tweet_id);
        rows.emplace_back(t, it == labels.end() ? Label::kNotJob : it->second);
      }
      for (const auto& [id, p] : forge::classify_accounts(rows, pattern_for())) {
        std::cout << id << '\t' << forge::source_name(p.kind) << '\t' << p.n_pattern_job << '\t'
                  << p.n_other << '\n';
      }
      return 0;
    };
  });
  auto* census = acc->add_subcommand("census", "Hashtag and URL co-occurrence");
  census->add_option("--input", c_input)->required();
  census->add_option("--hashtags", c_hashtags);
  census->callback([&] {
    action = [&] {
      std::printf("%-14s %10s %14s %8s\n", "hashtag", "tweets", "with_url", "percent");
      for (const auto& row : forge::hashtag_census(read_tweets(c_input), pattern_for())) {
        std::printf("%-14s %10zu %14zu %7.2f%%\n", row.hashtag.c_str(), row.with_hashtag,
                    row.with_hashtag_and_url, row.percent);
      }
      return 0;
    };
  });

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load tweets into the store");
  std::string i_input;
  ingest->add_option("--input", i_input, "Tweets JSON-lines")->required();
  ingest->callback([&] {
    action = [&] {
      forge::Store store(store_dir);
      const auto r = store.ingest_file(i_input);
      std::cout << r.accepted << " accepted, " << r.duplicates << " duplicates, "
                << r.errors.size() << " rejected\n";
      for (const auto& e : r.errors) std::cerr << "line " << e.line << ": " << e.message << '\n';
      return r.errors.empty() ? 0 : 3;
    };
  });

  // export
  auto* exp = app.add_subcommand("export", "Write the release file");
  std::string x_out;
  bool x_ids_only = false;
  exp->add_option("--out", x_out, "Release path (default: stdout)");
  exp->add_flag("--ids-only", x_ids_only, "Omit tweet text");
  exp->callback([&] {
    action = [&] {
      forge::Store store(store_dir);
      const auto records = store.records();
      if (records.empty()) throw forge::NotFound("the store has no release records");
      std::map<std::string, std::string> texts;
      if (!x_ids_only) {
        for (const auto& t : store.tweets()) texts[t.tweet_id] = t.text;
      }
      if (x_out.empty()) {
        forge::export_release(records, std::cout, x_ids_only, &texts);
      } else {
        std::ofstream out(x_out);
        forge::export_release(records, out, x_ids_only, &texts);
      }
      return 0;
    };
  });

  // stats
  auto* stats = app.add_subcommand("stats", "Label counts over the release records");
  stats->callback([&] {
    action = [&] {
      forge::Store store(store_dir);
      std::cout << forge::format_stats(forge::corpus_stats(store.records()));
      return 0;
    };
  });

  // audit
  auto* audit = app.add_subcommand("audit", "Check the store's referential integrity");
  audit->callback([&] {
    action = [&] {
      forge::Store store(store_dir);
      const auto r = store.audit();
      for (const auto& p : r.problems) std::cout << p << '\n';
      std::cout << (r.ok() ? "ok" : "problems found") << '\n';
      return r.ok() ? 0 : 1;
    };
  });

  // run
  auto* run = app.add_subcommand("run", "Run the labeling pipeline from a config file");
  std::string u_config, u_stage;
  bool u_simulate = false;
  run->add_option("--config", u_config)->required();
  run->add_option("--stage", u_stage, "Run only this stage");
  run->add_flag("--simulate", u_simulate, "Synthetic corpus and simulated crowd");
  run->callback([&] {
    action = [&] {
      auto cfg = forge::PipelineConfig::load(u_config);
      if (u_simulate) cfg.simulate = true;
      forge::Pipeline pipeline(cfg);
      auto print = [](const forge::StageReport& r) {
        std::cout << r.stage << ": " << (r.up_to_date ? "up-to-date" : "done") << '\n';
      };
      if (!u_stage.empty()) {
        print(pipeline.run_stage(u_stage));
        return 0;
      }
      const auto report = pipeline.run_all(print);
      const auto& er5 = report.at("effective_recall").at("c5");
      std::cout << "report: " << (cfg.work_dir / "report.json").string() << '\n';
      if (er5.contains("estimate") && !er5.at("estimate").is_null()) {
        std::printf("c5 effective recall %.4f\n", er5.at("estimate").get<double>());
      }
      return 0;
    };
  });

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the annotation API");
  std::string v_host = "127.0.0.1", v_tokens, v_report;
  int v_port = 8080;
  serve->add_option("--host", v_host)->capture_default_str();
  serve->add_option("--port", v_port)->capture_default_str();
  serve->add_option("--tokens", v_tokens, "token<TAB>principal lines")->required();
  serve->add_option("--report", v_report, "Run report for /stats/models");
  serve->callback([&] {
    action = [&] {
      forge::Store store(store_dir);
      forge::ApiServer server(store, forge::load_tokens(v_tokens), v_report);
      const int port = server.bind(v_host, v_port);
      std::cout << "listening on " << v_host << ':' << port << std::endl;
      g_stop = [&] { server.stop(); };
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.listen();
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }
  try {
    return action ? action() : 0;
  } catch (const forge::DependencyError& e) {
    std::cerr << "forge: " << e.what() << " (missing stage: " << e.stage() << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "forge: " << e.what() << '\n';
    return forge::exit_code_for(e);
  }
}
