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

// Release gate. Prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails. Set FORGE_ACCEPTANCE_KEEP=1 to keep the
// simulated run's work directory.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "forge/accounts.h"
#include "forge/agreement.h"
#include "forge/errors.h"
#include "forge/lexicon.h"
#include "forge/metrics.h"
#include "forge/model.h"
#include "forge/pipeline.h"
#include "forge/random.h"
#include "forge/store.h"
#include "forge/svm.h"

namespace forge {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Collects failed checks of one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s: got %.6f want %.6f +- %g", what.c_str(), got, want, tol);
    expect(std::abs(got - want) <= tol, buf);
  }
  void note(const std::string& s) { notes_.push_back(s); }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// --- effective recall ------------------------------------------------------

void effective_recall_table(Check& c) {
  struct Row {
    const char* model;
    EffectiveRecallInputs in;
    double want;
  };
  const Row rows[] = {{"C1", {115696, 6990633, 512, 1088, 0.82}, 0.14},
                      {"C2", {195442, 6910887, 691, 909, 0.95}, 0.41},
                      {"C3", {190471, 6915858, 707, 893, 0.96}, 0.46},
                      {"C5", {233187, 6873142, 729, 871, 0.97}, 0.57}};
  for (const Row& r : rows) {
    const auto t0 = Clock::now();
    const double got = effective_recall(r.in);
    const double us = seconds_since(t0) * 1e6;
    c.near(got, r.want, 0.005, r.model);
    c.expect(us < 1000.0, std::string(r.model) + " took " + std::to_string(us) + " us");
    c.note(std::string(r.model) + "=" + format2(got));
  }
}

// --- agreement -------------------------------------------------------------

void agreement_oracles(Check& c) {
  c.near(fleiss_kappa(RatingMatrix::from_yes_no({{5, 0}, {3, 2}})), 0.0625, 1e-9, "fleiss");
  const std::vector<std::vector<int>> units = {{1, 1}, {1, 0}, {0, 0}, {0, 0}};
  c.near(krippendorff_alpha_nominal(units), 0.5333, 1e-4, "krippendorff");
  // Marginals 0.5/0.5 on both sides, observed agreement 0.5.
  c.near(cohen_kappa({1, 1, 0, 0}, {1, 0, 1, 0}), 0.0, 1e-12, "cohen");

  c.near(fleiss_kappa(RatingMatrix::from_yes_no({{5, 0}, {0, 5}, {5, 0}})), 1.0, 1e-12,
         "fleiss perfect");
  c.near(krippendorff_alpha_nominal(std::vector<std::vector<int>>{{1, 1}, {0, 0}, {1, 1}}), 1.0,
         1e-12, "krippendorff perfect");
  c.near(cohen_kappa({1, 0, 1, 0}, {1, 0, 1, 0}), 1.0, 1e-12, "cohen perfect");
}

// --- svm -------------------------------------------------------------------

FeatureVector dense2(double a, double b) { return {{{0, a}, {1, b}}}; }

double objective2(const std::vector<FeatureVector>& x, const std::vector<Label>& y,
                  const TrainConfig& cfg, double w0, double w1, double b) {
  double loss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = y[i] == Label::kJob ? 1.0 : -1.0;
    const double wt = y[i] == Label::kJob ? cfg.class_weight_pos : cfg.class_weight_neg;
    const double m = w0 * x[i].entries[0].value + w1 * x[i].entries[1].value + b;
    loss += wt * std::max(0.0, 1.0 - s * m);
  }
  return 0.5 * (w0 * w0 + w1 * w1) + cfg.c * loss;
}

void svm_correctness(Check& c) {
  // Brute-force optimum over [-3,3]^3 at step 0.01.
  const std::vector<FeatureVector> x = {dense2(1, 1),  dense2(-1, 2),  dense2(1, -2),
                                        dense2(2, 2),  dense2(-1, -2), dense2(1, -1)};
  const std::vector<Label> y = {Label::kJob,    Label::kJob,    Label::kJob,
                                Label::kNotJob, Label::kNotJob, Label::kNotJob};
  TrainConfig cfg;
  const SvmSolution s = train_svm(x, y, cfg, 2);
  double grid = std::numeric_limits<double>::infinity();
  for (int i = -300; i <= 300; ++i) {
    for (int j = -300; j <= 300; ++j) {
      for (int k = -300; k <= 300; ++k) {
        grid = std::min(grid, objective2(x, y, cfg, i * 0.01, j * 0.01, k * 0.01));
      }
    }
  }
  const double trained = primal_objective(x, y, cfg, s.weights, s.bias);
  c.near(trained, grid, 1e-3, "primal vs grid minimum");

  // Objective trace on noisy sparse data.
  Rng rng(5);
  std::vector<double> w(25);
  for (double& v : w) v = rng.uniform() * 2 - 1;
  std::vector<FeatureVector> sx;
  std::vector<Label> sy;
  while (sx.size() < 300) {
    FeatureVector v;
    for (std::uint32_t f = 0; f < 25; ++f) {
      if (rng.bernoulli(0.4)) v.entries.push_back({f, static_cast<double>(1 + rng.below(3))});
    }
    const double m = dot(w, v) - 0.3;
    if (std::abs(m) < 0.5) continue;
    sx.push_back(v);
    sy.push_back(m > 0 ? Label::kJob : Label::kNotJob);
  }
  {
    std::vector<Label> noisy = sy;
    for (std::size_t i = 0; i < noisy.size(); i += 13) {
      noisy[i] = noisy[i] == Label::kJob ? Label::kNotJob : Label::kJob;
    }
    TrainConfig tc;
    tc.tolerance = 1e-8;
    tc.class_weight_pos = 2;
    const SvmSolution t = train_svm(sx, noisy, tc, 25);
    bool monotone = t.objective_trace.size() >= 2;
    for (std::size_t e = 1; e < t.objective_trace.size(); ++e) {
      monotone = monotone && t.objective_trace[e] <= t.objective_trace[e - 1] + 1e-9;
    }
    c.expect(monotone, "objective increased between epochs");
  }

  // Separable data.
  TrainConfig sep;
  sep.c = 10;
  const SvmSolution t = train_svm(sx, sy, sep, 25);
  std::vector<Label> pred;
  for (const auto& v : sx) pred.push_back(label_for(dot(t.weights, v) + t.bias));
  c.near(eval_report(pred, sy).positive().f1, 1.0, 0.0, "separable F1");

  // Grid search winner against an exhaustive re-evaluation.
  std::vector<FeatureVector> gx;
  std::vector<Label> gy;
  Rng g(3);
  for (int i = 0; i < 300; ++i) {
    const bool pos = i % 10 == 0;
    FeatureVector v;
    v.entries.push_back({0, pos ? 1.0 + g.uniform() : g.uniform() * 1.4});
    v.entries.push_back({1, g.uniform()});
    gx.push_back(v);
    gy.push_back(pos ? Label::kJob : Label::kNotJob);
  }
  TrainConfig base;
  base.seed = 99;
  const auto cells = default_grid();
  const CvReport r = grid_search_cv(gx, gy, 2, cells, 5, base);
  const auto folds = stratified_folds(gy, 5, base.seed);
  double best = -1;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    TrainConfig cc = base;
    cc.c = cells[i].c;
    cc.class_weight_pos = cells[i].class_weight_pos;
    cc.class_weight_neg = cells[i].class_weight_neg;
    const double f1 = cross_validate(gx, gy, 2, folds, 5, cc).mean_f1;
    c.expect(f1 == r.cells[i].mean_f1, "cell " + std::to_string(i) + " mean F1 differs");
    if (f1 > best) {
      best = f1;
      best_i = i;
    }
  }
  c.expect(r.best_index == best_i, "grid winner is not the exhaustive best");
}

// --- lexicon ---------------------------------------------------------------

std::set<std::string> read_ids(const std::string& path) {
  std::ifstream in(path);
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.insert(line);
  }
  return out;
}

void lexicon_goldens(Check& c) {
  const std::string dir = FORGE_FIXTURE_DIR;
  std::ifstream in(dir + "/lexicon_tweets.jsonl");
  std::vector<Tweet> tweets;
  std::string line;
  while (std::getline(in, line)) tweets.push_back(parse_tweet_json(line));
  c.expect(tweets.size() == 20, "fixture has " + std::to_string(tweets.size()) + " tweets");
  const auto c0 = job_likely_filter(tweets, c0_ruleset(), 5);
  const auto c4 = job_likely_filter(tweets, c4_ruleset(), 5);
  c.expect(c0 == read_ids(dir + "/c0_golden.txt"), "C0 set differs from golden");
  c.expect(c4 == read_ids(dir + "/c4_golden.txt"), "C4 set differs from golden");
  c.expect(c0.count("1001") == 1, "'at work' tweet not included");
  c.expect(c0.count("1002") == 0, "'nice job' tweet not excluded");
  c.expect(c0.count("1004") == 0, "3-token tweet passed the length gate");
  c.expect(c4.count("1016") == 0, "2-token tweet passed the C4 length gate");
}

// --- simulated run ---------------------------------------------------------

struct SimulatedRun {
  nlohmann::json report;
  double seconds = 0;
  std::string error;
};

const SimulatedRun& simulated_run() {
  static const SimulatedRun run = [] {
    SimulatedRun r;
    try {
      PipelineConfig cfg = PipelineConfig::load(FORGE_SIM_CONFIG);
      cfg.work_dir = fs::temp_directory_path() / ("forge-acceptance-" + std::to_string(::getpid()));
      fs::remove_all(cfg.work_dir);
      const auto t0 = Clock::now();
      Pipeline p(cfg);
      r.report = p.run_all();
      r.seconds = seconds_since(t0);
      if (!std::getenv("FORGE_ACCEPTANCE_KEEP")) fs::remove_all(cfg.work_dir);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    return r;
  }();
  return run;
}

void ledger_no_reuse(Check& c) {
  const SimulatedRun& run = simulated_run();
  if (!run.error.empty()) {
    c.expect(false, "run failed: " + run.error);
    return;
  }
  const auto& a = run.report.at("audit");
  c.expect(a.at("reused_tweets") == 0, "reused tweets: " + a.at("reused_tweets").dump());
  c.expect(a.at("unledgered_tweets") == 0, "unledgered: " + a.at("unledgered_tweets").dump());
  c.expect(a.at("validation_disjoint").get<bool>(), "validation samples overlap");
  c.expect(a.at("store_problems").empty(), "store audit: " + a.at("store_problems").dump());
  c.note("tweets annotated=" + a.at("tweets_used").dump());
}

double job_f1(const nlohmann::json& eval) {
  for (const auto& cls : eval.at("classes")) {
    if (cls.at("name") == "job") return cls.at("f1").get<double>();
  }
  throw Error("no job class in evaluation");
}

void end_to_end(Check& c) {
  const SimulatedRun& run = simulated_run();
  if (!run.error.empty()) {
    c.expect(false, "run failed: " + run.error);
    return;
  }
  c.expect(run.seconds < 300.0, "run took " + std::to_string(run.seconds) + " s");
  c.note("seconds=" + std::to_string(static_cast<int>(std::lround(run.seconds))));
  const auto& ev = run.report.at("evaluation");
  const double f1_first = job_f1(ev.at("c1").at("truth"));
  const double f1_final = job_f1(ev.at("c5").at("truth"));
  c.expect(f1_final >= f1_first,
           "C5 F1 " + format2(f1_final) + " below C1 F1 " + format2(f1_first));
  c.note("F1 c1=" + format2(f1_first) + " c5=" + format2(f1_final));
  for (const char* m : {"c1", "c2", "c3", "c5"}) {
    const auto& e = run.report.at("effective_recall").at(m);
    if (e.at("estimate").is_null()) {
      c.expect(false, std::string(m) + " effective recall undefined");
      continue;
    }
    const double est = e.at("estimate").get<double>();
    const double truth = e.at("true_recall").get<double>();
    c.near(est, truth, 0.10, std::string(m) + " effective vs true recall");
    c.note(std::string(m) + " R=" + format2(est) + "/" + format2(truth));
  }
}

// --- export ----------------------------------------------------------------

void export_golden(Check& c) {
  const std::string golden =
      R"({"topic_human":"NA","tweet_id":"409834886405832705","topic_machine":"job",)"
      R"("source_machine":"personal","source_human":"NA"})";
  CorpusRecord r;
  r.tweet_id = "409834886405832705";
  r.topic_machine = Label::kJob;
  r.source_machine = Source::kPersonal;
  c.expect(release_line(r) == golden, "release line: " + release_line(r));

  std::vector<CorpusRecord> records = {r};
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    CorpusRecord x;
    x.tweet_id = std::to_string(rng.next() >> 4);
    if (rng.bernoulli(0.5)) x.topic_human = rng.bernoulli(0.5) ? Label::kJob : Label::kNotJob;
    x.topic_machine = rng.bernoulli(0.5) ? Label::kJob : Label::kNotJob;
    if (rng.bernoulli(0.5)) x.source_human = rng.bernoulli(0.5) ? Source::kBusiness : Source::kPersonal;
    x.source_machine = rng.bernoulli(0.5) ? Source::kBusiness : Source::kPersonal;
    records.push_back(x);
  }
  std::stringstream out;
  export_release(records, out, true);
  std::istringstream in(out.str());
  auto back = parse_release(in);
  auto sorted = records;
  std::sort(sorted.begin(), sorted.end(),
            [](const CorpusRecord& a, const CorpusRecord& b) { return id_less(a.tweet_id, b.tweet_id); });
  c.expect(back == sorted, "export then import lost information");
  std::stringstream again;
  export_release(back, again, true);
  c.expect(again.str() == out.str(), "re-export is not byte-identical");
}

// --- accounts --------------------------------------------------------------

std::vector<std::pair<Tweet, Label>> account(int pattern, int other) {
  std::vector<std::pair<Tweet, Label>> out;
  int id = 1;
  for (int i = 0; i < pattern; ++i) {
    out.push_back({{std::to_string(id++), "Cashier wanted #hiring http://jobs.example/1", "acct"},
                   Label::kJob});
  }
  for (int i = 0; i < other; ++i) {
    out.push_back({{std::to_string(id++), "lunch with friends today", "acct"}, Label::kNotJob});
  }
  return out;
}

void account_heuristic(Check& c) {
  const Tweet panera{"1",
                     "Panera Bread: Baker - Night (#Rochester, NY) HTTP://URL #Hospitality "
                     "#VeteranJob #Job #Jobs #TweetMyJobs",
                     "panera"};
  c.expect(has_recruitment_pattern(panera), "Panera tweet does not match");
  c.expect(classify_account(account(5, 2)).kind == Source::kBusiness, "5 vs 2 not business");
  c.expect(classify_account(account(0, 4)).kind == Source::kPersonal, "0 vs 4 not personal");
  c.expect(classify_account(account(3, 3)).kind == Source::kPersonal, "3 vs 3 not personal");
}

}  // namespace
}  // namespace forge

int main() {
  using forge::Check;
  struct Criterion {
    const char* name;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"effective-recall-table", forge::effective_recall_table},
      {"agreement-oracles", forge::agreement_oracles},
      {"svm-correctness", forge::svm_correctness},
      {"lexicon-goldens", forge::lexicon_goldens},
      {"ledger-no-reuse", forge::ledger_no_reuse},
      {"end-to-end-simulation", forge::end_to_end},
      {"export-golden", forge::export_golden},
      {"account-heuristic", forge::account_heuristic},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("threw: ") + e.what());
    }
    const bool ok = c.failures().empty();
    failed += !ok;
    std::string notes;
    for (const auto& n : c.notes()) notes += (notes.empty() ? "" : ", ") + n;
    std::printf("%s %s%s%s\n", ok ? "PASS" : "FAIL", cr.name, notes.empty() ? "" : "  ",
                notes.c_str());
    for (const auto& f : c.failures()) std::printf("    %s\n", f.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
