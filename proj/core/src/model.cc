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

#include "forge/model.h"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "forge/errors.h"
#include "forge/metrics.h"
#include "forge/random.h"

namespace forge {
namespace {

constexpr std::string_view kModelMagic = "forge-linear-model v1";

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_hex(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw ParseError(line, "bad number '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') throw ParseError(line, "bad integer '" + s + "'");
  return v;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms)) {
  std::sort(terms_.begin(), terms_.end());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && terms_[i] == terms_[i - 1]) throw InvalidArgument("duplicate vocabulary term");
    index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
  }
}

std::optional<std::uint32_t> Vocabulary::id(std::string_view term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocab(std::span<const NormalizedDoc> docs, int max_n, int min_df) {
  if (docs.empty()) throw InvalidArgument("cannot build a vocabulary from no documents");
  if (min_df < 1) throw InvalidArgument("min_df must be at least 1");
  std::unordered_map<std::string, int> df;
  for (const auto& doc : docs) {
    auto grams = ngrams(doc, max_n);
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    for (auto& g : grams) ++df[std::move(g)];
  }
  std::vector<std::string> terms;
  for (auto& [g, count] : df) {
    if (count >= min_df) terms.push_back(g);
  }
  return Vocabulary(std::move(terms));
}

FeatureVector vectorize(const NormalizedDoc& doc, const Vocabulary& vocab, int max_n) {
  std::map<std::uint32_t, double> counts;
  for (const auto& g : ngrams(doc, max_n)) {
    if (auto id = vocab.id(g)) counts[*id] += 1.0;
  }
  FeatureVector fv;
  fv.entries.reserve(counts.size());
  for (auto [id, c] : counts) fv.entries.push_back({id, c});
  return fv;
}

std::vector<FeatureVector> vectorize_all(std::span<const NormalizedDoc> docs,
                                         const Vocabulary& vocab, int max_n) {
  std::vector<FeatureVector> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(vectorize(d, vocab, max_n));
  return out;
}

bool LinearModel::operator==(const LinearModel& o) const {
  return vocab == o.vocab && weights == o.weights && bias == o.bias && config.c == o.config.c &&
         config.class_weight_pos == o.config.class_weight_pos &&
         config.class_weight_neg == o.config.class_weight_neg &&
         config.epochs == o.config.epochs && config.tolerance == o.config.tolerance &&
         config.seed == o.config.seed && max_n == o.max_n && min_df == o.min_df;
}

LinearModel fit(std::span<const NormalizedDoc> docs, std::span<const Label> labels,
                const TrainConfig& cfg, int max_n, int min_df) {
  if (docs.size() != labels.size()) throw InvalidArgument("document and label counts differ");
  LinearModel m;
  m.vocab = build_vocab(docs, max_n, min_df);
  m.config = cfg;
  m.max_n = max_n;
  m.min_df = min_df;
  const auto x = vectorize_all(docs, m.vocab, max_n);
  auto sol = train_svm(x, labels, cfg, m.vocab.size());
  m.weights = std::move(sol.weights);
  m.bias = sol.bias;
  return m;
}

Prediction predict(const LinearModel& model, const NormalizedDoc& doc) {
  const double conf = model.decision(vectorize(doc, model.vocab, model.max_n));
  return {label_for(conf), conf};
}

RankedPredictions decision_rank(std::vector<ScoredId> scored) {
  RankedPredictions r;
  for (auto& s : scored) {
    (label_for(s.confidence) == Label::kJob ? r.positive : r.negative).push_back(std::move(s));
  }
  auto by_strength = [](const ScoredId& a, const ScoredId& b) {
    const double fa = std::fabs(a.confidence);
    const double fb = std::fabs(b.confidence);
    if (fa != fb) return fa > fb;
    return a.tweet_id < b.tweet_id;
  };
  std::sort(r.positive.begin(), r.positive.end(), by_strength);
  std::sort(r.negative.begin(), r.negative.end(), by_strength);
  return r;
}

RankedPredictions decision_rank(const LinearModel& model, std::span<const NormalizedDoc> docs) {
  std::vector<ScoredId> scored;
  scored.reserve(docs.size());
  for (const auto& d : docs) scored.push_back({d.tweet_id, predict(model, d).confidence});
  return decision_rank(std::move(scored));
}

std::vector<GridCell> default_grid() {
  std::vector<GridCell> grid;
  for (double c : {0.1, 1.0, 10.0}) {
    for (double pos : {1.0, 2.0, 3.0, 5.0, 8.0}) grid.push_back({c, pos, 1.0});
  }
  return grid;
}

std::vector<int> stratified_folds(std::span<const Label> y, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("cross-validation needs k >= 2");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == Label::kJob ? pos : neg).push_back(i);
  if (pos.size() < static_cast<std::size_t>(k) || neg.size() < static_cast<std::size_t>(k)) {
    throw InvalidArgument("each class needs at least k = " + std::to_string(k) +
                          " samples for stratified folds (have " + std::to_string(pos.size()) +
                          " job, " + std::to_string(neg.size()) + " notjob)");
  }
  Rng rng(derive_seed(seed, "folds"));
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<int> folds(y.size(), 0);
  for (std::size_t r = 0; r < pos.size(); ++r) folds[pos[r]] = static_cast<int>(r % k);
  // Continue the deal where the positives stopped so fold sizes stay even.
  for (std::size_t r = 0; r < neg.size(); ++r) {
    folds[neg[r]] = static_cast<int>((r + pos.size()) % k);
  }
  return folds;
}

CvCell cross_validate(std::span<const FeatureVector> x, std::span<const Label> y, std::size_t dim,
                      const std::vector<int>& folds, int k, const TrainConfig& cfg) {
  CvCell out;
  out.cell = {cfg.c, cfg.class_weight_pos, cfg.class_weight_neg};
  for (int f = 0; f < k; ++f) {
    std::vector<FeatureVector> tx;
    std::vector<Label> ty, preds, refs;
    std::vector<std::size_t> held;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (folds[i] == f) {
        held.push_back(i);
      } else {
        tx.push_back(x[i]);
        ty.push_back(y[i]);
      }
    }
    const auto sol = train_svm(tx, ty, cfg, dim);
    for (std::size_t i : held) {
      preds.push_back(label_for(dot(sol.weights, x[i]) + sol.bias));
      refs.push_back(y[i]);
    }
    out.fold_f1.push_back(eval_report(preds, refs).positive().f1);
  }
  double sum = 0.0;
  for (double v : out.fold_f1) sum += v;
  out.mean_f1 = sum / static_cast<double>(k);
  return out;
}

CvReport grid_search_cv(std::span<const FeatureVector> x, std::span<const Label> y, std::size_t dim,
                        const std::vector<GridCell>& grid, int k, const TrainConfig& base) {
  if (grid.empty()) throw InvalidArgument("parameter grid is empty");
  if (x.size() != y.size()) throw InvalidArgument("feature and label counts differ");
  const auto folds = stratified_folds(y, k, base.seed);
  CvReport report;
  for (const auto& cell : grid) {
    TrainConfig cfg = base;
    cfg.c = cell.c;
    cfg.class_weight_pos = cell.class_weight_pos;
    cfg.class_weight_neg = cell.class_weight_neg;
    validate(cfg);
    report.cells.push_back(cross_validate(x, y, dim, folds, k, cfg));
    if (report.cells.back().mean_f1 > report.cells[report.best_index].mean_f1) {
      report.best_index = report.cells.size() - 1;
    }
  }
  const auto& best = grid[report.best_index];
  report.best = base;
  report.best.c = best.c;
  report.best.class_weight_pos = best.class_weight_pos;
  report.best.class_weight_neg = best.class_weight_neg;
  return report;
}

void save_model(const LinearModel& m, std::ostream& out) {
  out << kModelMagic << '\n';
  out << "c\t" << hex(m.config.c) << '\n';
  out << "class_weight_pos\t" << hex(m.config.class_weight_pos) << '\n';
  out << "class_weight_neg\t" << hex(m.config.class_weight_neg) << '\n';
  out << "epochs\t" << m.config.epochs << '\n';
  out << "tolerance\t" << hex(m.config.tolerance) << '\n';
  out << "seed\t" << m.config.seed << '\n';
  out << "max_n\t" << m.max_n << '\n';
  out << "min_df\t" << m.min_df << '\n';
  out << "bias\t" << hex(m.bias) << '\n';
  out << "terms\t" << m.vocab.size() << '\n';
  for (std::size_t i = 0; i < m.vocab.size(); ++i) {
    out << hex(m.weights[i]) << '\t' << m.vocab.term(static_cast<std::uint32_t>(i)) << '\n';
  }
}

LinearModel load_model(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  auto next = [&]() {
    if (!std::getline(in, line)) throw ParseError(n + 1, "unexpected end of model file");
    ++n;
  };
  auto field = [&](std::string_view key) {
    next();
    const auto tab = line.find('\t');
    if (tab == std::string::npos || std::string_view(line).substr(0, tab) != key) {
      throw ParseError(n, "expected field '" + std::string(key) + "'");
    }
    return line.substr(tab + 1);
  };
  next();
  if (line != kModelMagic) throw ParseError(n, "not a forge model file");
  LinearModel m;
  m.config.c = parse_hex(field("c"), n);
  m.config.class_weight_pos = parse_hex(field("class_weight_pos"), n);
  m.config.class_weight_neg = parse_hex(field("class_weight_neg"), n);
  m.config.epochs = static_cast<int>(parse_int(field("epochs"), n));
  m.config.tolerance = parse_hex(field("tolerance"), n);
  m.config.seed = std::strtoull(field("seed").c_str(), nullptr, 10);
  m.max_n = static_cast<int>(parse_int(field("max_n"), n));
  m.min_df = static_cast<int>(parse_int(field("min_df"), n));
  m.bias = parse_hex(field("bias"), n);
  const long long count = parse_int(field("terms"), n);
  if (count < 0) throw ParseError(n, "negative term count");
  std::vector<std::string> terms;
  terms.reserve(static_cast<std::size_t>(count));
  m.weights.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    next();
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(n, "expected weight<TAB>term");
    m.weights.push_back(parse_hex(line.substr(0, tab), n));
    terms.push_back(line.substr(tab + 1));
    if (i > 0 && !(terms[i - 1] < terms[i])) throw ParseError(n, "terms out of order");
  }
  m.vocab = Vocabulary(std::move(terms));
  validate(m.config);
  return m;
}

void save_model_file(const LinearModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write model file " + path);
  save_model(model, out);
}

LinearModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("model file not found: " + path);
  return load_model(in);
}

}  // namespace forge
