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

#include "forge/metrics.h"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "forge/errors.h"

namespace forge {
namespace {

double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ClassMetrics class_metrics(std::string name, std::int64_t tp, std::int64_t fp,
                           std::int64_t fn) {
  ClassMetrics m;
  m.name = std::move(name);
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f1 = (m.precision + m.recall) > 0
             ? 2 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  m.support = tp + fn;
  return m;
}

template <typename Seq, typename IsPositive>
EvalReport eval_generic(const Seq& preds, const Seq& refs, IsPositive pos,
                        const std::string& positive_name, const std::string& negative_name) {
  if (preds.size() != refs.size()) {
    throw InvalidArgument("prediction and reference lists differ in length");
  }
  if (preds.empty()) throw InvalidArgument("cannot evaluate an empty prediction list");
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = pos(preds[i]);
    const bool r = pos(refs[i]);
    if (p && r) ++tp;
    else if (p) ++fp;
    else if (r) ++fn;
    else ++tn;
  }
  EvalReport out;
  out.classes.push_back(class_metrics(positive_name, tp, fp, fn));
  out.classes.push_back(class_metrics(negative_name, tn, fn, fp));
  const double total = static_cast<double>(preds.size());
  out.weighted.name = "avg / total";
  for (const auto& c : out.classes) {
    const double w = static_cast<double>(c.support) / total;
    out.weighted.precision += w * c.precision;
    out.weighted.recall += w * c.recall;
    out.weighted.f1 += w * c.f1;
    out.weighted.support += c.support;
  }
  return out;
}

}  // namespace

EvalReport eval_binary(const std::vector<bool>& preds, const std::vector<bool>& refs,
                       const std::string& positive_name, const std::string& negative_name) {
  return eval_generic(preds, refs, [](bool b) { return b; }, positive_name, negative_name);
}

EvalReport eval_report(std::span<const Label> preds, std::span<const Label> refs) {
  return eval_generic(preds, refs, [](Label l) { return l == Label::kJob; }, "job", "notjob");
}

EvalReport eval_sources(std::span<const Source> preds, std::span<const Source> refs) {
  return eval_generic(preds, refs, [](Source s) { return s == Source::kBusiness; },
                      "business", "personal");
}

std::string format2(double v) {
  // The epsilon absorbs binary representation error (0.125 -> "0.13").
  double r = std::floor(std::fabs(v) * 100.0 + 0.5 + 1e-9) / 100.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%.2f", (v < 0 && r > 0) ? "-" : "", r);
  return buf;
}

std::string format_report(const EvalReport& r, const std::string& title) {
  std::ostringstream os;
  if (!title.empty()) os << title << "\n";
  char line[128];
  std::snprintf(line, sizeof line, "%-12s %6s %6s %6s %8s\n", "class", "P", "R", "F1",
                "support");
  os << line;
  auto row = [&](const ClassMetrics& c) {
    std::snprintf(line, sizeof line, "%-12s %6s %6s %6s %8lld\n", c.name.c_str(),
                  format2(c.precision).c_str(), format2(c.recall).c_str(),
                  format2(c.f1).c_str(), static_cast<long long>(c.support));
    os << line;
  };
  for (const auto& c : r.classes) row(c);
  row(r.weighted);
  return os.str();
}

double effective_recall(const EffectiveRecallInputs& in) {
  if (in.corpus_job < 0 || in.corpus_notjob < 0 || in.test_job < 0 || in.test_notjob < 0) {
    throw InvalidArgument("effective recall counts must be non-negative");
  }
  if (in.test_recall < 0 || in.test_recall > 1) {
    throw InvalidArgument("test recall must lie in [0,1]");
  }
  const double hit = in.corpus_job * in.test_notjob * in.test_recall;
  const double miss = in.corpus_notjob * in.test_job * (1.0 - in.test_recall);
  if (hit + miss == 0) throw UndefinedStatistic("effective recall denominator is zero");
  return hit / (hit + miss);
}

}  // namespace forge
