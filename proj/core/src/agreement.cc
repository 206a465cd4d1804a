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

#include "forge/agreement.h"

#include <cmath>
#include <map>
#include <numeric>

#include "forge/errors.h"

namespace forge {
namespace {

// Expected agreement this close to 1 leaves no room for a ratio.
constexpr double kDegenerate = 1e-15;

}  // namespace

RatingMatrix::RatingMatrix(std::vector<std::vector<int>> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw InvalidArgument("rating matrix needs at least one item");
  const std::size_t k = counts_.front().size();
  if (k < 1) throw InvalidArgument("rating matrix needs at least one category");
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    const auto& row = counts_[i];
    if (row.size() != k) throw InvalidArgument("rating matrix rows differ in width");
    int sum = 0;
    for (int c : row) {
      if (c < 0) throw InvalidArgument("negative rating count");
      sum += c;
    }
    if (i == 0) raters_ = sum;
    if (sum != raters_) throw InvalidArgument("rating matrix rows sum to different rater counts");
  }
  if (raters_ < 2) throw InvalidArgument("rating matrix needs at least two raters per item");
}

RatingMatrix RatingMatrix::from_yes_no(const std::vector<std::pair<int, int>>& votes) {
  std::vector<std::vector<int>> rows;
  rows.reserve(votes.size());
  for (auto [y, n] : votes) rows.push_back({y, n});
  return RatingMatrix(std::move(rows));
}

double fleiss_kappa(const RatingMatrix& m) {
  const double items = static_cast<double>(m.items());
  const double n = m.raters();
  std::vector<double> column(m.categories(), 0.0);
  double p_bar = 0.0;
  for (const auto& row : m.counts()) {
    double sq = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      sq += static_cast<double>(row[j]) * row[j];
      column[j] += row[j];
    }
    p_bar += (sq - n) / (n * (n - 1.0));
  }
  p_bar /= items;
  double p_e = 0.0;
  for (double c : column) {
    const double p = c / (items * n);
    p_e += p * p;
  }
  if (1.0 - p_e <= kDegenerate) {
    throw UndefinedStatistic("Fleiss' kappa undefined: all ratings fall in one category");
  }
  return (p_bar - p_e) / (1.0 - p_e);
}

double krippendorff_alpha_nominal(const std::vector<std::vector<int>>& units) {
  // Coincidence matrix formulation; only totals are needed for nominal data:
  //   alpha = 1 - (n - 1) * sum_{c != k} o_ck / sum_{c != k} n_c n_k.
  std::map<int, double> marginal;
  double disagreeing_pairs = 0.0;
  double n = 0.0;
  for (const auto& unit : units) {
    const std::size_t m = unit.size();
    if (m < 2) continue;
    std::map<int, int> counts;
    for (int v : unit) ++counts[v];
    double mismatched = 0.0;  // ordered pairs of differing values in this unit
    for (const auto& [c, nc] : counts) {
      mismatched += static_cast<double>(nc) * static_cast<double>(m - nc);
      marginal[c] += nc;
    }
    disagreeing_pairs += mismatched / static_cast<double>(m - 1);
    n += static_cast<double>(m);
  }
  if (n < 2) throw InvalidArgument("Krippendorff's alpha needs at least two pairable values");
  double expected = 0.0;
  for (const auto& [c, nc] : marginal) expected += nc * (n - nc);
  if (expected == 0.0) {
    throw UndefinedStatistic("Krippendorff's alpha undefined: no expected disagreement");
  }
  return 1.0 - (n - 1.0) * disagreeing_pairs / expected;
}

double krippendorff_alpha_nominal(const RatingMatrix& m) {
  std::vector<std::vector<int>> units;
  units.reserve(m.items());
  for (const auto& row : m.counts()) {
    std::vector<int> unit;
    for (std::size_t j = 0; j < row.size(); ++j) unit.insert(unit.end(), row[j], static_cast<int>(j));
    units.push_back(std::move(unit));
  }
  return krippendorff_alpha_nominal(units);
}

double cohen_kappa(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw InvalidArgument("Cohen's kappa: rating lists differ in length");
  if (a.empty()) throw InvalidArgument("Cohen's kappa needs at least one item");
  const double n = static_cast<double>(a.size());
  std::map<int, double> ma, mb;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma[a[i]] += 1.0;
    mb[b[i]] += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  double p_e = 0.0;
  for (const auto& [c, count] : ma) {
    auto it = mb.find(c);
    if (it != mb.end()) p_e += (count / n) * (it->second / n);
  }
  if (1.0 - p_e <= kDegenerate) {
    throw UndefinedStatistic("Cohen's kappa undefined: chance agreement is 1");
  }
  return (agree / n - p_e) / (1.0 - p_e);
}

std::string_view statistic_name(AgreementStatistic s) {
  switch (s) {
    case AgreementStatistic::kFleissKappa: return "fleiss";
    case AgreementStatistic::kKrippendorffAlpha: return "alpha";
    case AgreementStatistic::kCohenKappa: return "cohen";
  }
  return "unknown";
}

std::string_view band_name(AgreementBand b) {
  switch (b) {
    case AgreementBand::kPoor: return "Poor";
    case AgreementBand::kFair: return "Fair";
    case AgreementBand::kModerate: return "Moderate";
    case AgreementBand::kGood: return "Good";
    case AgreementBand::kVeryGood: return "VeryGood";
  }
  return "unknown";
}

AgreementBand altman_band(double v) {
  if (v < 0.2) return AgreementBand::kPoor;
  if (v < 0.4) return AgreementBand::kFair;
  if (v < 0.6) return AgreementBand::kModerate;
  if (v < 0.8) return AgreementBand::kGood;
  return AgreementBand::kVeryGood;
}

AgreementReport round_summary(const std::vector<RatingMatrix>& hits,
                              AgreementStatistic statistic) {
  if (statistic == AgreementStatistic::kCohenKappa) {
    throw InvalidArgument("round summaries use Fleiss' kappa or Krippendorff's alpha");
  }
  AgreementReport r;
  r.statistic = statistic;
  for (const auto& m : hits) {
    try {
      r.per_hit_values.push_back(statistic == AgreementStatistic::kFleissKappa
                                     ? fleiss_kappa(m)
                                     : krippendorff_alpha_nominal(m));
    } catch (const UndefinedStatistic&) {
      ++r.undefined_hits;
    }
  }
  if (r.per_hit_values.empty()) {
    throw UndefinedStatistic("no HIT in the round has a defined agreement statistic");
  }
  const double k = static_cast<double>(r.per_hit_values.size());
  r.mean = std::accumulate(r.per_hit_values.begin(), r.per_hit_values.end(), 0.0) / k;
  double ss = 0.0;
  for (double v : r.per_hit_values) ss += (v - r.mean) * (v - r.mean);
  r.stdev = std::sqrt(ss / k);
  r.band = altman_band(r.mean);
  return r;
}

}  // namespace forge
