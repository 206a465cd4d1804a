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

// Inter-annotator reliability: Fleiss' kappa, Krippendorff's alpha (nominal)
// and Cohen's kappa, plus per-round summaries. A statistic whose expected
// disagreement is zero throws UndefinedStatistic.

#ifndef FORGE_AGREEMENT_H_
#define FORGE_AGREEMENT_H_

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

namespace forge {

// Items x categories count table; every row sums to the same rater count.
class RatingMatrix {
 public:
  // Throws InvalidArgument if rows are empty, ragged, or sum unequally or
  // below two raters.
  explicit RatingMatrix(std::vector<std::vector<int>> counts);

  // Binary Y/N helper: one (y, n) pair per item.
  static RatingMatrix from_yes_no(const std::vector<std::pair<int, int>>& votes);

  std::size_t items() const { return counts_.size(); }
  std::size_t categories() const { return counts_.front().size(); }
  int raters() const { return raters_; }
  const std::vector<std::vector<int>>& counts() const { return counts_; }

 private:
  std::vector<std::vector<int>> counts_;
  int raters_ = 0;
};

double fleiss_kappa(const RatingMatrix& m);

// Each unit lists the category codes it received; missing ratings are simply
// absent. Units with fewer than two values are not pairable and are ignored.
double krippendorff_alpha_nominal(const std::vector<std::vector<int>>& units);
double krippendorff_alpha_nominal(const RatingMatrix& m);

// Two raters over the same items, category codes compared for equality.
double cohen_kappa(const std::vector<int>& a, const std::vector<int>& b);

enum class AgreementStatistic { kFleissKappa, kKrippendorffAlpha, kCohenKappa };
enum class AgreementBand { kPoor, kFair, kModerate, kGood, kVeryGood };

std::string_view statistic_name(AgreementStatistic s);
std::string_view band_name(AgreementBand b);
AgreementBand altman_band(double value);

struct AgreementReport {
  AgreementStatistic statistic = AgreementStatistic::kFleissKappa;
  std::vector<double> per_hit_values;
  double mean = 0.0;
  double stdev = 0.0;  // population
  AgreementBand band = AgreementBand::kPoor;
  std::size_t undefined_hits = 0;
};

// Statistic per HIT, then mean, population stdev and band. HITs whose
// statistic is undefined are skipped and counted; if all are, throws
// UndefinedStatistic. Cohen's kappa is not a per-HIT multi-rater statistic
// and is rejected with InvalidArgument.
AgreementReport round_summary(const std::vector<RatingMatrix>& hits,
                              AgreementStatistic statistic = AgreementStatistic::kFleissKappa);

}  // namespace forge

#endif  // FORGE_AGREEMENT_H_
