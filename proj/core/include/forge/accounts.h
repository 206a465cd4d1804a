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

// Recruitment-post detection ("hashtags + URL") and the personal/business
// account heuristic built on it.

#ifndef FORGE_ACCOUNTS_H_
#define FORGE_ACCOUNTS_H_

#include <istream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "forge/labels.h"
#include "forge/normalize.h"

namespace forge {

struct RecruitmentPattern {
  std::vector<std::string> hashtags;  // lowercase, with '#', in file order
  bool requires_url = true;

  // One hashtag per line; lines starting with "# " or a lone "#" are
  // comments. Throws ParseError for entries that are not a single #word.
  static RecruitmentPattern parse(std::istream& in);
  static RecruitmentPattern load(const std::string& path);
  static const RecruitmentPattern& builtin();

  bool listed(std::string_view lowercase_tag) const;
};

// Lowercased hashtags (#word, word = letters, digits, '_' or non-ASCII) in
// order of appearance.
std::vector<std::string> extract_hashtags(std::string_view text);

// Raw text contains a listed hashtag and, if required, a URL.
bool has_recruitment_pattern(const Tweet& tweet,
                             const RecruitmentPattern& pattern = RecruitmentPattern::builtin());

struct AccountProfile {
  std::string account_id;
  std::size_t n_pattern_job = 0;  // job tweets matching the pattern
  std::size_t n_other = 0;        // every other tweet of the account
  Source kind = Source::kPersonal;
};

// business iff n_pattern_job > n_other. Throws InvalidArgument for an empty
// list or mixed account ids.
AccountProfile classify_account(const std::vector<std::pair<Tweet, Label>>& account_tweets,
                                const RecruitmentPattern& pattern = RecruitmentPattern::builtin());

// Groups by account and classifies each; keyed by account_id.
std::map<std::string, AccountProfile> classify_accounts(
    const std::vector<std::pair<Tweet, Label>>& tweets,
    const RecruitmentPattern& pattern = RecruitmentPattern::builtin());

struct CensusRow {
  std::string hashtag;
  std::size_t with_hashtag = 0;
  std::size_t with_hashtag_and_url = 0;
  double percent = 0.0;  // 100 * with_url / with_hashtag, 0 when no tweet has the tag
};

// One row per listed hashtag, in pattern order.
std::vector<CensusRow> hashtag_census(const std::vector<Tweet>& corpus,
                                      const RecruitmentPattern& pattern = RecruitmentPattern::builtin());

}  // namespace forge

#endif  // FORGE_ACCOUNTS_H_
