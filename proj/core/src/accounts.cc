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

#include "forge/accounts.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "builtin_data.h"
#include "forge/errors.h"

namespace forge {
namespace {

bool tag_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c >= 0x80;
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

RecruitmentPattern RecruitmentPattern::parse(std::istream& in) {
  RecruitmentPattern p;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty() || t == "#" || t.rfind("# ", 0) == 0) continue;
    const auto tags = extract_hashtags(t);
    if (tags.size() != 1 || tags[0].size() != t.size()) {
      throw ParseError(n, "expected a single hashtag, got '" + t + "'");
    }
    if (!p.listed(tags[0])) p.hashtags.push_back(tags[0]);
  }
  if (p.hashtags.empty()) throw InvalidArgument("recruitment pattern lists no hashtags");
  return p;
}

RecruitmentPattern RecruitmentPattern::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("hashtag file not found: " + path);
  return parse(in);
}

const RecruitmentPattern& RecruitmentPattern::builtin() {
  static const RecruitmentPattern p = [] {
    std::istringstream in{std::string(builtin::kHashtags)};
    return parse(in);
  }();
  return p;
}

bool RecruitmentPattern::listed(std::string_view tag) const {
  return std::find(hashtags.begin(), hashtags.end(), tag) != hashtags.end();
}

std::vector<std::string> extract_hashtags(std::string_view text) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '#') continue;
    // "a#b" is not a hashtag.
    if (i > 0 && tag_byte(static_cast<unsigned char>(text[i - 1]))) continue;
    std::size_t j = i + 1;
    while (j < text.size() && tag_byte(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i + 1) continue;
    std::string tag(text.substr(i, j - i));
    std::transform(tag.begin(), tag.end(), tag.begin(), lower);
    out.push_back(std::move(tag));
    i = j - 1;
  }
  return out;
}

bool has_recruitment_pattern(const Tweet& tweet, const RecruitmentPattern& pattern) {
  bool tagged = false;
  for (const auto& tag : extract_hashtags(tweet.text)) {
    if (pattern.listed(tag)) {
      tagged = true;
      break;
    }
  }
  return tagged && (!pattern.requires_url || contains_url(tweet.text));
}

AccountProfile classify_account(const std::vector<std::pair<Tweet, Label>>& account_tweets,
                                const RecruitmentPattern& pattern) {
  if (account_tweets.empty()) throw InvalidArgument("account has no tweets");
  AccountProfile p;
  p.account_id = account_tweets.front().first.account_id;
  for (const auto& [tweet, label] : account_tweets) {
    if (tweet.account_id != p.account_id) {
      throw InvalidArgument("tweets belong to more than one account");
    }
    if (label == Label::kJob && has_recruitment_pattern(tweet, pattern)) {
      ++p.n_pattern_job;
    } else {
      ++p.n_other;
    }
  }
  p.kind = p.n_pattern_job > p.n_other ? Source::kBusiness : Source::kPersonal;
  return p;
}

std::map<std::string, AccountProfile> classify_accounts(
    const std::vector<std::pair<Tweet, Label>>& tweets, const RecruitmentPattern& pattern) {
  std::map<std::string, std::vector<std::pair<Tweet, Label>>> groups;
  for (const auto& tl : tweets) groups[tl.first.account_id].push_back(tl);
  std::map<std::string, AccountProfile> out;
  for (const auto& [account, list] : groups) out[account] = classify_account(list, pattern);
  return out;
}

std::vector<CensusRow> hashtag_census(const std::vector<Tweet>& corpus,
                                      const RecruitmentPattern& pattern) {
  std::vector<CensusRow> rows;
  std::map<std::string, std::size_t> slot;
  for (const auto& tag : pattern.hashtags) {
    slot[tag] = rows.size();
    rows.push_back({tag, 0, 0, 0.0});
  }
  for (const auto& t : corpus) {
    auto tags = extract_hashtags(t.text);
    std::sort(tags.begin(), tags.end());
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    const bool url = contains_url(t.text);
    for (const auto& tag : tags) {
      auto it = slot.find(tag);
      if (it == slot.end()) continue;
      auto& r = rows[it->second];
      ++r.with_hashtag;
      if (url) ++r.with_hashtag_and_url;
    }
  }
  for (auto& r : rows) {
    if (r.with_hashtag > 0) {
      r.percent = 100.0 * static_cast<double>(r.with_hashtag_and_url) /
                  static_cast<double>(r.with_hashtag);
    }
  }
  return rows;
}

}  // namespace forge
