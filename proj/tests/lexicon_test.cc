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

#include "forge/lexicon.h"

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "forge/errors.h"
#include "forge/store.h"

namespace forge {
namespace {

std::vector<Tweet> LoadFixtureTweets() {
  std::ifstream in(std::string(FORGE_FIXTURE_DIR) + "/lexicon_tweets.jsonl");
  std::vector<Tweet> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(parse_tweet_json(line));
  return out;
}

std::set<std::string> LoadGolden(const std::string& name) {
  std::ifstream in(std::string(FORGE_FIXTURE_DIR) + "/" + name);
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.insert(line);
  }
  return out;
}

RuleVerdict MatchC0(const std::string& text) {
  return match_rules(normalize_text(text, SlangDictionary::builtin()), c0_ruleset());
}

//===----------------------------------------------------------------------===//
// match_rules
//===----------------------------------------------------------------------===//

TEST(MatchRules, AtWorkIncludePhrase) {
  const RuleVerdict v = MatchC0("Really bored....., no entertainment at work today");
  EXPECT_TRUE(v.matched);
  EXPECT_EQ(v.hit_include, std::vector<std::string>{"at work"});
}

TEST(MatchRules, NiceJobExcluded) {
  const RuleVerdict v = MatchC0("nice job on your slides");
  EXPECT_FALSE(v.matched);
  EXPECT_EQ(v.hit_include, std::vector<std::string>{"job"});
  EXPECT_EQ(v.hit_exclude, std::vector<std::string>{"nice job"});
}

TEST(MatchRules, EmptyDocument) {
  const RuleVerdict v = match_rules(NormalizedDoc{}, c0_ruleset());
  EXPECT_FALSE(v.matched);
  EXPECT_TRUE(v.hit_include.empty());
}

TEST(MatchRules, VerdictInvariant) {
  for (const Tweet& t : LoadFixtureTweets()) {
    const RuleVerdict v = MatchC0(t.text);
    EXPECT_EQ(v.matched, !v.hit_include.empty() && v.hit_exclude.empty()) << t.text;
  }
}

TEST(MatchRules, PhraseMustBeContiguous) {
  EXPECT_FALSE(MatchC0("at my desk doing work all day").matched);
  EXPECT_TRUE(MatchC0("my working day was long again").matched);
}

TEST(MatchRules, SlangReachesTheRules) {
  // "mgr" expands to "manager" in the starter dictionary.
  EXPECT_TRUE(MatchC0("my mgr is out today").matched);
}

//===----------------------------------------------------------------------===//
// job_likely_filter
//===----------------------------------------------------------------------===//

TEST(JobLikelyFilter, LengthGate) {
  const std::vector<Tweet> tweets = {{"1", "work now", "a"}, {"2", "my job sucks", "a"}};
  EXPECT_TRUE(job_likely_filter(tweets, c0_ruleset(), 5).empty());
  EXPECT_EQ(job_likely_filter(tweets, c0_ruleset(), 3), std::set<std::string>{"2"});
}

TEST(JobLikelyFilter, ManagerSentence) {
  const std::vector<Tweet> tweets = {{"9", "i hate my manager at this place today", "a"}};
  EXPECT_EQ(job_likely_filter(tweets, c0_ruleset(), 5), std::set<std::string>{"9"});
}

TEST(JobLikelyFilter, C0FixtureGolden) {
  const std::set<std::string> got = job_likely_filter(LoadFixtureTweets(), c0_ruleset(), 5);
  EXPECT_EQ(got, LoadGolden("c0_golden.txt"));
  EXPECT_EQ(got.size(), 7u);
}

TEST(JobLikelyFilter, C4FixtureGolden) {
  EXPECT_EQ(job_likely_filter(LoadFixtureTweets(), c4_ruleset(), 5), LoadGolden("c4_golden.txt"));
}

//===----------------------------------------------------------------------===//
// Rule sets and parsing
//===----------------------------------------------------------------------===//

TEST(RuleSets, C4Contents) {
  const LexiconRuleSet& r = c4_ruleset();
  std::set<std::string> got;
  for (const Phrase& p : r.include) got.insert(phrase_text(p));
  std::set<std::string> want;
  for (const char* w : {"career", "hustle", "wrk", "employed", "training", "payday", "company",
                        "coworker", "agent"}) {
    want.insert(phrase_text(make_phrase(w)));
  }
  EXPECT_EQ(got, want);
  EXPECT_TRUE(r.exclude.empty());
}

TEST(RuleSets, C0ExcludesAreStemmed) {
  std::set<std::string> ex;
  for (const Phrase& p : c0_ruleset().exclude) ex.insert(phrase_text(p));
  EXPECT_TRUE(ex.count("nice job"));
  EXPECT_TRUE(ex.count(stem("finals")));
}

TEST(ParseRules, Errors) {
  std::istringstream outside("job\n[include]\nboss\n");
  EXPECT_THROW(parse_rules(outside, "x"), ParseError);
  std::istringstream too_long("[include]\na b c d e\n");
  EXPECT_THROW(parse_rules(too_long, "x"), ParseError);
  std::istringstream empty_phrase("[include]\n...\n");
  EXPECT_THROW(parse_rules(empty_phrase, "x"), ParseError);
  std::istringstream no_include("[include]\n[exclude]\nclass\n");
  EXPECT_THROW(parse_rules(no_include, "x"), InvalidArgument);
}

TEST(ParseRules, PhrasesAreStemmed) {
  std::istringstream in("# c\n[include]\nmanagers\nat work\n[exclude]\ngood jobs\n");
  const LexiconRuleSet r = parse_rules(in, "custom");
  ASSERT_EQ(r.include.size(), 2u);
  EXPECT_EQ(r.include[0], Phrase{"manager"});
  EXPECT_EQ(r.exclude[0], (Phrase{"good", "job"}));
}

}  // namespace
}  // namespace forge
