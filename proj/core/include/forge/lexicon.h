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

// Rule-based term/phrase classifiers. A document matches a rule set when at
// least one include phrase and no exclude phrase occurs in its stem sequence.

#ifndef FORGE_LEXICON_H_
#define FORGE_LEXICON_H_

#include <istream>
#include <set>
#include <string>
#include <vector>

#include "forge/normalize.h"

namespace forge {

// A phrase is a sequence of 1-4 stems.
using Phrase = std::vector<std::string>;

struct LexiconRuleSet {
  std::string name;
  std::vector<Phrase> include;
  std::vector<Phrase> exclude;
};

struct RuleVerdict {
  bool matched = false;
  std::vector<std::string> hit_include;
  std::vector<std::string> hit_exclude;
};

// Reads the `[include]` / `[exclude]` section format. Each phrase is
// tokenized and stemmed the same way documents are. Throws ParseError for
// phrases outside a section, empty phrases after normalization, or phrases
// longer than four stems, and InvalidArgument if include is empty.
LexiconRuleSet parse_rules(std::istream& in, std::string name);
LexiconRuleSet load_rules(const std::string& path);

// Turns raw phrase text into a stemmed Phrase.
Phrase make_phrase(std::string_view text);

// Seed filter with the include/exclude lexicons.
const LexiconRuleSet& c0_ruleset();
// Signal-word lexicon used to find tweets the trained models miss.
const LexiconRuleSet& c4_ruleset();

std::string phrase_text(const Phrase& p);

// True if `phrase` occurs as a contiguous run of `stems`.
bool contains_phrase(const std::vector<std::string>& stems, const Phrase& phrase);

RuleVerdict match_rules(const NormalizedDoc& doc, const LexiconRuleSet& rules);

// Ids of tweets with at least `min_tokens` normalized tokens that match.
std::set<std::string> job_likely_filter(const std::vector<Tweet>& tweets,
                                        const LexiconRuleSet& rules, int min_tokens,
                                        const SlangDictionary& dict = SlangDictionary::builtin());

}  // namespace forge

#endif  // FORGE_LEXICON_H_
