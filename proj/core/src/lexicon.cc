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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "builtin_data.h"
#include "forge/errors.h"

namespace forge {
namespace {

constexpr std::size_t kMaxPhraseStems = 4;

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

LexiconRuleSet parse_builtin(std::string_view text, std::string name) {
  std::istringstream in{std::string(text)};
  return parse_rules(in, std::move(name));
}

}  // namespace

Phrase make_phrase(std::string_view text) {
  // No slang expansion: rule phrases are written in standard form, and "wrk"
  // must stay a literal signal word.
  static const SlangDictionary kEmpty;
  return normalize_text(text, kEmpty).stems;
}

std::string phrase_text(const Phrase& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += p[i];
  }
  return out;
}

LexiconRuleSet parse_rules(std::istream& in, std::string name) {
  LexiconRuleSet rules;
  rules.name = std::move(name);
  std::vector<Phrase>* section = nullptr;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t == "[include]") {
      section = &rules.include;
      continue;
    }
    if (t == "[exclude]") {
      section = &rules.exclude;
      continue;
    }
    if (section == nullptr) throw ParseError(line_no, "phrase outside [include]/[exclude]");
    Phrase p = make_phrase(t);
    if (p.empty()) throw ParseError(line_no, "phrase '" + t + "' is empty after normalization");
    if (p.size() > kMaxPhraseStems) {
      throw ParseError(line_no, "phrase '" + t + "' has more than 4 stems");
    }
    if (std::find(section->begin(), section->end(), p) == section->end()) {
      section->push_back(std::move(p));
    }
  }
  if (rules.include.empty()) {
    throw InvalidArgument("rule set '" + rules.name + "' has no include phrases");
  }
  return rules;
}

LexiconRuleSet load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open rule file '" + path + "'");
  return parse_rules(in, std::filesystem::path(path).stem().string());
}

const LexiconRuleSet& c0_ruleset() {
  static const LexiconRuleSet rules = parse_builtin(builtin::kC0Rules, "c0");
  return rules;
}

const LexiconRuleSet& c4_ruleset() {
  static const LexiconRuleSet rules = parse_builtin(builtin::kC4Rules, "c4");
  return rules;
}

bool contains_phrase(const std::vector<std::string>& stems, const Phrase& phrase) {
  if (phrase.empty() || phrase.size() > stems.size()) return false;
  return std::search(stems.begin(), stems.end(), phrase.begin(), phrase.end()) != stems.end();
}

RuleVerdict match_rules(const NormalizedDoc& doc, const LexiconRuleSet& rules) {
  RuleVerdict v;
  for (const auto& p : rules.include) {
    if (contains_phrase(doc.stems, p)) v.hit_include.push_back(phrase_text(p));
  }
  for (const auto& p : rules.exclude) {
    if (contains_phrase(doc.stems, p)) v.hit_exclude.push_back(phrase_text(p));
  }
  v.matched = !v.hit_include.empty() && v.hit_exclude.empty();
  return v;
}

std::set<std::string> job_likely_filter(const std::vector<Tweet>& tweets,
                                        const LexiconRuleSet& rules, int min_tokens,
                                        const SlangDictionary& dict) {
  if (min_tokens < 1) throw InvalidArgument("min_tokens must be >= 1");
  std::set<std::string> out;
  for (const auto& t : tweets) {
    NormalizedDoc doc = normalize(t, dict);
    if (doc.tokens.size() < static_cast<std::size_t>(min_tokens)) continue;
    if (match_rules(doc, rules).matched) out.insert(t.tweet_id);
  }
  return out;
}

}  // namespace forge
