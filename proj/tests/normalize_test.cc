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

#include "forge/normalize.h"

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "forge/errors.h"
#include "forge/random.h"

namespace forge {
namespace {

using Tokens = std::vector<std::string>;

SlangDictionary Dict(std::initializer_list<std::pair<const char*, const char*>> entries) {
  SlangDictionary d;
  for (auto [k, v] : entries) d.add(k, v);
  return d;
}

// Random tweet-ish text over a small alphabet that exercises every rule.
std::string RandomText(Rng& rng) {
  static const std::vector<std::string> pieces = {
      "job", "Jobs", "@bob", "@", "#Work", "#", "http://x.co/a", "www.site.org/p?q=1",
      "HTTPS://A.B", "at", "work", "!!", "(", ")", ",", "...", "gr8", "u", "ur",
      "managers", "nite", "x@y", "e-mail", "what's", "HTTP://LINK", "@SOMEONE", ":)"};
  std::string out;
  const int n = static_cast<int>(rng.below(12));
  for (int i = 0; i < n; ++i) {
    if (i) out += rng.bernoulli(0.2) ? "  " : " ";
    out += pieces[rng.below(pieces.size())];
    if (rng.bernoulli(0.2)) out += pieces[rng.below(pieces.size())];
  }
  return out;
}

//===----------------------------------------------------------------------===//
// anonymize
//===----------------------------------------------------------------------===//

TEST(Anonymize, MentionAndLink) {
  EXPECT_EQ(anonymize("thanks @bob see http://x.co/ab"), "thanks @SOMEONE see HTTP://LINK");
}

TEST(Anonymize, IdentityWithoutMarkers) {
  EXPECT_EQ(anonymize("no mentions here"), "no mentions here");
}

TEST(Anonymize, AlreadyAnonymizedIsFixedPoint) {
  const std::string t = "@SOMEONE @SOMEONE shit manager shit players shit everything";
  EXPECT_EQ(anonymize(t), t);
}

TEST(Anonymize, WwwAndTrailingPunctuation) {
  EXPECT_EQ(anonymize("go to www.jobs.com/x."), "go to HTTP://LINK.");
  EXPECT_EQ(anonymize("(https://a.b/c)"), "(HTTP://LINK)");
}

TEST(Anonymize, MentionTokenReplacedWhole) {
  EXPECT_EQ(anonymize("hi @bob: bye"), "hi @SOMEONE bye");
  EXPECT_EQ(anonymize("mail x@y.com"), "mail x@y.com");
}

TEST(Anonymize, RawPlaceholderUrlStaysAUrl) {
  EXPECT_TRUE(contains_url("Baker HTTP://URL #Job"));
  EXPECT_EQ(anonymize("Baker HTTP://URL #Job"), "Baker HTTP://LINK #Job");
}

TEST(Anonymize, IdempotentAndClean) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const std::string t = RandomText(rng);
    const std::string a = anonymize(t);
    ASSERT_EQ(anonymize(a), a) << t;
    std::istringstream words(a);
    std::string w;
    while (words >> w) {
      if (w[0] == '@') {
        ASSERT_EQ(w, kMentionPlaceholder) << t;
      }
    }
    for (auto [b, e] : find_urls(a)) {
      ASSERT_EQ(a.substr(b, e - b), kLinkPlaceholder) << t;
    }
  }
}

//===----------------------------------------------------------------------===//
// tokenize
//===----------------------------------------------------------------------===//

TEST(Tokenize, BakerNightGolden) {
  EXPECT_EQ(tokenize("Baker - Night (#Rochester, NY)"),
            (Tokens{"baker", "-", "night", "(", "#rochester", ",", "ny", ")"}));
}

TEST(Tokenize, EmptyAndWhitespace) {
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize("  \t\n ").empty());
  EXPECT_EQ(tokenize("at work"), (Tokens{"at", "work"}));
}

TEST(Tokenize, KeepsHashtagsMentionsAndUrls) {
  EXPECT_EQ(tokenize("@SOMEONE loves #Jobs at HTTP://LINK!"),
            (Tokens{"@someone", "loves", "#jobs", "at", "http://link", "!"}));
}

TEST(Tokenize, LoneMarkersArePunctuation) {
  EXPECT_EQ(tokenize("# @ wow!!"), (Tokens{"#", "@", "wow", "!", "!"}));
}

TEST(Tokenize, PunctuationOnly) {
  EXPECT_TRUE(is_punctuation_only("..."));
  EXPECT_TRUE(is_punctuation_only("#"));
  EXPECT_FALSE(is_punctuation_only("#a"));
  EXPECT_FALSE(is_punctuation_only("e-mail"));
}

//===----------------------------------------------------------------------===//
// stem
//===----------------------------------------------------------------------===//

TEST(Stem, PorterStepOneVectors) {
  // Step 1a/1b/1c vectors from Porter's original algorithm description.
  const std::vector<std::pair<const char*, const char*>> cases = {
      {"caresses", "caress"}, {"ponies", "poni"},       {"caress", "caress"},
      {"cats", "cat"},        {"feed", "feed"},         {"agreed", "agree"},
      {"plastered", "plaster"}, {"bled", "bled"},       {"motoring", "motor"},
      {"sing", "sing"},       {"conflated", "conflate"}, {"troubled", "trouble"},
      {"sized", "size"},      {"hopping", "hop"},       {"tanned", "tan"},
      {"falling", "fall"},    {"hissing", "hiss"},      {"fizzed", "fizz"},
      {"failing", "fail"},    {"filing", "file"},       {"happy", "happi"},
      {"sky", "sky"}};
  for (auto [in, out] : cases) EXPECT_EQ(stem(in), out) << in;
}

TEST(Stem, ShortWordsAndMarkersPassThrough) {
  EXPECT_EQ(stem("is"), "is");
  EXPECT_EQ(stem("was"), "was");
  EXPECT_EQ(stem("#jobs"), "#jobs");
  EXPECT_EQ(stem("@someone"), "@someone");
  EXPECT_EQ(stem("http://link"), "http://link");
}

TEST(Stem, Managers) { EXPECT_EQ(stem("managers"), "manager"); }

//===----------------------------------------------------------------------===//
// normalize
//===----------------------------------------------------------------------===//

TEST(Normalize, SlangExpansionLeavesSignalWords) {
  const SlangDictionary d = Dict({{"gr8", "great"}});
  const NormalizedDoc doc = normalize_text("Wrk was gr8!!", d);
  EXPECT_EQ(doc.tokens, (Tokens{"wrk", "was", "great"}));
}

TEST(Normalize, CaseFolding) {
  EXPECT_EQ(normalize_text("JOB Job job", SlangDictionary()).stems,
            (Tokens{"job", "job", "job"}));
}

TEST(Normalize, Stems) {
  EXPECT_EQ(normalize_text("managers", SlangDictionary()).stems, (Tokens{"manager"}));
}

TEST(Normalize, MultiWordSlangExpandsToSeveralTokens) {
  const SlangDictionary d = Dict({{"idk", "i do not know"}});
  EXPECT_EQ(normalize_text("idk lol", d).tokens, (Tokens{"i", "do", "not", "know", "lol"}));
}

TEST(Normalize, BuiltinDictionaryParsesAndIsConsistent) {
  const SlangDictionary& d = SlangDictionary::builtin();
  EXPECT_GE(d.size(), 90u);
  // An expansion never contains a key, so expansion is a one-pass fixed point.
  for (const auto& [k, v] : d.entries()) {
    for (const auto& t : tokenize(v)) EXPECT_FALSE(d.find(t).has_value()) << k << " -> " << v;
  }
}

TEST(Normalize, Invariants) {
  Rng rng(5);
  const SlangDictionary& d = SlangDictionary::builtin();
  for (int i = 0; i < 2000; ++i) {
    const std::string t = RandomText(rng);
    const NormalizedDoc a = normalize_text(t, d, "1");
    ASSERT_EQ(a, normalize_text(t, d, "1"));
    ASSERT_EQ(a.tokens.size(), a.stems.size());
    for (const auto& tok : a.tokens) {
      ASSERT_FALSE(is_punctuation_only(tok)) << t;
      for (char c : tok) ASSERT_FALSE(std::isupper(static_cast<unsigned char>(c))) << t;
    }
    // Re-normalizing the detokenized output changes nothing.
    const NormalizedDoc b = normalize_text(detokenize(a), d, "1");
    ASSERT_EQ(a.tokens, b.tokens) << t;
    ASSERT_EQ(a.stems, b.stems) << t;
  }
}

TEST(SlangDictionaryParse, CommentsBlankLinesAndErrors) {
  std::istringstream ok("# comment\n\nU\tyou\ngr8\tgreat\n");
  const SlangDictionary d = SlangDictionary::parse(ok);
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(d.find("u").value(), "you");
  std::istringstream bad("u you\n");
  EXPECT_THROW(SlangDictionary::parse(bad), ParseError);
}

//===----------------------------------------------------------------------===//
// ngrams
//===----------------------------------------------------------------------===//

TEST(Ngrams, Definition) {
  EXPECT_EQ(ngrams(Tokens{"a", "b", "c"}, 2), (Tokens{"a", "a b", "b", "b c", "c"}));
  EXPECT_EQ(ngrams(Tokens{"x"}, 3), (Tokens{"x"}));
  EXPECT_EQ(ngrams(Tokens{"my", "boss"}, 3), (Tokens{"my", "my boss", "boss"}));
}

TEST(Ngrams, RejectsOutOfRange) {
  EXPECT_THROW(ngrams(Tokens{"a"}, 0), InvalidArgument);
  EXPECT_THROW(ngrams(Tokens{"a"}, 4), InvalidArgument);
}

TEST(Ngrams, CountFormula) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    Tokens stems(rng.below(9), "w");
    for (int n = 1; n <= 3; ++n) {
      std::size_t expected = 0;
      for (int k = 1; k <= n; ++k) {
        if (stems.size() >= static_cast<std::size_t>(k)) expected += stems.size() - k + 1;
      }
      ASSERT_EQ(ngrams(stems, n).size(), expected);
    }
  }
}

}  // namespace
}  // namespace forge
