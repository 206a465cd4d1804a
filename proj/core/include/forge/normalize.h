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

// Tweet text handling shared by every other module: anonymization,
// Twitter-aware tokenization, slang expansion, suffix stemming and n-grams.
//
// All functions are pure. A SlangDictionary is immutable after loading and
// may be shared across threads.

#ifndef FORGE_NORMALIZE_H_
#define FORGE_NORMALIZE_H_

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  bool operator==(const GeoPoint&) const = default;
};

struct Tweet {
  std::string tweet_id;
  std::string text;
  std::string account_id;
  std::optional<std::string> created_at;
  std::optional<GeoPoint> geo;
  bool operator==(const Tweet&) const = default;
};

inline constexpr std::string_view kMentionPlaceholder = "@SOMEONE";
inline constexpr std::string_view kLinkPlaceholder = "HTTP://LINK";

class SlangDictionary {
 public:
  SlangDictionary() = default;

  // Parses `slang<TAB>expansion` lines; `#` lines and blank lines are
  // skipped. Keys are lowercased. Throws ParseError on a line without a tab.
  static SlangDictionary parse(std::istream& in);
  static SlangDictionary load(const std::string& path);
  // The starter dictionary compiled into the library.
  static const SlangDictionary& builtin();

  void add(std::string_view slang, std::string_view expansion);

  // Expansion of a whole phrase (tokens joined by one space), if any.
  std::optional<std::string_view> find(std::string_view phrase) const;

  std::size_t size() const { return entries_.size(); }
  std::size_t max_phrase_tokens() const { return max_phrase_tokens_; }
  // Normalized phrase -> expansion text, as loaded.
  const std::map<std::string, std::string, std::less<>>& entries() const {
    return raw_;
  }
  // Tokenized expansion of a phrase, or nullptr.
  const std::vector<std::string>* expansion_tokens(std::string_view phrase) const;

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
  std::map<std::string, std::string, std::less<>> raw_;
  std::size_t max_phrase_tokens_ = 0;
};

struct NormalizedDoc {
  std::string tweet_id;
  std::vector<std::string> tokens;
  std::vector<std::string> stems;
  bool operator==(const NormalizedDoc&) const = default;
};

// Replaces every whitespace-delimited token that begins with '@' by
// "@SOMEONE" and every URL by "HTTP://LINK". A URL starts with http://,
// https:// or www. (case-insensitive) at a position not preceded by a letter
// or digit, runs to the next whitespace and excludes trailing sentence
// punctuation.
std::string anonymize(std::string_view text);

// True if `text` contains at least one URL under the rule above.
bool contains_url(std::string_view text);
// Byte ranges [begin, end) of every URL in `text`.
std::vector<std::pair<std::size_t, std::size_t>> find_urls(std::string_view text);

// Lowercases ASCII, splits on whitespace, peels leading and trailing ASCII
// punctuation into single-character tokens. '#' and '@' stay attached when
// followed by a word character; URLs stay whole.
std::vector<std::string> tokenize(std::string_view text);

bool is_punctuation_only(std::string_view token);

// Porter step-1 suffix stripping (plurals, -ed, -ing, terminal y). Words of
// three or fewer characters, hashtags, mentions and URLs pass through.
std::string stem(std::string_view word);

// lowercase -> tokenize -> drop punctuation-only -> expand slang -> stem.
NormalizedDoc normalize(const Tweet& tweet, const SlangDictionary& dict);
NormalizedDoc normalize_text(std::string_view text, const SlangDictionary& dict,
                             std::string tweet_id = {});

// Tokens joined by single spaces.
std::string detokenize(const NormalizedDoc& doc);

// Every contiguous 1..max_n gram over stems, joined by one space, in order of
// (start position, length). Throws InvalidArgument unless 1 <= max_n <= 3.
std::vector<std::string> ngrams(const std::vector<std::string>& stems, int max_n);
inline std::vector<std::string> ngrams(const NormalizedDoc& doc, int max_n) {
  return ngrams(doc.stems, max_n);
}

}  // namespace forge

#endif  // FORGE_NORMALIZE_H_
