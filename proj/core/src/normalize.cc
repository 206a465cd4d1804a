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

#include <algorithm>
#include <fstream>
#include <sstream>

#include "builtin_data.h"
#include "forge/errors.h"

namespace forge {
namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_alnum(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_ascii_punct(unsigned char c) {
  return c >= 0x21 && c <= 0x7e && !is_ascii_alnum(c);
}

// Word characters for hashtag/mention attachment. Non-ASCII bytes count so
// that "#café" stays one token.
bool is_word_byte(unsigned char c) {
  return is_ascii_alnum(c) || c == '_' || c >= 0x80;
}

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
  return out;
}

bool starts_with_icase(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (s.size() - pos < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (ascii_lower(s[pos + i]) != prefix[i]) return false;
  }
  return true;
}

std::size_t url_prefix_length(std::string_view s, std::size_t pos) {
  if (pos > 0 && is_ascii_alnum(static_cast<unsigned char>(s[pos - 1]))) return 0;
  for (std::string_view p : {std::string_view("http://"), std::string_view("https://"),
                             std::string_view("www.")}) {
    if (starts_with_icase(s, pos, p)) return p.size();
  }
  return 0;
}

// Sentence punctuation that is not considered part of a trailing URL.
bool is_url_trailer(unsigned char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case ')': case ']': case '}': case '"': case '\'':
      return true;
    default:
      return false;
  }
}

std::string join(const std::vector<std::string>& parts, std::size_t from, std::size_t count) {
  std::string out;
  for (std::size_t i = from; i < from + count; ++i) {
    if (i > from) out.push_back(' ');
    out += parts[i];
  }
  return out;
}

std::vector<std::string> content_tokens(std::string_view text) {
  std::vector<std::string> tokens = tokenize(text);
  std::erase_if(tokens, [](const std::string& t) { return is_punctuation_only(t); });
  return tokens;
}

// --- Porter step 1 ---------------------------------------------------------

bool is_consonant(const std::string& w, std::size_t i) {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
      return false;
    case 'y':
      return i == 0 ? true : !is_consonant(w, i - 1);
    default:
      return true;
  }
}

// Porter's m: number of VC sequences in w[0, len).
int measure(const std::string& w, std::size_t len) {
  int m = 0;
  std::size_t i = 0;
  while (i < len && is_consonant(w, i)) ++i;
  while (i < len) {
    while (i < len && !is_consonant(w, i)) ++i;
    if (i >= len) break;
    while (i < len && is_consonant(w, i)) ++i;
    ++m;
  }
  return m;
}

bool has_vowel(const std::string& w, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) {
    if (!is_consonant(w, i)) return true;
  }
  return false;
}

bool ends_double_consonant(const std::string& w) {
  std::size_t n = w.size();
  return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
}

// consonant-vowel-consonant ending, last consonant not w, x or y.
bool ends_cvc(const std::string& w) {
  std::size_t n = w.size();
  if (n < 3) return false;
  if (!is_consonant(w, n - 1) || is_consonant(w, n - 2) || !is_consonant(w, n - 3)) {
    return false;
  }
  char c = w[n - 1];
  return c != 'w' && c != 'x' && c != 'y';
}

bool ends_with(const std::string& w, std::string_view suffix) {
  return w.size() >= suffix.size() &&
         std::string_view(w).substr(w.size() - suffix.size()) == suffix;
}

void step1a(std::string& w) {
  if (ends_with(w, "sses")) {
    w.resize(w.size() - 2);
  } else if (ends_with(w, "ies")) {
    w.resize(w.size() - 2);
  } else if (ends_with(w, "ss")) {
    // unchanged
  } else if (ends_with(w, "s")) {
    w.pop_back();
  }
}

void step1b(std::string& w) {
  bool cleanup = false;
  if (ends_with(w, "eed")) {
    if (measure(w, w.size() - 3) > 0) w.pop_back();
  } else if (ends_with(w, "ed") && has_vowel(w, w.size() - 2)) {
    w.resize(w.size() - 2);
    cleanup = true;
  } else if (ends_with(w, "ing") && has_vowel(w, w.size() - 3)) {
    w.resize(w.size() - 3);
    cleanup = true;
  }
  if (!cleanup) return;
  if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
    w.push_back('e');
  } else if (ends_double_consonant(w)) {
    char c = w.back();
    if (c != 'l' && c != 's' && c != 'z') w.pop_back();
  } else if (measure(w, w.size()) == 1 && ends_cvc(w)) {
    w.push_back('e');
  }
}

void step1c(std::string& w) {
  if (ends_with(w, "y") && has_vowel(w, w.size() - 1)) w.back() = 'i';
}

}  // namespace

// --- SlangDictionary -------------------------------------------------------

void SlangDictionary::add(std::string_view slang, std::string_view expansion) {
  std::vector<std::string> key_tokens = content_tokens(slang);
  if (key_tokens.empty()) return;
  std::string key = join(key_tokens, 0, key_tokens.size());
  std::vector<std::string> value = content_tokens(expansion);
  max_phrase_tokens_ = std::max(max_phrase_tokens_, key_tokens.size());
  raw_[key] = std::string(expansion);
  entries_[key] = std::move(value);
}

SlangDictionary SlangDictionary::parse(std::istream& in) {
  SlangDictionary dict;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(line_no, "slang entry without a tab");
    dict.add(std::string_view(line).substr(0, tab), std::string_view(line).substr(tab + 1));
  }
  return dict;
}

SlangDictionary SlangDictionary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open slang dictionary '" + path + "'");
  return parse(in);
}

const SlangDictionary& SlangDictionary::builtin() {
  static const SlangDictionary dict = [] {
    std::istringstream in{std::string(builtin::kSlangTsv)};
    return parse(in);
  }();
  return dict;
}

std::optional<std::string_view> SlangDictionary::find(std::string_view phrase) const {
  auto it = raw_.find(phrase);
  if (it == raw_.end()) return std::nullopt;
  return std::string_view(it->second);
}

const std::vector<std::string>* SlangDictionary::expansion_tokens(std::string_view phrase) const {
  auto it = entries_.find(phrase);
  return it == entries_.end() ? nullptr : &it->second;
}

// --- anonymization ---------------------------------------------------------

std::vector<std::pair<std::size_t, std::size_t>> find_urls(std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t plen = url_prefix_length(text, i);
    if (plen == 0) {
      ++i;
      continue;
    }
    std::size_t end = i + plen;
    while (end < text.size() && !is_space(static_cast<unsigned char>(text[end]))) ++end;
    while (end > i + plen && is_url_trailer(static_cast<unsigned char>(text[end - 1]))) --end;
    spans.emplace_back(i, end);
    i = end;
  }
  return spans;
}

bool contains_url(std::string_view text) { return !find_urls(text).empty(); }

std::string anonymize(std::string_view text) {
  std::string no_urls;
  no_urls.reserve(text.size());
  std::size_t cursor = 0;
  for (auto [begin, end] : find_urls(text)) {
    no_urls.append(text.substr(cursor, begin - cursor));
    no_urls.append(kLinkPlaceholder);
    cursor = end;
  }
  no_urls.append(text.substr(cursor));

  std::string out;
  out.reserve(no_urls.size());
  std::size_t i = 0;
  while (i < no_urls.size()) {
    bool token_start = i == 0 || is_space(static_cast<unsigned char>(no_urls[i - 1]));
    if (token_start && no_urls[i] == '@') {
      std::size_t end = i;
      while (end < no_urls.size() && !is_space(static_cast<unsigned char>(no_urls[end]))) ++end;
      out.append(kMentionPlaceholder);
      i = end;
    } else {
      out.push_back(no_urls[i]);
      ++i;
    }
  }
  return out;
}

// --- tokenization ----------------------------------------------------------

bool is_punctuation_only(std::string_view token) {
  if (token.empty()) return false;
  return std::all_of(token.begin(), token.end(),
                     [](char c) { return is_ascii_punct(static_cast<unsigned char>(c)); });
}

std::vector<std::string> tokenize(std::string_view raw) {
  std::string text = lowercase(raw);
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    std::size_t end = i;
    while (end < text.size() && !is_space(static_cast<unsigned char>(text[end]))) ++end;

    std::size_t b = i;
    std::size_t e = end;
    while (b < e && is_ascii_punct(static_cast<unsigned char>(text[b]))) {
      char c = text[b];
      bool attaches = (c == '#' || c == '@') && b + 1 < e &&
                      is_word_byte(static_cast<unsigned char>(text[b + 1]));
      if (attaches) break;
      tokens.emplace_back(1, c);
      ++b;
    }
    std::vector<std::string> trailing;
    if (b < e && url_prefix_length(text, b) > 0) {
      while (e > b && is_url_trailer(static_cast<unsigned char>(text[e - 1]))) {
        trailing.emplace_back(1, text[e - 1]);
        --e;
      }
    } else {
      while (e > b && is_ascii_punct(static_cast<unsigned char>(text[e - 1]))) {
        trailing.emplace_back(1, text[e - 1]);
        --e;
      }
    }
    if (b < e) tokens.emplace_back(text.substr(b, e - b));
    tokens.insert(tokens.end(), trailing.rbegin(), trailing.rend());
    i = end;
  }
  return tokens;
}

// --- stemming --------------------------------------------------------------

std::string stem(std::string_view word) {
  std::string w(word);
  if (w.size() <= 3) return w;
  if (!std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; })) {
    return w;
  }
  step1a(w);
  step1b(w);
  step1c(w);
  return w;
}

// --- pipeline --------------------------------------------------------------

NormalizedDoc normalize_text(std::string_view text, const SlangDictionary& dict,
                             std::string tweet_id) {
  std::vector<std::string> raw = content_tokens(text);
  NormalizedDoc doc;
  doc.tweet_id = std::move(tweet_id);
  doc.tokens.reserve(raw.size());
  const std::size_t longest = dict.max_phrase_tokens();
  std::size_t i = 0;
  while (i < raw.size()) {
    bool expanded = false;
    for (std::size_t len = std::min(longest, raw.size() - i); len >= 1; --len) {
      const std::vector<std::string>* exp =
          dict.expansion_tokens(len == 1 ? raw[i] : join(raw, i, len));
      if (exp != nullptr) {
        doc.tokens.insert(doc.tokens.end(), exp->begin(), exp->end());
        i += len;
        expanded = true;
        break;
      }
    }
    if (!expanded) doc.tokens.push_back(std::move(raw[i++]));
  }
  doc.stems.reserve(doc.tokens.size());
  for (const auto& t : doc.tokens) doc.stems.push_back(stem(t));
  return doc;
}

NormalizedDoc normalize(const Tweet& tweet, const SlangDictionary& dict) {
  return normalize_text(tweet.text, dict, tweet.tweet_id);
}

std::string detokenize(const NormalizedDoc& doc) {
  return join(doc.tokens, 0, doc.tokens.size());
}

std::vector<std::string> ngrams(const std::vector<std::string>& stems, int max_n) {
  if (max_n < 1 || max_n > 3) {
    throw InvalidArgument("ngram order must be in [1,3], got " + std::to_string(max_n));
  }
  std::vector<std::string> out;
  const std::size_t n = stems.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::string gram;
    for (std::size_t len = 1; len <= static_cast<std::size_t>(max_n) && i + len <= n; ++len) {
      if (len > 1) gram.push_back(' ');
      gram += stems[i + len - 1];
      out.push_back(gram);
    }
  }
  return out;
}

}  // namespace forge
