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

#ifndef FORGE_LABELS_H_
#define FORGE_LABELS_H_

#include <optional>
#include <string>
#include <string_view>

namespace forge {

// Topic of a tweet.
enum class Label { kNotJob = 0, kJob = 1 };

// Crowd answer to "Is this tweet about job or employment?".
enum class Answer { kN = 0, kY = 1 };

// Kind of the posting account.
enum class Source { kPersonal = 0, kBusiness = 1 };

inline Label to_label(Answer a) {
  return a == Answer::kY ? Label::kJob : Label::kNotJob;
}
inline Answer to_answer(Label l) {
  return l == Label::kJob ? Answer::kY : Answer::kN;
}

std::string_view label_name(Label l);          // "job" / "notjob"
std::string_view answer_name(Answer a);        // "Y" / "N"
std::string_view source_name(Source s);        // "personal" / "business"

std::optional<Label> parse_label(std::string_view s);
std::optional<Answer> parse_answer(std::string_view s);
std::optional<Source> parse_source(std::string_view s);

// Throwing variants for file/CLI parsing.
Label label_from_string(std::string_view s);
Answer answer_from_string(std::string_view s);
Source source_from_string(std::string_view s);

}  // namespace forge

#endif  // FORGE_LABELS_H_
