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

#include "forge/labels.h"

#include <string>

#include "forge/errors.h"

namespace forge {

std::string_view label_name(Label l) {
  return l == Label::kJob ? "job" : "notjob";
}

std::string_view answer_name(Answer a) { return a == Answer::kY ? "Y" : "N"; }

std::string_view source_name(Source s) {
  return s == Source::kBusiness ? "business" : "personal";
}

std::optional<Label> parse_label(std::string_view s) {
  if (s == "job" || s == "Y" || s == "1") return Label::kJob;
  if (s == "notjob" || s == "N" || s == "0") return Label::kNotJob;
  return std::nullopt;
}

std::optional<Answer> parse_answer(std::string_view s) {
  if (s == "Y" || s == "y") return Answer::kY;
  if (s == "N" || s == "n") return Answer::kN;
  return std::nullopt;
}

std::optional<Source> parse_source(std::string_view s) {
  if (s == "personal") return Source::kPersonal;
  if (s == "business") return Source::kBusiness;
  return std::nullopt;
}

Label label_from_string(std::string_view s) {
  if (auto l = parse_label(s)) return *l;
  throw InvalidArgument("unknown topic label '" + std::string(s) + "'");
}

Answer answer_from_string(std::string_view s) {
  if (auto a = parse_answer(s)) return *a;
  throw InvalidArgument("unknown answer '" + std::string(s) + "' (expected Y or N)");
}

Source source_from_string(std::string_view s) {
  if (auto v = parse_source(s)) return *v;
  throw InvalidArgument("unknown source label '" + std::string(s) + "'");
}

}  // namespace forge
