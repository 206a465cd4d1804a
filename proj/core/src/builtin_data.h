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

// Contents of core/data/*, embedded at configure time.

#ifndef FORGE_SRC_BUILTIN_DATA_H_
#define FORGE_SRC_BUILTIN_DATA_H_

#include <string_view>

namespace forge::builtin {

extern const std::string_view kSlangTsv;
extern const std::string_view kC0Rules;
extern const std::string_view kC4Rules;
extern const std::string_view kHashtags;

}  // namespace forge::builtin

#endif  // FORGE_SRC_BUILTIN_DATA_H_
