// Copyright 2026 The KGQA Authors.
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

#ifndef KGQA_TEXT_UTIL_H_
#define KGQA_TEXT_UTIL_H_

#include <string>
#include <string_view>
#include <vector>

namespace kgqa {

// Strips ASCII whitespace (space, tab, CR, LF, VT, FF) from both ends.
std::string_view Trim(std::string_view s);

// ASCII lowercase; bytes >= 0x80 pass through unchanged.
std::string AsciiLower(std::string_view s);

std::vector<std::string> Split(std::string_view s, char sep);

std::string Join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace kgqa

#endif  // KGQA_TEXT_UTIL_H_
