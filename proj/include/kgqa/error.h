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

#ifndef KGQA_ERROR_H_
#define KGQA_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace kgqa {

enum class ErrorCode {
  kParse,      // malformed input line
  kConfig,     // invalid configuration
  kUsage,      // caller broke a precondition
  kData,       // dataset content violates an invariant
  kRetrieval,  // retrieval stage failure
  kBackend,    // transport / remote failure
  kProtocol,   // remote answered with a malformed payload
  kRewrite,    // rewrite stage failure
  kIo,         // file system failure
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the engine. what() carries the message only;
// code() lets callers branch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace kgqa

#endif  // KGQA_ERROR_H_
