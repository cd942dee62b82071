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

#include "kgqa/error.h"

namespace kgqa {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kData: return "data";
    case ErrorCode::kRetrieval: return "retrieval";
    case ErrorCode::kBackend: return "backend";
    case ErrorCode::kProtocol: return "protocol";
    case ErrorCode::kRewrite: return "rewrite";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace kgqa
