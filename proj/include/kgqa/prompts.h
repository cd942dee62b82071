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

// Byte-exact prompt templates. Golden copies live in tests/data/golden.

#ifndef KGQA_PROMPTS_H_
#define KGQA_PROMPTS_H_

#include <string_view>

namespace kgqa::prompts {

// Graph-to-text prompt: kGraphToTextPrefix + triple-form text +
// kGraphToTextSuffix.
inline constexpr std::string_view kGraphToTextPrefix =
    "Your task is to transform a knowledge graph to a sentence or multiple "
    "sentences. The knowledge graph is: ";
inline constexpr std::string_view kGraphToTextSuffix = ". The sentence is:";

// Knowledge-augmented QA prompt: kFactsPrefix + paragraph + kQuestionInfix +
// question + kAnswerSuffix.
inline constexpr std::string_view kFactsPrefix =
    "Below are the facts that might be relevant to answer the question: ";
inline constexpr std::string_view kQuestionInfix = " Question: ";
inline constexpr std::string_view kAnswerSuffix = " Answer:";

// Used when retrieval produced nothing: kQuestionPrefix + question +
// kAnswerSuffix.
inline constexpr std::string_view kQuestionPrefix = "Question: ";

}  // namespace kgqa::prompts

#endif  // KGQA_PROMPTS_H_
