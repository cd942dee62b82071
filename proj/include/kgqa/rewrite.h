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

// Rewrite stage: reasoning paths -> triple-form text -> graph-to-text prompt
// -> free-form sentences, consolidated into one knowledge paragraph.

#ifndef KGQA_REWRITE_H_
#define KGQA_REWRITE_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgqa/backend.h"
#include "kgqa/kg_store.h"

namespace kgqa {

struct GenerationSettings {
  int max_new_tokens = 256;
  double temperature = 0.0;
  int64_t seed = 0;

  GenerateRequest Request(std::string prompt) const {
    return GenerateRequest{std::move(prompt), max_new_tokens, temperature,
                           seed};
  }
};

struct TripleFormText {
  std::string text;
  std::vector<Triple> source;  // deduplicated, first occurrence kept
};

// "(s, r, o), (s, r, o)" over surface forms. Names containing ", " make the
// rendering ambiguous; that is a known limitation of the format.
TripleFormText Linearize(std::span<const Triple> triples,
                         const KnowledgeGraph& g);

std::string BuildGraphToTextPrompt(std::string_view triple_form);

struct KnowledgeSentence {
  std::string text;
  ReasoningPath source;
  bool fallback = false;  // generator returned nothing; text is triple form
};

struct KnowledgeParagraph {
  std::vector<KnowledgeSentence> sentences;
  std::string consolidated;  // sentence texts joined by one space, trimmed

  bool empty() const { return sentences.empty(); }
};

// One generate call per path, in order. Backend failures become kRewrite
// naming the path index.
KnowledgeParagraph RewritePaths(std::span<const ReasoningPath> paths,
                                const KnowledgeGraph& g,
                                const TextGenerator& generator,
                                const GenerationSettings& settings = {});

std::string Consolidate(std::span<const KnowledgeSentence> sentences);

}  // namespace kgqa

#endif  // KGQA_REWRITE_H_
