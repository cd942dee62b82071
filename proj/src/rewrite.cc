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

#include "kgqa/rewrite.h"

#include <algorithm>

#include "kgqa/error.h"
#include "kgqa/prompts.h"
#include "kgqa/text_util.h"

namespace kgqa {

TripleFormText Linearize(std::span<const Triple> triples,
                         const KnowledgeGraph& g) {
  TripleFormText out;
  for (const Triple& t : triples) {
    if (std::find(out.source.begin(), out.source.end(), t) != out.source.end()) {
      continue;
    }
    if (!out.source.empty()) out.text.append(", ");
    out.text.append("(");
    out.text.append(g.EntityName(t.subject));
    out.text.append(", ");
    out.text.append(g.RelationName(t.relation));
    out.text.append(", ");
    out.text.append(g.EntityName(t.object));
    out.text.append(")");
    out.source.push_back(t);
  }
  return out;
}

std::string BuildGraphToTextPrompt(std::string_view triple_form) {
  std::string prompt(prompts::kGraphToTextPrefix);
  prompt.append(triple_form);
  prompt.append(prompts::kGraphToTextSuffix);
  return prompt;
}

std::string Consolidate(std::span<const KnowledgeSentence> sentences) {
  std::string out;
  for (size_t i = 0; i < sentences.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out.append(sentences[i].text);
  }
  return std::string(Trim(out));
}

KnowledgeParagraph RewritePaths(std::span<const ReasoningPath> paths,
                                const KnowledgeGraph& g,
                                const TextGenerator& generator,
                                const GenerationSettings& settings) {
  KnowledgeParagraph paragraph;
  for (size_t i = 0; i < paths.size(); ++i) {
    const TripleFormText x = Linearize(paths[i].triples, g);
    GenerateResponse response;
    try {
      response = generator.Generate(settings.Request(BuildGraphToTextPrompt(x.text)));
    } catch (const Error& e) {
      Fail(ErrorCode::kRewrite,
           "rewrite of path " + std::to_string(i) + ": " + e.what());
    }
    KnowledgeSentence sentence;
    sentence.source = paths[i];
    sentence.text = std::string(Trim(response.text));
    if (sentence.text.empty()) {
      sentence.text = x.text;
      sentence.fallback = true;
    }
    paragraph.sentences.push_back(std::move(sentence));
  }
  paragraph.consolidated = Consolidate(paragraph.sentences);
  return paragraph;
}

}  // namespace kgqa
