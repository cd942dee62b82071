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

// Regenerates tests/data/fixture: a small layered KB and 30 questions whose
// gold answers are the terminal entities of their gold relation paths.
//
//   make_fixture <out_dir>

#include <fstream>
#include <iostream>

#include "kgqa/dataset_io.h"
#include "synthetic.h"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixture <out_dir>\n";
    return 2;
  }
  const std::string dir = argv[1];
  kgqa::testing::LayeredSpec spec;
  spec.entities = 120;
  spec.relations = 6;
  spec.out_degree = 2;
  spec.questions = 30;
  spec.max_hops = 3;
  spec.seed = 30;
  const auto data = kgqa::testing::MakeLayeredDataset(spec);
  std::ofstream(dir + "/kb.txt") << data.kb_text;
  std::ofstream questions(dir + "/questions.jsonl");
  kgqa::WriteGeneric(questions, data.questions);
  return 0;
}
