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

// Deterministic synthetic knowledge graphs and question sets for tests.

#ifndef KGQA_TESTS_SUPPORT_SYNTHETIC_H_
#define KGQA_TESTS_SUPPORT_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kgqa/dataset_io.h"

namespace kgqa::testing {

struct SyntheticDataset {
  std::string kb_text;  // "s|r|o" lines
  bool add_inverses = false;
  std::vector<Question> questions;
};

struct LayeredSpec {
  size_t entities = 200;      // split evenly over layers
  size_t layers = 4;
  size_t relations = 8;       // spread over adjacent layer pairs
  size_t out_degree = 3;      // edges per entity and outgoing relation
  size_t questions = 100;
  size_t min_hops = 1;
  size_t max_hops = 2;
  bool add_inverses = true;
  // Sample question paths over materialized inverses too. When false, paths
  // only move forward through layers, so topics, intermediates and answers
  // never overlap.
  bool inverse_paths = true;
  uint64_t seed = 7;
};

// Entities "ent_NNNN" live in layers; relation "rel_<layer>_<k>" links layer
// L to layer L+1. Each question's gold answers are the terminal entities of
// the full grounding of its gold path.
SyntheticDataset MakeLayeredDataset(const LayeredSpec& spec);

struct MovieSpec {
  size_t movies = 3000;
  size_t questions = 2500;
  uint64_t seed = 11;
};

// Movie-domain KB with the nine relations of the MetaQA KB (loaded with
// inverses) and templated 2-hop questions with gold relation paths.
SyntheticDataset MakeMovieDataset(const MovieSpec& spec);

// Writes a KB with exactly `triples` distinct lines to path, over
// `entities` entities and `relations` relations.
void WriteScaleKb(const std::string& path, size_t triples, size_t entities,
                  size_t relations, uint64_t seed);

// Peak resident set size of this process in bytes.
size_t PeakRssBytes();

}  // namespace kgqa::testing

#endif  // KGQA_TESTS_SUPPORT_SYNTHETIC_H_
