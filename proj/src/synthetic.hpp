/* Copyright 2026 The csim Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CSIM_SYNTHETIC_HPP_
#define CSIM_SYNTHETIC_HPP_

// Teacher-generated sentence pairs for overfit and objective-comparison runs.
// A frozen random model scores pairs built by editing a random sentence; its
// scores are rescaled affinely to span [0, 5] and become the golds.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "trainer.hpp"

namespace csim {

struct SyntheticSpec {
  std::size_t pairs = 50;
  std::size_t vocab = 40;
  std::size_t embedding = 8;
  std::size_t hidden = 16;
  std::size_t min_length = 3;
  std::size_t max_length = 8;
  std::uint64_t seed = 1;
};

struct SyntheticData {
  std::vector<SentencePair> pairs;
  Vocabulary vocab;
  WordVectors teacher_vectors;  // the teacher's embedding, word by word
  Matrix<float> teacher_table;  // same rows indexed by `vocab`
  FrequencyTable frequencies;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Student resources. Pretrained origin hands the student the teacher's table.
TrainResources synthetic_resources(const SyntheticData& data,
                                   EmbeddingOrigin origin, std::uint64_t seed);

}  // namespace csim

#endif  // CSIM_SYNTHETIC_HPP_
