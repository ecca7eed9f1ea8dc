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

#include "synthetic.hpp"

#include <algorithm>
#include <cstdio>

namespace csim {
namespace {

std::size_t zipf_draw(const std::vector<double>& cumulative, SeededRng& rng) {
  const double u = rng.uniform01() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(it - cumulative.begin(), cumulative.size() - 1);
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.pairs < 2 || spec.vocab < 2 || spec.min_length == 0 ||
      spec.max_length < spec.min_length) {
    throw ConfigError("synthetic: need >= 2 pairs, >= 2 words and a valid length range");
  }
  SeededRng rng(spec.seed);
  SyntheticData data;

  std::vector<std::string> words;
  std::vector<double> cumulative;
  double acc = 0.0;
  for (std::size_t k = 0; k < spec.vocab; ++k) {
    char name[16];
    std::snprintf(name, sizeof(name), "w%03zu", k);
    words.emplace_back(name);
    acc += 1.0 / static_cast<double>(k + 1);
    cumulative.push_back(acc);
  }
  data.vocab = Vocabulary::from_tokens(words);

  SeededRng emb_rng = rng.split(1);
  data.teacher_table = init_uniform<float>(data.vocab.size(), spec.embedding, 1.0, emb_rng);
  data.teacher_vectors.tokens = words;
  data.teacher_vectors.vectors = Matrix<float>(spec.vocab, spec.embedding);
  for (std::size_t k = 0; k < spec.vocab; ++k) {
    const auto src = data.teacher_table.row(data.vocab.lookup(words[k]));
    std::copy(src.begin(), src.end(), data.teacher_vectors.vectors.row(k).begin());
  }

  SeededRng text_rng = rng.split(2);
  for (std::size_t i = 0; i < spec.pairs; ++i) {
    SentencePair p;
    p.id = std::to_string(i + 1);
    const std::size_t len =
        spec.min_length + text_rng.index(spec.max_length - spec.min_length + 1);
    for (std::size_t t = 0; t < len; ++t) p.tokens1.push_back(words[zipf_draw(cumulative, text_rng)]);
    // Edit rate from identical copies to unrelated sentences.
    const double noise = text_rng.uniform01();
    for (const auto& w : p.tokens1) {
      if (text_rng.uniform01() < noise) {
        if (text_rng.uniform01() < 0.25) continue;  // drop
        p.tokens2.push_back(words[zipf_draw(cumulative, text_rng)]);
      } else {
        p.tokens2.push_back(w);
      }
    }
    if (p.tokens2.empty() || text_rng.uniform01() < noise * 0.5) {
      p.tokens2.push_back(words[zipf_draw(cumulative, text_rng)]);
    }
    data.pairs.push_back(std::move(p));
  }

  for (const auto& w : words) data.frequencies[w] = 1.0;
  for (const auto& p : data.pairs) {
    for (const auto& t : p.tokens1) data.frequencies[t] += 1.0;
    for (const auto& t : p.tokens2) data.frequencies[t] += 1.0;
  }

  // Teacher scores.
  ModelBundle teacher;
  teacher.vocab = data.vocab;
  SeededRng model_rng = rng.split(3);
  ModelDims dims;
  dims.vocab = data.vocab.size();
  dims.embedding = spec.embedding;
  dims.hidden = spec.hidden;
  dims.attention = spec.hidden;
  dims.mlp = spec.hidden;
  teacher.model = Model<float>::random(dims, model_rng);
  teacher.model.embedding = data.teacher_table;
  teacher.feature_embedding = data.teacher_table;
  teacher.ic = InformationContent(data.frequencies);
  const auto raw = predict(teacher.model, teacher.prepare(data.pairs));
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double span = *hi - *lo;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double g = span > 0.0 ? 5.0 * (raw[i] - *lo) / span : 2.5;
    data.pairs[i].gold = std::clamp(g, 0.0, 5.0);
  }
  return data;
}

TrainResources synthetic_resources(const SyntheticData& data,
                                   EmbeddingOrigin origin, std::uint64_t seed) {
  TrainResources r;
  r.vocab = data.vocab;
  if (origin == EmbeddingOrigin::kPretrained) {
    r.embeddings.dim = data.teacher_table.cols();
    r.embeddings.vectors = data.teacher_table;
    r.embeddings.origin = EmbeddingOrigin::kPretrained;
    r.embeddings.loaded_rows = data.teacher_vectors.tokens.size();
  } else {
    r.embeddings = random_embeddings(data.vocab, data.teacher_table.cols(), seed);
  }
  r.ic = InformationContent(data.frequencies);
  return r;
}

}  // namespace csim
