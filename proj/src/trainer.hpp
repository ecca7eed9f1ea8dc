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

#ifndef CSIM_TRAINER_HPP_
#define CSIM_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "features.hpp"
#include "model.hpp"

namespace csim {

struct TrainConfig {
  LossKind loss = LossKind::kPcc;
  std::size_t batch_size = 125;
  std::size_t epochs = 15;
  double learning_rate = 1e-4;
  std::size_t lr_halve_every = 5;  // 0 disables the schedule
  std::size_t embedding_dim = 300;
  std::size_t hidden = 200;
  std::size_t attention = 0;  // 0 means same as hidden
  std::size_t mlp = 0;        // 0 means same as hidden
  std::uint64_t seed = 1;
  EmbeddingOrigin init = EmbeddingOrigin::kPretrained;
  bool untied_encoders = false;

  void validate() const;
  ModelDims dims(std::size_t vocab_size) const;
  // 1-based epoch; halved after every `lr_halve_every` completed epochs.
  double learning_rate_for_epoch(std::size_t epoch) const;
};

struct TrainResources {
  Vocabulary vocab;
  EmbeddingTable embeddings;  // initial table, also frozen for features
  InformationContent ic;
  WordSimilarityProvider sims;
};

struct ModelBundle {
  static constexpr std::uint32_t kFormatVersion = 1;

  TrainConfig config;
  Vocabulary vocab;
  Model<float> model;
  Matrix<float> feature_embedding;
  InformationContent ic;
  WordSimilarityProvider sims;

  FeatureVector features(const SentencePair& pair) const;
  PairInput prepare(const SentencePair& pair) const;
  std::vector<PairInput> prepare(const std::vector<SentencePair>& pairs) const;
};

// Freshly initialised bundle; the embedding is copied from the resources.
ModelBundle initialize_bundle(const TrainConfig& config,
                              const TrainResources& resources);

struct EpochReport {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double train_pcc = 0.0;
  double val_pcc = 0.0;
  double seconds = 0.0;
  double learning_rate = 0.0;
};

struct TrainResult {
  ModelBundle final_bundle;
  ModelBundle best_bundle;  // highest validation PCC, final if no epochs ran
  std::size_t best_epoch = 0;
  std::vector<EpochReport> reports;
};

using EpochCallback = std::function<void(const EpochReport&)>;

TrainResult train(const TrainConfig& config,
                  const std::vector<SentencePair>& train_pairs,
                  const std::vector<SentencePair>& val_pairs,
                  const TrainResources& resources,
                  const EpochCallback& on_epoch = {});

std::vector<double> predict(const Model<float>& model,
                            const std::vector<PairInput>& inputs);

struct EvalResult {
  double pcc = 0.0;
  std::vector<double> scores;
};

EvalResult evaluate(const ModelBundle& bundle,
                    const std::vector<SentencePair>& pairs);
std::vector<double> score(const ModelBundle& bundle,
                          const std::vector<SentencePair>& pairs);

// Binary layout, all integers little-endian:
//   "CSIM" | u32 version | u32 n | n bytes of JSON config
//   | records: u32 name_len, name, u32 rank, rank x u32 dims, float32 values
//   | u32 CRC-32 of everything before it
std::string serialize_bundle(const ModelBundle& bundle);
ModelBundle deserialize_bundle(const std::string& bytes);
void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

}  // namespace csim

#endif  // CSIM_TRAINER_HPP_
