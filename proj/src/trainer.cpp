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

#include "trainer.hpp"

#include <chrono>
#include <cmath>

namespace csim {
namespace {

void require_labeled(const std::vector<SentencePair>& pairs, const char* what) {
  for (const auto& p : pairs) {
    if (!p.gold) {
      throw ConfigError(std::string(what) + " pair " + p.id +
                        " has no gold score");
    }
  }
}

// Names the first tensor holding a NaN or infinity, empty if all finite.
std::string first_non_finite(const Model<float>& m) {
  std::string bad;
  m.for_each([&](const std::string& name, const Matrix<float>& t) {
    if (bad.empty() && !t.all_finite()) bad = name;
  });
  return bad;
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 2) {
    throw ConfigError("batch size must be at least 2, got " +
                      std::to_string(batch_size));
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (embedding_dim == 0 || hidden == 0) {
    throw ConfigError("embedding and hidden sizes must be positive");
  }
}

ModelDims TrainConfig::dims(std::size_t vocab_size) const {
  ModelDims d;
  d.vocab = vocab_size;
  d.embedding = embedding_dim;
  d.hidden = hidden;
  d.attention = attention ? attention : hidden;
  d.mlp = mlp ? mlp : hidden;
  d.untied = untied_encoders;
  return d;
}

double TrainConfig::learning_rate_for_epoch(std::size_t epoch) const {
  if (lr_halve_every == 0 || epoch == 0) return learning_rate;
  const auto halvings = (epoch - 1) / lr_halve_every;
  return learning_rate * std::pow(0.5, static_cast<double>(halvings));
}

FeatureVector ModelBundle::features(const SentencePair& pair) const {
  return extract_features(pair, EmbeddingView{vocab, feature_embedding}, ic,
                          sims);
}

PairInput ModelBundle::prepare(const SentencePair& pair) const {
  PairInput in;
  in.ids1 = vocab.encode(pair.tokens1);
  in.ids2 = vocab.encode(pair.tokens2);
  in.features = features(pair);
  in.gold = pair.gold.value_or(0.0);
  return in;
}

std::vector<PairInput> ModelBundle::prepare(
    const std::vector<SentencePair>& pairs) const {
  std::vector<PairInput> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(prepare(p));
  return out;
}

ModelBundle initialize_bundle(const TrainConfig& config,
                              const TrainResources& resources) {
  config.validate();
  const auto& emb = resources.embeddings;
  if (emb.dim != config.embedding_dim) {
    throw ConfigError("embedding table has dimension " +
                      std::to_string(emb.dim) + " but the configuration asks for " +
                      std::to_string(config.embedding_dim));
  }
  if (emb.vectors.rows() != resources.vocab.size()) {
    throw ConfigError("embedding table has " + std::to_string(emb.vectors.rows()) +
                      " rows for a vocabulary of " +
                      std::to_string(resources.vocab.size()));
  }
  ModelBundle b;
  b.config = config;
  b.vocab = resources.vocab;
  SeededRng rng = SeededRng(config.seed).split(1);
  b.model = Model<float>::random(config.dims(b.vocab.size()), rng);
  b.model.embedding = emb.vectors;
  b.feature_embedding = emb.vectors;
  b.ic = resources.ic;
  b.sims = resources.sims;
  return b;
}

std::vector<double> predict(const Model<float>& model,
                            const std::vector<PairInput>& inputs) {
  std::vector<double> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) out.push_back(forward_pair(model, in).y);
  return out;
}

TrainResult train(const TrainConfig& config,
                  const std::vector<SentencePair>& train_pairs,
                  const std::vector<SentencePair>& val_pairs,
                  const TrainResources& resources,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (train_pairs.size() < 2) {
    throw ConfigError("training needs at least 2 labeled pairs");
  }
  if (val_pairs.size() < 2) {
    throw ConfigError("validation needs at least 2 labeled pairs");
  }
  require_labeled(train_pairs, "training");
  require_labeled(val_pairs, "validation");

  TrainResult result;
  result.final_bundle = initialize_bundle(config, resources);
  ModelBundle& bundle = result.final_bundle;
  Model<float>& model = bundle.model;

  const auto train_inputs = bundle.prepare(train_pairs);
  const auto val_inputs = bundle.prepare(val_pairs);
  std::vector<double> train_gold, val_gold;
  for (const auto& in : train_inputs) train_gold.push_back(in.gold);
  for (const auto& in : val_inputs) val_gold.push_back(in.gold);

  std::vector<AdamState<float>> adam;
  for (const auto& [name, t] : model.tensors()) adam.emplace_back(*t);
  Model<float> grad = Model<float>::zeros_like(model);

  SeededRng batch_rng = SeededRng(config.seed).split(2);
  double best_pcc = -std::numeric_limits<double>::infinity();
  result.best_bundle = bundle;

  std::vector<PairInput> batch;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const double lr = config.learning_rate_for_epoch(epoch);
    const auto batches = make_batches(train_inputs.size(), config.batch_size, batch_rng);
    double loss_sum = 0.0;
    for (const auto& idx : batches) {
      batch.clear();
      for (auto i : idx) batch.push_back(train_inputs[i]);
      const double loss = loss_and_gradient(model, std::span<const PairInput>(batch),
                                            config.loss, &grad);
      if (!std::isfinite(loss)) {
        // Parameters can still be finite when an activation overflowed; the
        // gradient then shows where the damage entered.
        std::string bad = first_non_finite(model);
        if (bad.empty()) {
          bad = first_non_finite(grad);
          if (!bad.empty()) bad = "gradient of " + bad;
        }
        throw NumericError("epoch " + std::to_string(epoch) + ": non-finite " +
                           std::string(loss_name(config.loss)) + " loss" +
                           (bad.empty() ? std::string() : "; first non-finite tensor: " + bad));
      }
      const auto bad_grad = first_non_finite(grad);
      if (!bad_grad.empty()) {
        throw NumericError("epoch " + std::to_string(epoch) +
                           ": non-finite gradient in " + bad_grad);
      }
      loss_sum += loss;
      auto params = model.tensors();
      auto grads = grad.tensors();
      for (std::size_t k = 0; k < params.size(); ++k) {
        adam_step(*params[k].second, *grads[k].second, adam[k], lr);
      }
    }
    const auto bad = first_non_finite(model);
    if (!bad.empty()) {
      throw NumericError("epoch " + std::to_string(epoch) +
                         ": non-finite parameters in " + bad);
    }

    EpochReport report;
    report.epoch = epoch;
    report.learning_rate = lr;
    report.mean_loss = batches.empty() ? 0.0 : loss_sum / static_cast<double>(batches.size());
    report.train_pcc = pearson(predict(model, train_inputs), train_gold);
    report.val_pcc = pearson(predict(model, val_inputs), val_gold);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.reports.push_back(report);
    if (report.val_pcc > best_pcc) {
      best_pcc = report.val_pcc;
      result.best_epoch = epoch;
      result.best_bundle = bundle;
    }
    if (on_epoch) on_epoch(report);
  }
  return result;
}

EvalResult evaluate(const ModelBundle& bundle,
                    const std::vector<SentencePair>& pairs) {
  for (const auto& p : pairs) {
    if (!p.gold) {
      throw ConfigError("pair " + p.id +
                        " has no gold score; use `score` for unlabeled data");
    }
  }
  if (pairs.size() < 2) {
    throw ConfigError("evaluation needs at least 2 labeled pairs, got " +
                      std::to_string(pairs.size()));
  }
  EvalResult r;
  const auto inputs = bundle.prepare(pairs);
  r.scores = predict(bundle.model, inputs);
  std::vector<double> gold;
  for (const auto& p : pairs) gold.push_back(*p.gold);
  r.pcc = pearson(r.scores, gold);
  return r;
}

std::vector<double> score(const ModelBundle& bundle,
                          const std::vector<SentencePair>& pairs) {
  return predict(bundle.model, bundle.prepare(pairs));
}

}  // namespace csim
