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

#include "csim/csim.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "errors.hpp"
#include "gradcheck.hpp"
#include "synthetic.hpp"
#include "trainer.hpp"

struct csim_dataset {
  std::vector<csim::SentencePair> pairs;
};

struct csim_model {
  csim::ModelBundle bundle;
};

namespace {

thread_local std::string g_last_error;

csim_status fail(csim_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

csim_status status_for(csim::ErrorCategory category) {
  switch (category) {
    case csim::ErrorCategory::kUsage: return CSIM_ERR_USAGE;
    case csim::ErrorCategory::kData: return CSIM_ERR_DATA;
    case csim::ErrorCategory::kNumeric: return CSIM_ERR_NUMERIC;
    case csim::ErrorCategory::kContract: return CSIM_ERR_INTERNAL;
  }
  return CSIM_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes. Nothing may escape
// across the C boundary.
template <typename F>
csim_status guarded(F&& body) {
  try {
    return body();
  } catch (const csim::Error& e) {
    return fail(status_for(e.category()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CSIM_ERR_INTERNAL, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(CSIM_ERR_DATA, e.what());
  } catch (const std::exception& e) {
    return fail(CSIM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CSIM_ERR_INTERNAL, "unknown error");
  }
}

csim_status null_argument(const char* what) {
  return fail(CSIM_ERR_USAGE, std::string(what) + " must not be NULL");
}

csim::LossKind to_loss(csim_loss loss) {
  switch (loss) {
    case CSIM_LOSS_NLL: return csim::LossKind::kNll;
    case CSIM_LOSS_MSE: return csim::LossKind::kMse;
    case CSIM_LOSS_KLD: return csim::LossKind::kKld;
    case CSIM_LOSS_PCC: return csim::LossKind::kPcc;
  }
  throw csim::ConfigError("unknown loss code " + std::to_string(static_cast<int>(loss)));
}

csim_loss from_loss(csim::LossKind kind) {
  switch (kind) {
    case csim::LossKind::kNll: return CSIM_LOSS_NLL;
    case csim::LossKind::kMse: return CSIM_LOSS_MSE;
    case csim::LossKind::kKld: return CSIM_LOSS_KLD;
    case csim::LossKind::kPcc: return CSIM_LOSS_PCC;
  }
  return CSIM_LOSS_PCC;
}

csim::TrainConfig to_config(const csim_train_config& c) {
  csim::TrainConfig out;
  out.loss = to_loss(c.loss);
  out.batch_size = c.batch_size;
  out.epochs = c.epochs;
  out.learning_rate = c.learning_rate;
  out.lr_halve_every = c.lr_halve_every;
  out.embedding_dim = c.embedding_dim;
  out.hidden = c.hidden;
  out.attention = c.attention;
  out.mlp = c.mlp;
  out.seed = c.seed;
  out.init = c.pretrained ? csim::EmbeddingOrigin::kPretrained
                          : csim::EmbeddingOrigin::kRandom;
  out.untied_encoders = c.untied_encoders != 0;
  return out;
}

csim_train_config from_config(const csim::TrainConfig& c) {
  csim_train_config out;
  out.loss = from_loss(c.loss);
  out.batch_size = c.batch_size;
  out.epochs = c.epochs;
  out.learning_rate = c.learning_rate;
  out.lr_halve_every = c.lr_halve_every;
  out.embedding_dim = c.embedding_dim;
  out.hidden = c.hidden;
  out.attention = c.attention;
  out.mlp = c.mlp;
  out.seed = c.seed;
  out.pretrained = c.init == csim::EmbeddingOrigin::kPretrained ? 1 : 0;
  out.untied_encoders = c.untied_encoders ? 1 : 0;
  return out;
}

csim::EmbeddingTable load_table(const csim_resource_paths& r,
                                const csim::Vocabulary& vocab,
                                std::uint64_t seed) {
  if (r.embedding_format == CSIM_EMBEDDINGS_BINARY) {
    return csim::load_embeddings_binary(r.embeddings, vocab, seed);
  }
  return csim::load_embeddings_text(r.embeddings, vocab, seed);
}

void load_lexical(const csim_resource_paths& r, csim::TrainResources& out) {
  out.ic = r.frequencies ? csim::InformationContent(csim::load_frequencies(r.frequencies))
                         : csim::InformationContent();
  if (r.similarities) out.sims = csim::load_word_similarities(r.similarities);
}

}  // namespace

extern "C" {

const char* csim_version(void) { return "1.0.0"; }

const char* csim_last_error(void) { return g_last_error.c_str(); }

size_t csim_feature_count(void) { return csim::FeatureVector{}.size(); }

csim_status csim_parse_loss(const char* name, csim_loss* out) {
  if (!name || !out) return null_argument("name and out");
  return guarded([&] {
    const auto kind = csim::parse_loss(name);
    if (!kind) return fail(CSIM_ERR_USAGE, std::string("unknown loss '") + name + "'");
    *out = from_loss(*kind);
    return CSIM_OK;
  });
}

csim_status csim_dataset_load(const char* path, csim_dataset** out) {
  if (!path || !out) return null_argument("path and out");
  *out = nullptr;
  return guarded([&] {
    auto ds = std::make_unique<csim_dataset>();
    ds->pairs = csim::parse_sts_tsv(std::string(path));
    *out = ds.release();
    return CSIM_OK;
  });
}

csim_status csim_dataset_save(const csim_dataset* dataset, const char* path) {
  if (!dataset || !path) return null_argument("dataset and path");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw csim::FormatError(std::string("cannot write ") + path);
    csim::write_sts_tsv(out, dataset->pairs);
    out.flush();
    if (!out) throw csim::FormatError(std::string("write failed: ") + path);
    return CSIM_OK;
  });
}

void csim_dataset_free(csim_dataset* dataset) { delete dataset; }

size_t csim_dataset_size(const csim_dataset* dataset) {
  return dataset ? dataset->pairs.size() : 0;
}

const char* csim_dataset_pair_id(const csim_dataset* dataset, size_t index) {
  if (!dataset || index >= dataset->pairs.size()) return nullptr;
  return dataset->pairs[index].id.c_str();
}

int csim_dataset_gold(const csim_dataset* dataset, size_t index, double* gold) {
  if (!dataset || index >= dataset->pairs.size()) return 0;
  const auto& g = dataset->pairs[index].gold;
  if (!g) return 0;
  if (gold) *gold = *g;
  return 1;
}

csim_status csim_dataset_split(const csim_dataset* dataset, uint64_t seed,
                               csim_dataset** train, csim_dataset** validation) {
  if (!dataset || !train || !validation) return null_argument("dataset and outputs");
  *train = nullptr;
  *validation = nullptr;
  return guarded([&] {
    auto split = csim::split_80_20(dataset->pairs, seed);
    auto t = std::make_unique<csim_dataset>();
    auto v = std::make_unique<csim_dataset>();
    t->pairs = std::move(split.train);
    v->pairs = std::move(split.validation);
    *train = t.release();
    *validation = v.release();
    return CSIM_OK;
  });
}

void csim_train_config_default(csim_train_config* config) {
  if (config) *config = from_config(csim::TrainConfig{});
}

csim_status csim_train(const csim_train_config* config,
                       const csim_dataset* train,
                       const csim_dataset* validation,
                       const csim_resource_paths* resources,
                       csim_epoch_callback on_epoch, void* user,
                       csim_model** final_model, csim_model** best_model) {
  if (!config || !train || !validation || !resources) {
    return null_argument("config, datasets and resources");
  }
  if (final_model) *final_model = nullptr;
  if (best_model) *best_model = nullptr;
  return guarded([&] {
    const csim::TrainConfig cfg = to_config(*config);
    cfg.validate();

    csim::TrainResources res;
    std::vector<csim::SentencePair> all = train->pairs;
    all.insert(all.end(), validation->pairs.begin(), validation->pairs.end());
    res.vocab = csim::Vocabulary::build(all);
    if (cfg.init == csim::EmbeddingOrigin::kPretrained) {
      if (!resources->embeddings) {
        throw csim::ConfigError("pretrained initialisation needs an embedding file");
      }
      res.embeddings = load_table(*resources, res.vocab, cfg.seed);
    } else {
      res.embeddings = csim::random_embeddings(res.vocab, cfg.embedding_dim, cfg.seed);
    }
    load_lexical(*resources, res);

    csim::EpochCallback cb;
    if (on_epoch) {
      cb = [&](const csim::EpochReport& r) {
        const csim_epoch_report c{r.epoch,    r.mean_loss, r.train_pcc,
                                  r.val_pcc,  r.seconds,   r.learning_rate};
        on_epoch(&c, user);
      };
    }
    auto result = csim::train(cfg, train->pairs, validation->pairs, res, cb);
    std::unique_ptr<csim_model> f, b;
    if (final_model) f.reset(new csim_model{std::move(result.final_bundle)});
    if (best_model) b.reset(new csim_model{std::move(result.best_bundle)});
    if (final_model) *final_model = f.release();
    if (best_model) *best_model = b.release();
    return CSIM_OK;
  });
}

csim_status csim_model_load(const char* path, csim_model** out) {
  if (!path || !out) return null_argument("path and out");
  *out = nullptr;
  return guarded([&] {
    *out = new csim_model{csim::load_bundle(path)};
    return CSIM_OK;
  });
}

csim_status csim_model_save(const csim_model* model, const char* path) {
  if (!model || !path) return null_argument("model and path");
  return guarded([&] {
    csim::save_bundle(model->bundle, path);
    return CSIM_OK;
  });
}

void csim_model_free(csim_model* model) { delete model; }

csim_status csim_model_config(const csim_model* model, csim_train_config* config,
                              size_t* vocab_size) {
  if (!model) return null_argument("model");
  if (config) *config = from_config(model->bundle.config);
  if (vocab_size) *vocab_size = model->bundle.vocab.size();
  return CSIM_OK;
}

csim_status csim_evaluate(const csim_model* model, const csim_dataset* dataset,
                          double* pcc, double* scores) {
  if (!model || !dataset) return null_argument("model and dataset");
  return guarded([&] {
    const auto r = csim::evaluate(model->bundle, dataset->pairs);
    if (pcc) *pcc = r.pcc;
    if (scores) std::copy(r.scores.begin(), r.scores.end(), scores);
    return CSIM_OK;
  });
}

csim_status csim_score(const csim_model* model, const csim_dataset* dataset,
                       double* scores) {
  if (!model || !dataset || !scores) return null_argument("model, dataset and scores");
  return guarded([&] {
    const auto s = csim::score(model->bundle, dataset->pairs);
    std::copy(s.begin(), s.end(), scores);
    return CSIM_OK;
  });
}

csim_status csim_gradcheck(csim_loss loss, uint64_t seed,
                           csim_gradcheck_callback on_tensor, void* user,
                           double* max_rel_error) {
  return guarded([&] {
    const auto report = csim::gradient_check_random(seed, to_loss(loss));
    if (on_tensor) {
      for (const auto& g : report.groups) on_tensor(g.name.c_str(), g.max_rel_error, user);
    }
    if (max_rel_error) *max_rel_error = report.max_rel_error();
    if (!report.passed(csim::kGradCheckTolerance)) {
      return fail(CSIM_ERR_NUMERIC,
                  "gradient check failed: max relative error " +
                      std::to_string(report.max_rel_error()));
    }
    return CSIM_OK;
  });
}

csim_status csim_features(const csim_dataset* dataset,
                          const csim_resource_paths* resources, uint64_t seed,
                          double* out) {
  if (!dataset || !resources || !out) return null_argument("dataset, resources and out");
  if (!resources->embeddings) return fail(CSIM_ERR_USAGE, "features need an embedding file");
  return guarded([&] {
    csim::TrainResources res;
    res.vocab = csim::Vocabulary::build(dataset->pairs);
    res.embeddings = load_table(*resources, res.vocab, seed);
    load_lexical(*resources, res);
    csim::ModelBundle view;
    view.vocab = res.vocab;
    view.feature_embedding = res.embeddings.vectors;
    view.ic = res.ic;
    view.sims = res.sims;
    for (std::size_t i = 0; i < dataset->pairs.size(); ++i) {
      const auto f = view.features(dataset->pairs[i]);
      std::copy(f.begin(), f.end(), out + i * f.size());
    }
    return CSIM_OK;
  });
}

csim_status csim_synthesize(const char* directory, size_t pairs,
                            size_t embedding_dim, uint64_t seed) {
  if (!directory) return null_argument("directory");
  return guarded([&] {
    csim::SyntheticSpec spec;
    spec.pairs = pairs;
    spec.embedding = embedding_dim;
    spec.seed = seed;
    if (embedding_dim == 0) throw csim::ConfigError("embedding dimension must be positive");
    const auto data = csim::generate_synthetic(spec);
    const std::filesystem::path dir(directory);
    std::filesystem::create_directories(dir);
    {
      std::ofstream out(dir / "data.tsv", std::ios::binary);
      if (!out) throw csim::FormatError("cannot write " + (dir / "data.tsv").string());
      csim::write_sts_tsv(out, data.pairs);
    }
    csim::save_embeddings_text((dir / "embeddings.txt").string(), data.teacher_vectors);
    csim::save_embeddings_binary((dir / "embeddings.bin").string(), data.teacher_vectors);
    {
      std::ofstream out(dir / "freq.tsv", std::ios::binary);
      if (!out) throw csim::FormatError("cannot write " + (dir / "freq.tsv").string());
      for (const auto& w : data.teacher_vectors.tokens) {
        out << w << '\t' << data.frequencies.at(w) << '\n';
      }
    }
    return CSIM_OK;
  });
}

}  // extern "C"
