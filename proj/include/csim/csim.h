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

#ifndef CSIM_CSIM_H_
#define CSIM_CSIM_H_

/*
 * C interface to the csim sentence-similarity engine.
 *
 * Every fallible call returns a csim_status. On failure a description of the
 * error for the calling thread is available from csim_last_error() until the
 * next failing call on that thread. Handles are opaque and owned by the
 * caller; release them with the matching *_free function.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CSIM_BUILDING_LIBRARY)
#    define CSIM_API __declspec(dllexport)
#  else
#    define CSIM_API __declspec(dllimport)
#  endif
#else
#  define CSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum csim_status {
  CSIM_OK = 0,
  CSIM_ERR_USAGE = 1,    /* invalid configuration or argument */
  CSIM_ERR_DATA = 2,     /* unreadable, malformed or out-of-range input */
  CSIM_ERR_NUMERIC = 3,  /* non-finite values or failed gradient check */
  CSIM_ERR_INTERNAL = 4
} csim_status;

typedef enum csim_loss {
  CSIM_LOSS_NLL = 0,
  CSIM_LOSS_MSE = 1,
  CSIM_LOSS_KLD = 2,
  CSIM_LOSS_PCC = 3
} csim_loss;

typedef enum csim_embedding_format {
  CSIM_EMBEDDINGS_TEXT = 0,
  CSIM_EMBEDDINGS_BINARY = 1
} csim_embedding_format;

typedef struct csim_dataset csim_dataset;
typedef struct csim_model csim_model;

CSIM_API const char* csim_version(void);
CSIM_API const char* csim_last_error(void);
CSIM_API size_t csim_feature_count(void);

/* Parses "loss name" strings ("nll", "mse", "kld", "pcc"). */
CSIM_API csim_status csim_parse_loss(const char* name, csim_loss* out);

/* ---- datasets ---------------------------------------------------------- */

/* Reads `score<TAB>s1<TAB>s2` or `s1<TAB>s2` lines. */
CSIM_API csim_status csim_dataset_load(const char* path, csim_dataset** out);
CSIM_API csim_status csim_dataset_save(const csim_dataset* dataset,
                                       const char* path);
CSIM_API void csim_dataset_free(csim_dataset* dataset);
CSIM_API size_t csim_dataset_size(const csim_dataset* dataset);
CSIM_API const char* csim_dataset_pair_id(const csim_dataset* dataset,
                                          size_t index);
/* Returns 1 and writes the gold score when the pair is labeled, else 0. */
CSIM_API int csim_dataset_gold(const csim_dataset* dataset, size_t index,
                               double* gold);
/* Seeded 80:20 shuffle split. */
CSIM_API csim_status csim_dataset_split(const csim_dataset* dataset,
                                        uint64_t seed, csim_dataset** train,
                                        csim_dataset** validation);

/* ---- training ---------------------------------------------------------- */

typedef struct csim_train_config {
  csim_loss loss;
  size_t batch_size;
  size_t epochs;
  double learning_rate;
  size_t lr_halve_every; /* 0 keeps the rate constant */
  size_t embedding_dim;
  size_t hidden;
  size_t attention; /* 0: same as hidden */
  size_t mlp;       /* 0: same as hidden */
  uint64_t seed;
  int pretrained;   /* 1: initialise from the embedding file, 0: random */
  int untied_encoders;
} csim_train_config;

CSIM_API void csim_train_config_default(csim_train_config* config);

/* Paths may be NULL: without frequencies every word carries the same
 * information content; without similarities only exact matches count. The
 * embedding file may be NULL only for random initialisation. */
typedef struct csim_resource_paths {
  const char* embeddings;
  csim_embedding_format embedding_format;
  const char* frequencies;
  const char* similarities;
} csim_resource_paths;

typedef struct csim_epoch_report {
  size_t epoch;
  double mean_loss;
  double train_pcc;
  double val_pcc;
  double seconds;
  double learning_rate;
} csim_epoch_report;

typedef void (*csim_epoch_callback)(const csim_epoch_report* report,
                                    void* user);

/* Trains on labeled `train`, validating on labeled `validation`. The final
 * model and the best-on-validation model are returned; either output pointer
 * may be NULL. */
CSIM_API csim_status csim_train(const csim_train_config* config,
                                const csim_dataset* train,
                                const csim_dataset* validation,
                                const csim_resource_paths* resources,
                                csim_epoch_callback on_epoch, void* user,
                                csim_model** final_model,
                                csim_model** best_model);

/* ---- models ------------------------------------------------------------ */

CSIM_API csim_status csim_model_load(const char* path, csim_model** out);
CSIM_API csim_status csim_model_save(const csim_model* model,
                                     const char* path);
CSIM_API void csim_model_free(csim_model* model);
CSIM_API csim_status csim_model_config(const csim_model* model,
                                       csim_train_config* config,
                                       size_t* vocab_size);

/* `scores` must hold csim_dataset_size(dataset) values. */
CSIM_API csim_status csim_evaluate(const csim_model* model,
                                   const csim_dataset* dataset, double* pcc,
                                   double* scores);
CSIM_API csim_status csim_score(const csim_model* model,
                                const csim_dataset* dataset, double* scores);

/* ---- diagnostics ------------------------------------------------------- */

typedef void (*csim_gradcheck_callback)(const char* tensor,
                                        double max_rel_error, void* user);

/* Finite-difference check of the full model on a random batch
 * (H=4, D=3, five pairs, double precision). Returns CSIM_ERR_NUMERIC when any
 * tensor reaches a relative error of 1e-4. */
CSIM_API csim_status csim_gradcheck(csim_loss loss, uint64_t seed,
                                    csim_gradcheck_callback on_tensor,
                                    void* user, double* max_rel_error);

/* Surface features, csim_feature_count() values per pair written row by row
 * into `out`. */
CSIM_API csim_status csim_features(const csim_dataset* dataset,
                                   const csim_resource_paths* resources,
                                   uint64_t seed, double* out);

/* Writes a teacher-labelled synthetic corpus into `directory`: data.tsv,
 * embeddings.txt, embeddings.bin and freq.tsv. */
CSIM_API csim_status csim_synthesize(const char* directory, size_t pairs,
                                     size_t embedding_dim, uint64_t seed);

#ifdef __cplusplus
}
#endif

#endif /* CSIM_CSIM_H_ */
