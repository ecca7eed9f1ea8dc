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

// csim command-line front end. Talks to the engine only through the C API.

#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csim/csim.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 3;

struct DatasetDeleter {
  void operator()(csim_dataset* d) const { csim_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(csim_model* m) const { csim_model_free(m); }
};
using DatasetPtr = std::unique_ptr<csim_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<csim_model, ModelDeleter>;

// Thrown to unwind to main() with the exit code of a failed C call.
struct Failure {
  int code;
};

void check(csim_status status) {
  if (status == CSIM_OK) return;
  std::fprintf(stderr, "csim: error: %s\n", csim_last_error());
  // Internal errors are not a user's data problem; report them with the
  // numeric-failure code rather than inventing a fifth code.
  throw Failure{status == CSIM_ERR_INTERNAL ? kExitNumeric : static_cast<int>(status)};
}

DatasetPtr load_dataset(const std::string& path) {
  csim_dataset* d = nullptr;
  check(csim_dataset_load(path.c_str(), &d));
  return DatasetPtr(d);
}

ModelPtr load_model(const std::string& path) {
  csim_model* m = nullptr;
  check(csim_model_load(path.c_str(), &m));
  return ModelPtr(m);
}

const std::map<std::string, csim_embedding_format> kFormats{
    {"text", CSIM_EMBEDDINGS_TEXT}, {"bin", CSIM_EMBEDDINGS_BINARY}};
const std::map<std::string, csim_loss> kLosses{{"nll", CSIM_LOSS_NLL},
                                               {"mse", CSIM_LOSS_MSE},
                                               {"kld", CSIM_LOSS_KLD},
                                               {"pcc", CSIM_LOSS_PCC}};

struct ResourceArgs {
  std::string emb, freq, sims;
  csim_embedding_format format = CSIM_EMBEDDINGS_TEXT;

  csim_resource_paths paths() const {
    csim_resource_paths r{};
    r.embeddings = emb.empty() ? nullptr : emb.c_str();
    r.embedding_format = format;
    r.frequencies = freq.empty() ? nullptr : freq.c_str();
    r.similarities = sims.empty() ? nullptr : sims.c_str();
    return r;
  }
};

void add_resource_options(CLI::App* cmd, ResourceArgs& r, bool emb_required) {
  auto* emb = cmd->add_option("--emb", r.emb, "word vectors (text or word2vec binary)");
  if (emb_required) emb->required();
  cmd->add_option("--emb-format", r.format, "embedding file format")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
  cmd->add_option("--freq", r.freq, "token<TAB>count frequency table");
  cmd->add_option("--sims", r.sims, "word1<TAB>word2<TAB>...<TAB>similarity table");
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string train, val, out;
  ResourceArgs res;
  csim_train_config config{};
  std::string init = "wi";
};

void epoch_row(const csim_epoch_report* r, void*) {
  std::printf("%zu\t%.6f\t%.6f\t%.6f\t%.3f\t%.6g\n", r->epoch, r->mean_loss,
              r->train_pcc, r->val_pcc, r->seconds, r->learning_rate);
  std::fflush(stdout);
}

int run_train(TrainArgs& a) {
  a.config.pretrained = a.init == "wi" ? 1 : 0;
  if (a.config.pretrained && a.res.emb.empty()) {
    std::fprintf(stderr, "csim: error: --init wi needs --emb\n");
    return kExitUsage;
  }
  auto train = load_dataset(a.train);
  auto val = load_dataset(a.val);
  const auto paths = a.res.paths();

  std::printf("epoch\tloss\ttrain_pcc\tval_pcc\tseconds\tlr\n");
  csim_model* final_raw = nullptr;
  csim_model* best_raw = nullptr;
  check(csim_train(&a.config, train.get(), val.get(), &paths, epoch_row, nullptr,
                   &final_raw, &best_raw));
  ModelPtr final_model(final_raw), best_model(best_raw);
  check(csim_model_save(final_model.get(), a.out.c_str()));
  const std::string best_path = a.out + ".best";
  check(csim_model_save(best_model.get(), best_path.c_str()));
  std::fprintf(stderr, "csim: wrote %s (final) and %s (best validation PCC)\n",
               a.out.c_str(), best_path.c_str());
  return 0;
}

// ---- eval / score -----------------------------------------------------------

int run_eval(const std::string& model_path, const std::string& data_path) {
  auto model = load_model(model_path);
  auto data = load_dataset(data_path);
  const std::size_t n = csim_dataset_size(data.get());
  std::vector<double> scores(n);
  double pcc = 0.0;
  check(csim_evaluate(model.get(), data.get(), &pcc, scores.data()));
  std::printf("pcc\t%.6f\n", pcc);
  std::printf("id\tgold\tscore\n");
  for (std::size_t i = 0; i < n; ++i) {
    double gold = 0.0;
    csim_dataset_gold(data.get(), i, &gold);
    std::printf("%s\t%.6g\t%.6f\n", csim_dataset_pair_id(data.get(), i), gold, scores[i]);
  }
  return 0;
}

int run_score(const std::string& model_path, const std::string& data_path) {
  auto model = load_model(model_path);
  auto data = load_dataset(data_path);
  std::vector<double> scores(csim_dataset_size(data.get()));
  check(csim_score(model.get(), data.get(), scores.data()));
  for (double s : scores) std::printf("%.6f\n", s);
  return 0;
}

// ---- gradcheck -------------------------------------------------------------

void gradcheck_row(const char* tensor, double err, void*) {
  std::printf("%s\t%.3e\t%s\n", tensor, err, err < 1e-4 ? "ok" : "FAIL");
}

int run_gradcheck(csim_loss loss, std::uint64_t seed) {
  std::printf("tensor\tmax_rel_error\tstatus\n");
  double worst = 0.0;
  const csim_status s = csim_gradcheck(loss, seed, gradcheck_row, nullptr, &worst);
  std::printf("max\t%.3e\t%s\n", worst, s == CSIM_OK ? "ok" : "FAIL");
  std::fflush(stdout);
  check(s);
  return 0;
}

// ---- features --------------------------------------------------------------

int run_features(const std::string& data_path, const ResourceArgs& res,
                 std::uint64_t seed) {
  auto data = load_dataset(data_path);
  const std::size_t n = csim_dataset_size(data.get());
  const std::size_t k = csim_feature_count();
  std::vector<double> f(n * k);
  const auto paths = res.paths();
  check(csim_features(data.get(), &paths, seed, f.data()));
  std::printf("id");
  for (std::size_t j = 1; j <= k; ++j) std::printf("\tf%zu", j);
  std::printf("\n");
  for (std::size_t i = 0; i < n; ++i) {
    std::printf("%s", csim_dataset_pair_id(data.get(), i));
    for (std::size_t j = 0; j < k; ++j) std::printf("\t%.6f", f[i * k + j]);
    std::printf("\n");
  }
  return 0;
}

// ---- split / synth ---------------------------------------------------------

int run_split(const std::string& data_path, std::uint64_t seed,
              const std::string& train_out, const std::string& val_out) {
  auto data = load_dataset(data_path);
  csim_dataset* t = nullptr;
  csim_dataset* v = nullptr;
  check(csim_dataset_split(data.get(), seed, &t, &v));
  DatasetPtr train(t), val(v);
  check(csim_dataset_save(train.get(), train_out.c_str()));
  check(csim_dataset_save(val.get(), val_out.c_str()));
  std::printf("train\t%zu\nvalidation\t%zu\n", csim_dataset_size(train.get()),
              csim_dataset_size(val.get()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"csim: attentive-GRU semantic textual similarity"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(csim_version()));

  TrainArgs ta;
  csim_train_config_default(&ta.config);
  auto* train = app.add_subcommand("train", "train a model; epoch reports go to stdout");
  train->add_option("--train", ta.train, "labeled training pairs")->required();
  train->add_option("--val", ta.val, "labeled validation pairs")->required();
  add_resource_options(train, ta.res, false);
  train->add_option("--loss", ta.config.loss, "training objective")
      ->transform(CLI::CheckedTransformer(kLosses, CLI::ignore_case))
      ->capture_default_str();
  train->add_option("--dim", ta.config.embedding_dim, "embedding dimension")->capture_default_str();
  train->add_option("--hidden", ta.config.hidden, "GRU hidden size")->capture_default_str();
  train->add_option("--attention", ta.config.attention, "attention width (0: hidden)");
  train->add_option("--mlp", ta.config.mlp, "scorer hidden width (0: hidden)");
  train->add_option("--batch", ta.config.batch_size, "mini-batch size")->capture_default_str();
  train->add_option("--epochs", ta.config.epochs, "training epochs")->capture_default_str();
  train->add_option("--lr", ta.config.learning_rate, "initial learning rate")->capture_default_str();
  train->add_option("--lr-halve-every", ta.config.lr_halve_every,
                    "halve the rate after this many epochs (0: never)")
      ->capture_default_str();
  train->add_option("--seed", ta.config.seed, "random seed")->capture_default_str();
  train->add_option("--init", ta.init, "wi: pretrained vectors, ri: random")
      ->check(CLI::IsMember({"wi", "ri"}, CLI::ignore_case))
      ->capture_default_str();
  train->add_flag("--untied-encoders", ta.config.untied_encoders,
                  "separate encoders for the two sentences");
  train->add_option("--out", ta.out, "model file; the best epoch goes to OUT.best")->required();

  std::string model_path, data_path;
  auto* eval = app.add_subcommand("eval", "PCC and per-pair scores on labeled data");
  eval->add_option("--model", model_path)->required();
  eval->add_option("--data", data_path)->required();

  auto* score = app.add_subcommand("score", "one score per line for unlabeled data");
  score->add_option("--model", model_path)->required();
  score->add_option("--data", data_path)->required();

  csim_loss gc_loss = CSIM_LOSS_PCC;
  std::uint64_t seed = 1;
  auto* gc = app.add_subcommand("gradcheck", "finite-difference check of every tensor");
  gc->add_option("--loss", gc_loss)
      ->transform(CLI::CheckedTransformer(kLosses, CLI::ignore_case))
      ->required();
  gc->add_option("--seed", seed)->capture_default_str();

  ResourceArgs fres;
  auto* feats = app.add_subcommand("features", "surface features as TSV");
  feats->add_option("--data", data_path)->required();
  add_resource_options(feats, fres, true);
  feats->add_option("--seed", seed, "seed for rows missing from --emb")->capture_default_str();

  std::string train_out, val_out;
  auto* split = app.add_subcommand("split", "seeded 80:20 split of a dataset");
  split->add_option("--data", data_path)->required();
  split->add_option("--seed", seed)->capture_default_str();
  split->add_option("--train-out", train_out)->required();
  split->add_option("--val-out", val_out)->required();

  std::string synth_dir;
  std::size_t synth_pairs = 300, synth_dim = 8;
  auto* synth = app.add_subcommand("synth", "write a teacher-labelled synthetic corpus");
  synth->add_option("--out", synth_dir, "output directory")->required();
  synth->add_option("--pairs", synth_pairs)->capture_default_str();
  synth->add_option("--dim", synth_dim)->capture_default_str();
  synth->add_option("--seed", seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train) return run_train(ta);
    if (*eval) return run_eval(model_path, data_path);
    if (*score) return run_score(model_path, data_path);
    if (*gc) return run_gradcheck(gc_loss, seed);
    if (*feats) return run_features(data_path, fres, seed);
    if (*split) return run_split(data_path, seed, train_out, val_out);
    if (*synth) {
      check(csim_synthesize(synth_dir.c_str(), synth_pairs, synth_dim, seed));
      return 0;
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kExitUsage;
}
