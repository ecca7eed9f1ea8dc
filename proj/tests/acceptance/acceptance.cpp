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

// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Run from ctest; takes well under a minute in Release.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "features.hpp"
#include "gradcheck.hpp"
#include "objective.hpp"
#include "synthetic.hpp"
#include "trainer.hpp"
#include "../support/oracles.hpp"
#include "../unit/test_support.hpp"

namespace {

using namespace csim;
using Clock = std::chrono::steady_clock;

// Collects failed expectations; the first few are printed with the verdict.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream s;
      s.precision(10);
      s << what << ": got " << got << ", want " << want << " +- " << tol;
      failures_.push_back(s.str());
    }
  }
  void note(const std::string& n) { notes_ += (notes_.empty() ? "" : "; ") + n; }

  bool ok() const { return failures_.empty(); }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::string& notes() const { return notes_; }

 private:
  std::vector<std::string> failures_;
  std::string notes_;
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

// ---- 1 ----------------------------------------------------------------------

void table_one(Check& c) {
  const auto start = Clock::now();
  const auto to_cv = [](const std::vector<std::array<double, 6>>& rows) {
    std::vector<ClassVector<double>> out;
    for (const auto& r : rows) {
      ClassVector<double> p;
      std::copy(r.begin(), r.end(), p.begin());
      out.push_back(p);
    }
    return out;
  };
  const auto a = make_batch(to_cv(oracle::kGroupA), oracle::kGolds);
  const auto b = make_batch(to_cv(oracle::kGroupB), oracle::kGolds);
  const double want_e[] = {2.95, 3.15, 4.2, 2.0, 2.45, 2.7};
  for (std::size_t k = 0; k < 3; ++k) {
    c.near(a.y[k], want_e[k], 0.005, "E[S] group A row " + std::to_string(k));
    c.near(b.y[k], want_e[3 + k], 0.005, "E[S] group B row " + std::to_string(k));
    c.near(a.y[k], oracle::expectation(oracle::kGroupA[k]), 1e-12, "E[S] oracle A");
    c.near(b.y[k], oracle::expectation(oracle::kGroupB[k]), 1e-12, "E[S] oracle B");
  }
  c.near(batch_loss(LossKind::kMse, a), 0.455, 0.005, "MSE A");
  c.near(batch_loss(LossKind::kMse, b), 2.90, 0.005, "MSE B");
  c.near(batch_loss(LossKind::kKld, a), 1.966, 0.01, "KLD A");
  c.near(batch_loss(LossKind::kKld, b), 6.91, 0.01, "KLD B");
  c.near(-batch_loss(LossKind::kPcc, a), 0.931, 0.001, "PCC A");
  c.near(-batch_loss(LossKind::kPcc, b), 0.987, 0.001, "PCC B");
  c.near(-batch_loss(LossKind::kPcc, a), oracle::pearson(a.y, oracle::kGolds), 1e-12, "PCC A oracle");
  c.near(-batch_loss(LossKind::kPcc, b), oracle::pearson(b.y, oracle::kGolds), 1e-12, "PCC B oracle");
  const double t = seconds_since(start);
  c.expect(t < 1.0, "runtime " + fmt(t) + " s");
  c.note("MSE " + fmt(batch_loss(LossKind::kMse, a), 3) + "/" + fmt(batch_loss(LossKind::kMse, b), 3) +
         ", KLD " + fmt(batch_loss(LossKind::kKld, a), 3) + "/" + fmt(batch_loss(LossKind::kKld, b), 3) +
         ", PCC " + fmt(-batch_loss(LossKind::kPcc, a), 3) + "/" + fmt(-batch_loss(LossKind::kPcc, b), 3));
}

// ---- 2 ----------------------------------------------------------------------

void gradient_suite(Check& c) {
  const auto start = Clock::now();
  double worst = 0.0;
  for (LossKind loss : {LossKind::kNll, LossKind::kMse, LossKind::kKld, LossKind::kPcc}) {
    GradCheckSetup setup;  // H=4, D=3, batch 5
    c.expect(setup.hidden == 4 && setup.embedding == 3 && setup.batch == 5, "check dimensions");
    const auto r = gradient_check_random(17, loss, setup);
    const std::string name(loss_name(loss));
    const auto has = [&](const std::string& prefix) {
      return std::any_of(r.groups.begin(), r.groups.end(),
                         [&](const GradCheckGroup& g) { return g.name.rfind(prefix, 0) == 0; });
    };
    for (const char* part : {"embedding", "encoder.fwd.", "encoder.bwd.", "encoder.att.", "scorer.U",
                             "scorer.V"}) {
      c.expect(has(part), name + ": no gradient group " + part);
    }
    for (const auto& g : r.groups) {
      c.expect(g.max_rel_error < kGradCheckTolerance,
               name + " " + g.name + " rel error " + std::to_string(g.max_rel_error));
    }
    worst = std::max(worst, r.max_rel_error());
  }
  const double t = seconds_since(start);
  c.expect(t < 30.0, "runtime " + fmt(t) + " s");
  std::ostringstream s;
  s << "max rel error " << worst << ", " << fmt(t, 2) << " s";
  c.note(s.str());
}

// ---- 3 ----------------------------------------------------------------------

void pcc_invariance(Check& c) {
  SeededRng rng(303);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng.index(30);
    Batch<double> base;
    base.p.assign(n, ClassVector<double>{});
    for (std::size_t i = 0; i < n; ++i) {
      base.y.push_back(rng.uniform(0, 5));
      base.gold.push_back(rng.uniform(0, 5));
    }
    const double a = 10.0 * (1.0 - rng.uniform01());  // (0, 10]
    const double b = rng.uniform(-5, 5);
    Batch<double> pos = base, neg = base;
    for (std::size_t i = 0; i < n; ++i) {
      pos.y[i] = a * base.y[i] + b;
      neg.y[i] = -a * base.y[i] + b;
    }
    const double l = batch_loss(LossKind::kPcc, base);
    const double lp = batch_loss(LossKind::kPcc, pos);
    const double ln = batch_loss(LossKind::kPcc, neg);
    worst = std::max({worst, std::abs(lp - l), std::abs(ln + l)});
    c.expect(std::abs(lp - l) < 1e-9, "trial " + std::to_string(trial) + " positive scale");
    c.expect(std::abs(ln + l) < 1e-9, "trial " + std::to_string(trial) + " sign flip");
    c.near(l, -oracle::pearson(base.y, base.gold), 1e-12, "oracle");
  }
  std::ostringstream s;
  s << "max deviation " << worst;
  c.note(s.str());
}

// ---- 4 ----------------------------------------------------------------------

void gold_contract(Check& c) {
  SeededRng rng(404);
  for (int trial = 0; trial < 1000; ++trial) {
    const double g = trial == 0 ? 0.0 : trial == 1 ? 5.0 : rng.uniform(0, 5);
    const auto p = gold_distribution(g);
    double sum = 0.0, mean = 0.0;
    std::vector<int> nonzero;
    for (int i = 0; i < 6; ++i) {
      c.expect(p[i] >= 0.0, "negative mass");
      sum += p[i];
      mean += i * p[i];
      if (p[i] != 0.0) nonzero.push_back(i);
    }
    c.near(sum, 1.0, 1e-12, "simplex sum for " + std::to_string(g));
    c.expect(nonzero.size() >= 1 && nonzero.size() <= 2, "support size for " + std::to_string(g));
    if (nonzero.size() == 2) c.expect(nonzero[1] == nonzero[0] + 1, "non-adjacent support");
    c.near(mean, g, 1e-12, "mean");
  }
  int equal = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.index(8);
    std::vector<ClassVector<double>> p(n);
    std::vector<double> gold(n);
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> z(6);
      for (auto& v : z) v = rng.uniform(-5, 5);
      const auto s = softmax(z);
      std::copy(s.begin(), s.end(), p[k].begin());
      gold[k] = double(rng.index(6));
    }
    const auto batch = make_batch(p, gold);
    const double kld = batch_loss(LossKind::kKld, batch), nll = batch_loss(LossKind::kNll, batch);
    c.expect(kld == nll, "KLD != NLL on integer golds");
    equal += kld == nll;
  }
  c.note("1000 golds; KLD == NLL on " + std::to_string(equal) + "/200 integer batches");
}

// ---- 5 ----------------------------------------------------------------------

void overfit(Check& c) {
  const auto start = Clock::now();
  SyntheticSpec spec;
  spec.pairs = 50;
  spec.seed = 1;
  const auto data = generate_synthetic(spec);
  TrainConfig config;
  config.loss = LossKind::kPcc;
  config.hidden = 16;
  config.embedding_dim = 8;
  config.epochs = 200;
  config.batch_size = 10;
  config.learning_rate = 5e-3;
  config.lr_halve_every = 0;
  config.seed = 1;
  const auto r = train(config, data.pairs, data.pairs,
                       synthetic_resources(data, EmbeddingOrigin::kPretrained, 1));
  const double pcc = r.reports.back().train_pcc;
  const double t = seconds_since(start);
  c.expect(pcc >= 0.95, "train PCC " + fmt(pcc));
  c.expect(t < 120.0, "runtime " + fmt(t) + " s");
  c.note("train PCC " + fmt(pcc) + " after 200 epochs in " + fmt(t, 2) + " s");
}

// ---- 6 ----------------------------------------------------------------------

double median3(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

void objective_ordering(Check& c) {
  std::vector<double> by_loss[3];
  const LossKind losses[] = {LossKind::kPcc, LossKind::kMse, LossKind::kKld};
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    SyntheticSpec spec;
    spec.pairs = 300;
    spec.seed = 100 + seed;
    const auto data = generate_synthetic(spec);
    const auto resources = synthetic_resources(data, EmbeddingOrigin::kRandom, seed);
    const auto split = split_80_20(data.pairs, seed);
    for (int k = 0; k < 3; ++k) {
      TrainConfig config;
      config.loss = losses[k];
      config.hidden = 16;
      config.embedding_dim = 8;
      config.batch_size = 25;
      config.learning_rate = 5e-3;
      config.lr_halve_every = 5;
      config.epochs = 15;
      config.init = EmbeddingOrigin::kRandom;
      config.seed = seed;
      const auto r = train(config, split.train, split.validation, resources);
      by_loss[k].push_back(r.reports.back().val_pcc);
    }
  }
  const double pcc = median3(by_loss[0]), mse = median3(by_loss[1]), kld = median3(by_loss[2]);
  c.expect(pcc >= mse, "PCC-trained median " + fmt(pcc) + " < MSE-trained " + fmt(mse));
  c.expect(mse >= kld, "MSE-trained median " + fmt(mse) + " < KLD-trained " + fmt(kld));
  c.note("median val PCC: pcc " + fmt(pcc) + ", mse " + fmt(mse) + ", kld " + fmt(kld));
}

// ---- 7 ----------------------------------------------------------------------

void feature_oracle(Check& c) {
  SeededRng rng(707);
  const std::vector<std::string> words{"w0", "w1", "w2", "w3", "w4", "w5"};
  int agree = 0;
  for (int instance = 0; instance < 500; ++instance) {
    const Vocabulary vocab = Vocabulary::from_tokens(words);
    Matrix<float> vectors = init_uniform<float>(vocab.size(), 2, 1.0, rng);
    if (instance % 5 == 0) {
      const auto src = vectors.row(1);
      std::copy(src.begin(), src.end(), vectors.row(2).begin());
    }
    FrequencyTable freq;
    for (const auto& w : words) freq[w] = 1.0 + double(rng.index(50));
    Tokens a, b;
    for (std::size_t i = 0, n = 1 + rng.index(4); i < n; ++i) a.push_back(words[rng.index(6)]);
    for (std::size_t i = 0, n = 1 + rng.index(4); i < n; ++i) b.push_back(words[rng.index(6)]);
    const double got = greedy_alignment(a, b, EmbeddingView{vocab, vectors}, InformationContent(freq));
    const double want = oracle::alignment(a, b, vocab, vectors, freq);
    const bool same = std::abs(got - want) <= 1e-12;
    c.expect(same, "alignment instance " + std::to_string(instance));
    agree += same;
  }

  std::vector<std::string> pool;
  for (int k = 0; k < 12; ++k) pool.push_back("t" + std::to_string(k));
  const Vocabulary vocab = Vocabulary::from_tokens({pool.begin(), pool.end() - 2});
  const Matrix<float> vectors = init_uniform<float>(vocab.size(), 3, 1.0, rng);
  FrequencyTable freq;
  for (const auto& w : pool) freq[w] = 1.0 + double(rng.index(100));
  const InformationContent ic(freq);
  WordSimilarityProvider sims;
  for (int k = 0; k < 20; ++k) sims.set(pool[rng.index(12)], pool[rng.index(12)], rng.uniform01(), rng.uniform01());
  int bad = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    SentencePair p{"x", {}, {}, std::nullopt};
    for (std::size_t i = 0, n = 1 + rng.index(6); i < n; ++i) p.tokens1.push_back(pool[rng.index(12)]);
    for (std::size_t i = 0, n = 1 + rng.index(6); i < n; ++i) p.tokens2.push_back(pool[rng.index(12)]);
    SentencePair q = p;
    std::swap(q.tokens1, q.tokens2);
    const auto f = extract_features(p, EmbeddingView{vocab, vectors}, ic, sims);
    const auto g = extract_features(q, EmbeddingView{vocab, vectors}, ic, sims);
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      if (!(f[k] >= 0.0 && f[k] <= 1.0 && std::abs(f[k] - g[k]) <= 1e-9)) ++bad;
    }
  }
  c.expect(bad == 0, std::to_string(bad) + " asymmetric or out-of-range feature values");
  c.note("alignment " + std::to_string(agree) + "/500, feature violations " + std::to_string(bad) + "/80000");
}

// ---- 8 ----------------------------------------------------------------------

void determinism(Check& c) {
  testing::TempDir dir;
  SyntheticSpec spec;
  spec.pairs = 120;
  spec.seed = 8;
  const auto data = generate_synthetic(spec);
  const auto resources = synthetic_resources(data, EmbeddingOrigin::kPretrained, 8);
  const auto s1 = split_80_20(data.pairs, 8);
  const auto s2 = split_80_20(data.pairs, 8);
  const auto ids = [](const std::vector<SentencePair>& v) {
    std::vector<std::string> out;
    for (const auto& p : v) out.push_back(p.id);
    return out;
  };
  c.expect(ids(s1.train) == ids(s2.train) && ids(s1.validation) == ids(s2.validation),
           "split membership differs between runs");
  // Same split after a write and re-read of the corpus.
  {
    std::ofstream out(dir.file("data.tsv"));
    write_sts_tsv(out, data.pairs);
  }
  const auto s3 = split_80_20(parse_sts_tsv(dir.file("data.tsv")), 8);
  c.expect(ids(s3.train) == ids(s1.train), "split membership differs after reload");
  c.expect(s1.train.size() == 96 && s1.validation.size() == 24, "80:20 sizes");

  TrainConfig config;
  config.hidden = 8;
  config.embedding_dim = 8;
  config.batch_size = 16;
  config.epochs = 4;
  config.learning_rate = 5e-3;
  config.seed = 8;
  save_bundle(train(config, s1.train, s1.validation, resources).final_bundle, dir.file("a.csim"));
  save_bundle(train(config, s2.train, s2.validation, resources).final_bundle, dir.file("b.csim"));
  const auto a = testing::read_bytes(dir.file("a.csim"));
  const auto b = testing::read_bytes(dir.file("b.csim"));
  c.expect(!a.empty() && a == b, "model files differ for the same seed");

  const auto before = train(config, s1.train, s1.validation, resources).final_bundle;
  const auto after = load_bundle(dir.file("a.csim"));
  const auto e1 = evaluate(before, s1.validation), e2 = evaluate(after, s1.validation);
  c.expect(e1.scores == e2.scores && e1.pcc == e2.pcc, "scores changed after save/load");
  c.note(std::to_string(a.size()) + "-byte model files identical; val PCC " + fmt(e2.pcc));
}

// ---- 9 ----------------------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = "'" CSIM_CLI_PATH "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void data_plumbing(Check& c) {
  const std::string fx = CSIM_FIXTURE_DIR;
  const Vocabulary vocab = Vocabulary::from_tokens({"the", "cat", "sat", "mat", "dog"});
  const auto t = load_embeddings_text(fx + "/dual.txt", vocab, 1);
  const auto b = load_embeddings_binary(fx + "/dual.bin", vocab, 1);
  c.expect(t.vectors.same_shape(b.vectors), "shapes differ");
  c.expect(t.loaded_rows == 4 && b.loaded_rows == 4, "expected four loaded rows");
  c.expect(t.vectors.size() == b.vectors.size() &&
               std::memcmp(t.vectors.values().data(), b.vectors.values().data(),
                           t.vectors.size() * sizeof(float)) == 0,
           "text and binary tables differ bit-wise");

  const auto category_of = [](const std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.category();
    }
    return ErrorCategory::kContract;  // no error at all is wrong here too
  };
  int cases = 0;
  for (const char* name : {"score_out_of_range.tsv", "score_not_number.tsv", "too_many_fields.tsv",
                           "empty_sentence.tsv"}) {
    const std::string path = fx + "/" + name;
    c.expect(category_of([&] { parse_sts_tsv(path); }) == ErrorCategory::kData, std::string(name) + " category");
    c.expect(run_cli("features --data '" + path + "' --emb '" + fx + "/dual.txt'") == 2,
             std::string(name) + " exit code");
    ++cases;
  }
  for (const char* name : {"truncated.bin", "count_zero.bin", "header_only.bin"}) {
    const std::string path = fx + "/" + name;
    c.expect(category_of([&] { load_embeddings_binary(path, vocab, 1); }) == ErrorCategory::kData,
             std::string(name) + " category");
    c.expect(run_cli("features --data '" + fx + "/good.tsv' --emb '" + path + "' --emb-format bin") == 2,
             std::string(name) + " exit code");
    ++cases;
  }
  {
    const std::string path = fx + "/dim_mismatch.txt";
    c.expect(category_of([&] { load_embeddings_text(path, vocab, 1); }) == ErrorCategory::kData,
             "dim_mismatch.txt category");
    c.expect(run_cli("features --data '" + fx + "/good.tsv' --emb '" + path + "'") == 2,
             "dim_mismatch.txt exit code");
    ++cases;
  }
  {
    const std::string path = fx + "/freq_bad.tsv";
    c.expect(category_of([&] { load_frequencies(path); }) == ErrorCategory::kData, "freq_bad.tsv category");
    c.expect(run_cli("features --data '" + fx + "/good.tsv' --emb '" + fx + "/dual.txt' --freq '" + path + "'") == 2,
             "freq_bad.tsv exit code");
    ++cases;
  }
  c.expect(run_cli("features --data '" + fx + "/good.tsv' --emb '" + fx + "/dual.bin' --emb-format bin") == 0,
           "well-formed fixture rejected");
  c.note("dual fixture bit-identical; " + std::to_string(cases) + " malformed fixtures exit 2");
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    void (*run)(Check&);
  };
  const Criterion criteria[] = {
      {"worked loss example", table_one},
      {"gradient check, all losses", gradient_suite},
      {"PCC loss affine invariance", pcc_invariance},
      {"gold distribution contract", gold_contract},
      {"overfit capacity", overfit},
      {"objective ordering", objective_ordering},
      {"feature oracle", feature_oracle},
      {"determinism and persistence", determinism},
      {"data plumbing", data_plumbing},
  };
  int failed = 0;
  int index = 0;
  for (const auto& criterion : criteria) {
    ++index;
    Check check;
    try {
      criterion.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    std::cout << (check.ok() ? "PASS" : "FAIL") << "  " << index << ". " << criterion.name;
    if (!check.notes().empty()) std::cout << " (" << check.notes() << ")";
    std::cout << "\n";
    const auto& f = check.failures();
    for (std::size_t k = 0; k < std::min<std::size_t>(f.size(), 5); ++k) std::cout << "      " << f[k] << "\n";
    if (f.size() > 5) std::cout << "      ... " << f.size() - 5 << " more\n";
    failed += !check.ok();
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << (9 - failed) << "/9\n";
  return failed ? 1 : 0;
}
