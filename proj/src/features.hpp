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

#ifndef CSIM_FEATURES_HPP_
#define CSIM_FEATURES_HPP_

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "corpus.hpp"

namespace csim {

inline constexpr std::size_t kFeatureCount = 8;

// Order: unigram, bigram and trigram overlap; PathLen and Lin soft overlap;
// IC-weighted embedding cosine; greedy alignment coverage; length ratio.
using FeatureVector = std::array<double, kFeatureCount>;

enum class WordMeasure { kPathLen, kLin };

// Precomputed knowledge-based word similarities. Pairs missing from the table
// fall back to exact match.
class WordSimilarityProvider {
 public:
  WordSimilarityProvider() = default;

  // Values must lie in [0, 1]; the pair is stored symmetrically.
  void set(const std::string& a, const std::string& b, double pathlen,
           double lin);
  double similarity(const std::string& a, const std::string& b,
                    WordMeasure measure) const;
  std::size_t size() const noexcept { return table_.size(); }

  struct Entry {
    std::string a, b;
    double pathlen, lin;
  };
  // Canonical (a <= b) entries in sorted order.
  std::vector<Entry> entries() const;

 private:
  std::map<std::pair<std::string, std::string>, std::pair<double, double>>
      table_;
};

// `w1<TAB>w2<TAB>pathlen<TAB>lin` per line.
WordSimilarityProvider load_word_similarities(const std::string& path);

// ic(w) = ln(total / freq(w)); unseen tokens count as frequency 1.
class InformationContent {
 public:
  InformationContent() = default;
  explicit InformationContent(FrequencyTable frequencies);

  double ic(const std::string& token) const;
  double total() const noexcept { return total_; }
  const FrequencyTable& frequencies() const noexcept { return freq_; }

 private:
  FrequencyTable freq_;
  double total_ = 0.0;
};

double ngram_overlap(const Tokens& a, const Tokens& b, std::size_t n);

double soft_overlap(const Tokens& a, const Tokens& b, WordMeasure measure,
                    const WordSimilarityProvider& provider);

// Lookup of a token's embedding through the vocabulary, UNK for OOV.
struct EmbeddingView {
  const Vocabulary& vocab;
  const Matrix<float>& vectors;

  std::span<const float> operator()(const std::string& token) const {
    return vectors.row(vocab.lookup(token));
  }
};

double weighted_cosine(const Tokens& a, const Tokens& b,
                       const EmbeddingView& emb, const InformationContent& ic);

inline constexpr double kAlignmentThreshold = 0.5;

double greedy_alignment(const Tokens& a, const Tokens& b,
                        const EmbeddingView& emb, const InformationContent& ic,
                        double threshold = kAlignmentThreshold);

double cosine(std::span<const float> a, std::span<const float> b);

FeatureVector extract_features(const SentencePair& pair,
                               const EmbeddingView& emb,
                               const InformationContent& ic,
                               const WordSimilarityProvider& provider);

}  // namespace csim

#endif  // CSIM_FEATURES_HPP_
