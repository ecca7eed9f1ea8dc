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

#ifndef CSIM_CORPUS_HPP_
#define CSIM_CORPUS_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "numkit.hpp"

namespace csim {

using Tokens = std::vector<std::string>;

struct SentencePair {
  std::string id;
  Tokens tokens1;
  Tokens tokens2;
  std::optional<double> gold;

  bool operator==(const SentencePair&) const = default;
};

inline constexpr double kMinScore = 0.0;
inline constexpr double kMaxScore = 5.0;

// Lowercase (ASCII), split on whitespace, and peel trailing punctuation off
// each word into single-character tokens ("guitar." -> "guitar", ".").
Tokens tokenize(std::string_view sentence);

// Lines are `score<TAB>s1<TAB>s2` or `s1<TAB>s2`; blank lines are skipped and
// CRLF endings accepted. Pair ids are 1-based line numbers. `source` only
// labels error messages.
std::vector<SentencePair> parse_sts_tsv(std::istream& in,
                                        const std::string& source = "<input>");
std::vector<SentencePair> parse_sts_tsv(const std::string& path);

// Inverse of parse_sts_tsv up to tokenization: tokens are joined by spaces and
// the gold is written in shortest round-trip form.
void write_sts_tsv(std::ostream& out, const std::vector<SentencePair>& pairs);

class Vocabulary {
 public:
  static constexpr std::size_t kUnk = 0;
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();

  // Adds every token of every pair, in first-seen order.
  static Vocabulary build(const std::vector<SentencePair>& pairs);
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  std::size_t add(const std::string& token);
  std::size_t lookup(const std::string& token) const;
  bool contains(const std::string& token) const;
  const std::string& token(std::size_t index) const { return tokens_.at(index); }
  // Includes the UNK row.
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  std::vector<std::size_t> encode(const Tokens& tokens) const;
  std::size_t oov_count(const SentencePair& pair) const;

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> tokens_;
};

enum class EmbeddingOrigin { kRandom, kPretrained };

struct EmbeddingTable {
  std::size_t dim = 0;
  Matrix<float> vectors;  // vocab.size() x dim, row 0 is UNK
  EmbeddingOrigin origin = EmbeddingOrigin::kRandom;
  std::size_t loaded_rows = 0;  // rows copied from a pretrained file

  std::span<const float> row(std::size_t index) const {
    return vectors.row(index);
  }
};

inline constexpr double kEmbeddingInitScale = 0.05;

EmbeddingTable random_embeddings(const Vocabulary& vocab, std::size_t dim,
                                 std::uint64_t seed);

// Text format: optional `count dim` header, then `token v1 .. vD` per line.
// Tokens are lowercased; the first occurrence of a token wins. Vocabulary
// rows without a vector (including UNK) are drawn uniformly in +-0.05.
EmbeddingTable load_embeddings_text(const std::string& path,
                                    const Vocabulary& vocab,
                                    std::uint64_t seed);
// word2vec binary: ASCII `count dim\n`, then per word a space-terminated token
// followed by dim little-endian float32 values. Newlines between records are
// skipped.
EmbeddingTable load_embeddings_binary(const std::string& path,
                                      const Vocabulary& vocab,
                                      std::uint64_t seed);

struct WordVectors {
  std::vector<std::string> tokens;
  Matrix<float> vectors;
};
void save_embeddings_text(const std::string& path, const WordVectors& words);
void save_embeddings_binary(const std::string& path, const WordVectors& words);

// `token<TAB>count` per line.
using FrequencyTable = std::unordered_map<std::string, double>;
FrequencyTable load_frequencies(const std::string& path);

struct DatasetSplit {
  std::vector<SentencePair> train;
  std::vector<SentencePair> validation;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kMinSplitPairs = 5;

// Fisher-Yates shuffle, then the first floor(0.8 n) pairs go to train.
DatasetSplit split_80_20(const std::vector<SentencePair>& pairs,
                         std::uint64_t seed);

// Shuffled index batches of `batch_size`; a trailing batch of one is dropped
// because correlation is undefined for a single sample.
std::vector<std::vector<std::size_t>> make_batches(std::size_t count,
                                                   std::size_t batch_size,
                                                   SeededRng& rng);

}  // namespace csim

#endif  // CSIM_CORPUS_HPP_
