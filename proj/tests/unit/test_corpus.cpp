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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>

#include "corpus.hpp"
#include "errors.hpp"
#include "test_support.hpp"

namespace csim {
namespace {

using testing::TempDir;

const std::string kFixtures = CSIM_FIXTURE_DIR;

std::vector<SentencePair> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_sts_tsv(in, "mem");
}

template <typename E>
std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const E& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected exception";
  return {};
}

TEST(Tokenize, LowercasesAndPeelsTrailingPunctuation) {
  EXPECT_EQ(tokenize("A man plays Guitar."), (Tokens{"a", "man", "plays", "guitar", "."}));
  EXPECT_EQ(tokenize("  Really?!  yes  "), (Tokens{"really", "?", "!", "yes"}));
  EXPECT_EQ(tokenize("..."), (Tokens{".", ".", "."}));
  EXPECT_EQ(tokenize("..."), (Tokens{".", ".", "."}));
}

TEST(ParseSts, IdentityPair) {
  const auto pairs = parse("5.0\tA man plays guitar\tA man plays guitar\n");
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].gold, 5.0);
  EXPECT_EQ(pairs[0].tokens1.size(), 4u);
  EXPECT_EQ(pairs[0].tokens2.size(), 4u);
  EXPECT_EQ(pairs[0].id, "1");
}

TEST(ParseSts, DirectParse) {
  const auto pairs = parse("2.5\tA dog runs\tA cat sits\n");
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].gold, 2.5);
  EXPECT_EQ(pairs[0].tokens2, (Tokens{"a", "cat", "sits"}));
}

TEST(ParseSts, UnlabeledBlankLinesAndCrlf) {
  const auto pairs = parse("a b\tc d\r\n\r\n\n3\tx\ty\r\n");
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_FALSE(pairs[0].gold.has_value());
  EXPECT_EQ(pairs[1].id, "4");
  EXPECT_EQ(pairs[1].gold, 3.0);
  EXPECT_EQ(pairs[1].tokens2, (Tokens{"y"}));
}

TEST(ParseSts, ScoreOutOfRangeNamesLine) {
  const auto what = error_text<RangeError>([] { parse("6.0\t a \t b\n"); });
  EXPECT_NE(what.find("mem:1"), std::string::npos) << what;
}

TEST(ParseSts, MalformedLinesNameLine) {
  EXPECT_NE(error_text<FormatError>([] { parse("1\ta\tb\nzz\ta\tb\n"); }).find("mem:2"),
            std::string::npos);
  EXPECT_NE(error_text<FormatError>([] { parse("1\ta\tb\tc\n"); }).find("mem:1"),
            std::string::npos);
  EXPECT_NE(error_text<FormatError>([] { parse("onlyone\n"); }).find("mem:1"),
            std::string::npos);
  EXPECT_NE(error_text<FormatError>([] { parse("1\t \tb\n"); }).find("mem:1"),
            std::string::npos);
  EXPECT_THROW(parse("nan\ta\tb\n"), Error);
}

TEST(ParseSts, FixturesRaiseDataErrors) {
  for (const char* name : {"score_out_of_range.tsv", "score_not_number.tsv",
                           "too_many_fields.tsv", "empty_sentence.tsv"}) {
    try {
      parse_sts_tsv(kFixtures + "/" + name);
      ADD_FAILURE() << name << " parsed";
    } catch (const Error& e) {
      EXPECT_EQ(e.category(), ErrorCategory::kData) << name;
      EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
    }
  }
  EXPECT_THROW(parse_sts_tsv(kFixtures + "/does-not-exist.tsv"), FormatError);
}

TEST(ParseSts, RoundTrip) {
  const auto pairs = parse_sts_tsv(kFixtures + "/good.tsv");
  ASSERT_EQ(pairs.size(), 6u);
  std::ostringstream out;
  write_sts_tsv(out, pairs);
  const auto again = parse(out.str());
  ASSERT_EQ(again.size(), pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(again[i].tokens1, pairs[i].tokens1);
    EXPECT_EQ(again[i].tokens2, pairs[i].tokens2);
    EXPECT_EQ(again[i].gold, pairs[i].gold);
  }
}

TEST(ParseSts, RoundTripAwkwardGolds) {
  std::vector<SentencePair> pairs;
  for (double g : {0.1, 1.0 / 3.0, 4.999999999999, 0.0, 5.0, 2.2250738585072014e-308}) {
    pairs.push_back({"x", {"a"}, {"b"}, g});
  }
  std::ostringstream out;
  write_sts_tsv(out, pairs);
  const auto again = parse(out.str());
  for (std::size_t i = 0; i < pairs.size(); ++i) EXPECT_EQ(again[i].gold, pairs[i].gold);
}

TEST(Vocabulary, UnkAndLookup) {
  const auto pairs = parse("1\tthe cat\tthe dog\n");
  const auto v = Vocabulary::build(pairs);
  EXPECT_EQ(v.size(), 4u);
  EXPECT_EQ(v.lookup("the"), 1u);
  EXPECT_EQ(v.lookup("dog"), 3u);
  EXPECT_EQ(v.lookup("zebra"), Vocabulary::kUnk);
  EXPECT_EQ(v.token(0), Vocabulary::kUnkToken);
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_EQ(v.lookup(v.token(i)), i);
}

TEST(Vocabulary, OovCountBounded) {
  const auto v = Vocabulary::from_tokens({"a", "b"});
  const SentencePair p{"1", {"a", "x", "y"}, {"b", "b", "z"}, 1.0};
  EXPECT_EQ(v.oov_count(p), 3u);
  const SentencePair q{"2", {"a"}, {"b"}, 1.0};
  EXPECT_EQ(v.oov_count(q), 0u);
}

TEST(Embeddings, TextCopiesRowsExactly) {
  TempDir dir;
  const auto path = dir.write("e.txt", "2 3\nfoo 0.5 -1 2.25\nbar 1e-3 0 7\n");
  const auto vocab = Vocabulary::from_tokens({"foo", "bar"});
  const auto t = load_embeddings_text(path, vocab, 1);
  EXPECT_EQ(t.dim, 3u);
  EXPECT_EQ(t.origin, EmbeddingOrigin::kPretrained);
  EXPECT_EQ(t.loaded_rows, 2u);
  const auto foo = t.row(vocab.lookup("foo"));
  EXPECT_EQ(foo[0], 0.5f);
  EXPECT_EQ(foo[1], -1.0f);
  EXPECT_EQ(foo[2], 2.25f);
  EXPECT_EQ(t.row(vocab.lookup("bar"))[0], 1e-3f);
}

TEST(Embeddings, HeaderlessTextAccepted) {
  TempDir dir;
  const auto path = dir.write("e.txt", "foo 1 2\n");
  const auto t = load_embeddings_text(path, Vocabulary::from_tokens({"foo"}), 1);
  EXPECT_EQ(t.dim, 2u);
  EXPECT_EQ(t.row(1)[1], 2.0f);
}

TEST(Embeddings, MissingWordsDrawnFromSeededUniform) {
  TempDir dir;
  const auto path = dir.write("e.txt", "1 3\nfoo 1 2 3\n");
  const auto vocab = Vocabulary::from_tokens({"foo", "missing"});
  const auto a = load_embeddings_text(path, vocab, 9);
  const auto b = load_embeddings_text(path, vocab, 9);
  EXPECT_EQ(a.vectors, b.vectors);
  EXPECT_EQ(a.loaded_rows, 1u);
  for (std::size_t r : {std::size_t{0}, vocab.lookup("missing")}) {
    for (float v : a.row(r)) {
      EXPECT_LE(std::abs(v), kEmbeddingInitScale);
    }
  }
  EXPECT_NE(a.row(0)[0], a.row(2)[0]);
}

TEST(Embeddings, DimensionChangeNamesLine) {
  const auto vocab = Vocabulary::from_tokens({"the", "cat"});
  const auto what = error_text<FormatError>(
      [&] { load_embeddings_text(kFixtures + "/dim_mismatch.txt", vocab, 1); });
  EXPECT_NE(what.find(":2"), std::string::npos) << what;
}

TEST(Embeddings, NoUsableVectors) {
  TempDir dir;
  const auto vocab = Vocabulary::from_tokens({"zebra"});
  EXPECT_THROW(load_embeddings_text(dir.write("a.txt", ""), vocab, 1), FormatError);
  EXPECT_THROW(load_embeddings_text(dir.write("b.txt", "foo 1 2\n"), vocab, 1), FormatError);
}

// Both fixtures were written independently of the library from one float32
// table; the text twin carries 9 significant digits.
TEST(Embeddings, BinaryAndTextAgreeBitForBit) {
  const auto vocab = Vocabulary::from_tokens({"the", "cat", "sat", "mat", "absent"});
  const auto txt = load_embeddings_text(kFixtures + "/dual.txt", vocab, 5);
  const auto bin = load_embeddings_binary(kFixtures + "/dual.bin", vocab, 5);
  ASSERT_EQ(txt.vectors.size(), bin.vectors.size());
  EXPECT_EQ(std::memcmp(txt.vectors.values().data(), bin.vectors.values().data(),
                        txt.vectors.size() * sizeof(float)),
            0);
  EXPECT_EQ(txt.loaded_rows, 4u);
  EXPECT_EQ(bin.loaded_rows, 4u);
  EXPECT_EQ(bin.row(vocab.lookup("cat"))[3], -2.5f);
  EXPECT_EQ(bin.row(vocab.lookup("mat"))[3], 0.3f);  // "Mat" in the file
}

TEST(Embeddings, BinaryErrors) {
  const auto vocab = Vocabulary::from_tokens({"the", "cat"});
  EXPECT_THROW(load_embeddings_binary(kFixtures + "/count_zero.bin", vocab, 1), FormatError);
  EXPECT_THROW(load_embeddings_binary(kFixtures + "/header_only.bin", vocab, 1), FormatError);
  const auto what = error_text<FormatError>(
      [&] { load_embeddings_binary(kFixtures + "/truncated.bin", vocab, 1); });
  // 4-byte header + "the " + 16 bytes + "\n" + "cat " puts the cut at byte 29.
  EXPECT_NE(what.find("byte 29"), std::string::npos) << what;
}

TEST(Embeddings, SaveLoadRoundTripBothFormats) {
  TempDir dir;
  SeededRng rng(4);
  WordVectors words;
  words.tokens = {"alpha", "beta", "gamma"};
  words.vectors = init_uniform<float>(3, 5, 3.0, rng);
  save_embeddings_text(dir.file("w.txt"), words);
  save_embeddings_binary(dir.file("w.bin"), words);
  const auto vocab = Vocabulary::from_tokens(words.tokens);
  const auto t = load_embeddings_text(dir.file("w.txt"), vocab, 1);
  const auto b = load_embeddings_binary(dir.file("w.bin"), vocab, 1);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto row = words.vectors.row(k);
    EXPECT_TRUE(std::equal(row.begin(), row.end(), t.row(k + 1).begin()));
    EXPECT_TRUE(std::equal(row.begin(), row.end(), b.row(k + 1).begin()));
  }
}

TEST(Embeddings, FirstOccurrenceWins) {
  TempDir dir;
  const auto path = dir.write("e.txt", "Foo 1 1\nfoo 2 2\n");
  const auto t = load_embeddings_text(path, Vocabulary::from_tokens({"foo"}), 1);
  EXPECT_EQ(t.row(1)[0], 1.0f);
}

TEST(Frequencies, LoadAndReject) {
  const auto f = load_frequencies(kFixtures + "/freq.tsv");
  EXPECT_EQ(f.at("the"), 1000.0);
  EXPECT_THROW(load_frequencies(kFixtures + "/freq_bad.tsv"), FormatError);
}

std::vector<SentencePair> numbered(std::size_t n) {
  std::vector<SentencePair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    pairs.push_back({std::to_string(i), {"a"}, {"b"}, 1.0});
  }
  return pairs;
}

std::set<std::string> ids(const std::vector<SentencePair>& pairs) {
  std::set<std::string> out;
  for (const auto& p : pairs) out.insert(p.id);
  return out;
}

TEST(Split, TenPairs) {
  const auto s = split_80_20(numbered(10), 3);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.validation.size(), 2u);
}

TEST(Split, LargeCorpusCounts) {
  const auto s = split_80_20(numbered(28002), 1);
  EXPECT_EQ(s.train.size(), 22401u);
  EXPECT_EQ(s.validation.size(), 5601u);
}

TEST(Split, PartitionAndDeterminism) {
  const auto pairs = numbered(97);
  const auto a = split_80_20(pairs, 17), b = split_80_20(pairs, 17), c = split_80_20(pairs, 18);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.validation, b.validation);
  EXPECT_NE(ids(a.validation), ids(c.validation));
  auto all = ids(a.train);
  for (const auto& id : ids(a.validation)) EXPECT_TRUE(all.insert(id).second) << id;
  EXPECT_EQ(all, ids(pairs));
}

TEST(Split, TooFewPairs) {
  EXPECT_THROW(split_80_20(numbered(4), 1), ConfigError);
}

std::vector<std::size_t> sizes(const std::vector<std::vector<std::size_t>>& batches) {
  std::vector<std::size_t> out;
  for (const auto& b : batches) out.push_back(b.size());
  return out;
}

TEST(Batches, SizesAndDropRule) {
  SeededRng rng(1);
  EXPECT_EQ(sizes(make_batches(250, 125, rng)), (std::vector<std::size_t>{125, 125}));
  EXPECT_EQ(sizes(make_batches(251, 125, rng)), (std::vector<std::size_t>{125, 125}));
  EXPECT_EQ(sizes(make_batches(130, 125, rng)), (std::vector<std::size_t>{125, 5}));
  EXPECT_THROW(make_batches(10, 1, rng), ConfigError);
}

TEST(Batches, ReshuffledPermutation) {
  SeededRng rng(8);
  const auto first = make_batches(40, 40, rng);
  const auto second = make_batches(40, 40, rng);
  auto sorted = first[0];
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_NE(first[0], second[0]);
}

}  // namespace
}  // namespace csim
