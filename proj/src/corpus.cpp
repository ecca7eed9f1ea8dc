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

#include "corpus.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace csim {
namespace {

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_float(std::string_view s, float& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_size(std::string_view s, std::size_t& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string at_line(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

std::ifstream open_input(const std::string& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return in;
}

// Fills every row of the table that was not copied from a file.
EmbeddingTable finish_table(const Vocabulary& vocab, std::size_t dim,
                            std::vector<bool> filled, Matrix<float> vectors,
                            std::size_t loaded, std::uint64_t seed,
                            const std::string& path) {
  if (loaded == 0) {
    throw FormatError("'" + path +
                      "' contains no vectors for any vocabulary token");
  }
  SeededRng rng(seed);
  const Matrix<float> fallback =
      init_uniform<float>(vocab.size(), dim, kEmbeddingInitScale, rng);
  for (std::size_t r = 0; r < vocab.size(); ++r) {
    if (filled[r]) continue;
    auto dst = vectors.row(r);
    auto src = fallback.row(r);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  EmbeddingTable table;
  table.dim = dim;
  table.vectors = std::move(vectors);
  table.origin = EmbeddingOrigin::kPretrained;
  table.loaded_rows = loaded;
  return table;
}

}  // namespace

Tokens tokenize(std::string_view sentence) {
  Tokens out;
  for (auto word : split_spaces(sentence)) {
    std::string w = lowercase(word);
    std::vector<std::string> tail;
    while (w.size() > 1 && is_punct(w.back())) {
      tail.emplace_back(1, w.back());
      w.pop_back();
    }
    out.push_back(std::move(w));
    out.insert(out.end(), tail.rbegin(), tail.rend());
  }
  return out;
}

std::vector<SentencePair> parse_sts_tsv(std::istream& in,
                                        const std::string& source) {
  std::vector<SentencePair> pairs;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;

    const auto fields = split_tabs(line);
    SentencePair pair;
    pair.id = std::to_string(line_no);
    std::string_view s1, s2;
    if (fields.size() == 3) {
      double score = 0.0;
      if (!parse_double(fields[0], score)) {
        throw FormatError(at_line(source, line_no) + "malformed score '" +
                          std::string(fields[0]) + "'");
      }
      if (!(score >= kMinScore && score <= kMaxScore)) {
        throw RangeError(at_line(source, line_no) + "score " +
                         std::string(trim(fields[0])) +
                         " outside [0, 5]");
      }
      pair.gold = score;
      s1 = fields[1];
      s2 = fields[2];
    } else if (fields.size() == 2) {
      s1 = fields[0];
      s2 = fields[1];
    } else {
      throw FormatError(at_line(source, line_no) + "expected 2 or 3 tab-separated fields, got " +
                        std::to_string(fields.size()));
    }
    pair.tokens1 = tokenize(s1);
    pair.tokens2 = tokenize(s2);
    if (pair.tokens1.empty() || pair.tokens2.empty()) {
      throw FormatError(at_line(source, line_no) + "empty sentence");
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::vector<SentencePair> parse_sts_tsv(const std::string& path) {
  auto in = open_input(path, std::ios::in);
  return parse_sts_tsv(in, path);
}

void write_sts_tsv(std::ostream& out, const std::vector<SentencePair>& pairs) {
  auto join = [](const Tokens& t) {
    std::string s;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) s += ' ';
      s += t[i];
    }
    return s;
  };
  for (const auto& p : pairs) {
    if (p.gold) {
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof(buf), *p.gold);
      out << std::string_view(buf, res.ptr - buf) << '\t';
    }
    out << join(p.tokens1) << '\t' << join(p.tokens2) << '\n';
  }
}

Vocabulary::Vocabulary() { tokens_.emplace_back(kUnkToken); }

Vocabulary Vocabulary::build(const std::vector<SentencePair>& pairs) {
  Vocabulary v;
  for (const auto& p : pairs) {
    for (const auto& t : p.tokens1) v.add(t);
    for (const auto& t : p.tokens2) v.add(t);
  }
  return v;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  Vocabulary v;
  for (const auto& t : tokens) v.add(t);
  return v;
}

std::size_t Vocabulary::add(const std::string& token) {
  if (token == kUnkToken) return kUnk;
  const auto [it, inserted] = index_.try_emplace(token, tokens_.size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

std::size_t Vocabulary::lookup(const std::string& token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
  return index_.count(token) != 0;
}

std::vector<std::size_t> Vocabulary::encode(const Tokens& tokens) const {
  std::vector<std::size_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(lookup(t));
  return ids;
}

std::size_t Vocabulary::oov_count(const SentencePair& pair) const {
  std::size_t n = 0;
  for (const auto& t : pair.tokens1) n += lookup(t) == kUnk;
  for (const auto& t : pair.tokens2) n += lookup(t) == kUnk;
  return n;
}

EmbeddingTable random_embeddings(const Vocabulary& vocab, std::size_t dim,
                                 std::uint64_t seed) {
  if (dim == 0) throw ConfigError("embedding dimension must be positive");
  SeededRng rng(seed);
  EmbeddingTable table;
  table.dim = dim;
  table.vectors = init_uniform<float>(vocab.size(), dim, kEmbeddingInitScale, rng);
  table.origin = EmbeddingOrigin::kRandom;
  return table;
}

EmbeddingTable load_embeddings_text(const std::string& path,
                                    const Vocabulary& vocab,
                                    std::uint64_t seed) {
  auto in = open_input(path, std::ios::in);
  std::string raw;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  std::size_t records = 0;
  std::size_t loaded = 0;
  std::vector<bool> filled(vocab.size(), false);
  Matrix<float> vectors;
  std::vector<float> values;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto fields = split_spaces(line);
    if (fields.empty()) continue;
    if (line_no == 1 && fields.size() == 2) {
      std::size_t count = 0, header_dim = 0;
      if (parse_size(fields[0], count) && parse_size(fields[1], header_dim)) {
        if (header_dim == 0) {
          throw FormatError(at_line(path, line_no) + "header dimension is 0");
        }
        dim = header_dim;
        continue;
      }
    }
    const std::size_t line_dim = fields.size() - 1;
    if (line_dim == 0) {
      throw FormatError(at_line(path, line_no) + "token without vector");
    }
    if (dim == 0) dim = line_dim;
    if (line_dim != dim) {
      throw FormatError(at_line(path, line_no) + "vector has dimension " +
                        std::to_string(line_dim) + ", expected " +
                        std::to_string(dim));
    }
    if (vectors.empty()) vectors = Matrix<float>(vocab.size(), dim);
    values.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!parse_float(fields[k + 1], values[k]) || !std::isfinite(values[k])) {
        throw FormatError(at_line(path, line_no) + "bad vector component '" +
                          std::string(fields[k + 1]) + "'");
      }
    }
    ++records;
    const std::string token = lowercase(fields[0]);
    if (!vocab.contains(token)) continue;
    const std::size_t r = vocab.lookup(token);
    if (filled[r]) continue;
    std::copy(values.begin(), values.end(), vectors.row(r).begin());
    filled[r] = true;
    ++loaded;
  }
  if (records == 0) throw FormatError("'" + path + "' contains no vectors");
  return finish_table(vocab, dim, std::move(filled), std::move(vectors),
                      loaded, seed, path);
}

EmbeddingTable load_embeddings_binary(const std::string& path,
                                      const Vocabulary& vocab,
                                      std::uint64_t seed) {
  auto in = open_input(path, std::ios::in | std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  const auto fail = [&](const std::string& what) -> FormatError {
    return FormatError("'" + path + "' at byte " + std::to_string(pos) + ": " +
                       what);
  };

  const auto newline = bytes.find('\n');
  if (newline == std::string::npos) throw fail("missing header line");
  const auto header = split_spaces(std::string_view(bytes).substr(0, newline));
  std::size_t count = 0, dim = 0;
  if (header.size() != 2 || !parse_size(header[0], count) ||
      !parse_size(header[1], dim)) {
    throw fail("header must be 'count dim'");
  }
  if (count == 0) throw fail("header declares zero vectors");
  if (dim == 0) throw fail("header declares dimension 0");
  pos = newline + 1;

  Matrix<float> vectors(vocab.size(), dim);
  std::vector<bool> filled(vocab.size(), false);
  std::vector<float> values(dim);
  std::size_t loaded = 0;
  for (std::size_t rec = 0; rec < count; ++rec) {
    while (pos < bytes.size() && (bytes[pos] == '\n' || bytes[pos] == '\r')) {
      ++pos;
    }
    const auto space = bytes.find(' ', pos);
    if (space == std::string::npos) {
      throw fail("truncated token in record " + std::to_string(rec + 1) +
                 " of " + std::to_string(count));
    }
    const std::string token = lowercase(std::string_view(bytes).substr(pos, space - pos));
    if (token.empty()) throw fail("empty token");
    pos = space + 1;
    if (bytes.size() - pos < dim * 4) {
      throw fail("truncated vector in record " + std::to_string(rec + 1) +
                 " of " + std::to_string(count));
    }
    for (std::size_t k = 0; k < dim; ++k) {
      std::uint32_t u = 0;
      for (int b = 0; b < 4; ++b) {
        u |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + b]))
             << (8 * b);
      }
      values[k] = std::bit_cast<float>(u);
      if (!std::isfinite(values[k])) throw fail("non-finite vector component");
      pos += 4;
    }
    if (!vocab.contains(token)) continue;
    const std::size_t r = vocab.lookup(token);
    if (filled[r]) continue;
    std::copy(values.begin(), values.end(), vectors.row(r).begin());
    filled[r] = true;
    ++loaded;
  }
  return finish_table(vocab, dim, std::move(filled), std::move(vectors),
                      loaded, seed, path);
}

void save_embeddings_text(const std::string& path, const WordVectors& words) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << words.tokens.size() << ' ' << words.vectors.cols() << '\n';
  char buf[64];
  for (std::size_t r = 0; r < words.tokens.size(); ++r) {
    out << words.tokens[r];
    for (float v : words.vectors.row(r)) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), v);
      out << ' ' << std::string_view(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

void save_embeddings_binary(const std::string& path, const WordVectors& words) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << words.tokens.size() << ' ' << words.vectors.cols() << '\n';
  for (std::size_t r = 0; r < words.tokens.size(); ++r) {
    out << words.tokens[r] << ' ';
    for (float v : words.vectors.row(r)) {
      const auto u = std::bit_cast<std::uint32_t>(v);
      for (int b = 0; b < 4; ++b) out.put(static_cast<char>((u >> (8 * b)) & 0xff));
    }
    out << '\n';
  }
}

FrequencyTable load_frequencies(const std::string& path) {
  auto in = open_input(path, std::ios::in);
  FrequencyTable table;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    const auto fields = split_tabs(line);
    double count = 0.0;
    if (fields.size() != 2 || !parse_double(fields[1], count)) {
      throw FormatError(at_line(path, line_no) + "expected 'token<TAB>count'");
    }
    if (!(count > 0.0) || !std::isfinite(count)) {
      throw RangeError(at_line(path, line_no) + "count must be positive");
    }
    table[lowercase(trim(fields[0]))] += count;
  }
  return table;
}

DatasetSplit split_80_20(const std::vector<SentencePair>& pairs,
                         std::uint64_t seed) {
  if (pairs.size() < kMinSplitPairs) {
    throw ConfigError("need at least " + std::to_string(kMinSplitPairs) +
                      " pairs to split, got " + std::to_string(pairs.size()));
  }
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SeededRng rng(seed);
  rng.shuffle(order.begin(), order.end());
  const std::size_t n_train = pairs.size() * 4 / 5;
  DatasetSplit split;
  split.seed = seed;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? split.train : split.validation).push_back(pairs[order[i]]);
  }
  return split;
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t count,
                                                   std::size_t batch_size,
                                                   SeededRng& rng) {
  if (batch_size < 2) {
    throw ConfigError("batch size must be at least 2, got " +
                      std::to_string(batch_size));
  }
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  rng.shuffle(order.begin(), order.end());
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < count; start += batch_size) {
    const std::size_t end = std::min(count, start + batch_size);
    if (end - start < 2) break;
    out.emplace_back(order.begin() + start, order.begin() + end);
  }
  return out;
}

}  // namespace csim
