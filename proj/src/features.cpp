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

#include "features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <tuple>

namespace csim {
namespace {

double harmonic_mean(double x, double y) {
  if (x <= 0.0 || y <= 0.0) return 0.0;
  return 2.0 * x * y / (x + y);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

std::set<std::string> ngram_set(const Tokens& tokens, std::size_t n) {
  std::set<std::string> out;
  if (tokens.size() < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    out.insert(std::move(key));
  }
  return out;
}

std::vector<double> sentence_vector(const Tokens& tokens,
                                    const EmbeddingView& emb,
                                    const InformationContent& ic) {
  std::vector<double> v(emb.vectors.cols(), 0.0);
  for (const auto& t : tokens) {
    const double w = ic.ic(t);
    const auto row = emb(t);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += w * row[k];
  }
  return v;
}

double parse_unit(std::string_view s, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError(where + "malformed similarity '" + std::string(s) + "'");
  }
  if (!(v >= 0.0 && v <= 1.0)) {
    throw RangeError(where + "similarity " + std::string(s) +
                     " outside [0, 1]");
  }
  return v;
}

}  // namespace

void WordSimilarityProvider::set(const std::string& a, const std::string& b,
                                 double pathlen, double lin) {
  if (!(pathlen >= 0.0 && pathlen <= 1.0) || !(lin >= 0.0 && lin <= 1.0)) {
    throw RangeError("word similarity for '" + a + "'/'" + b +
                     "' outside [0, 1]");
  }
  auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
  table_[std::move(key)] = {pathlen, lin};
}

double WordSimilarityProvider::similarity(const std::string& a,
                                          const std::string& b,
                                          WordMeasure measure) const {
  if (a == b) return 1.0;
  const auto it = table_.find(a <= b ? std::make_pair(a, b) : std::make_pair(b, a));
  if (it == table_.end()) return 0.0;
  return measure == WordMeasure::kPathLen ? it->second.first
                                          : it->second.second;
}

std::vector<WordSimilarityProvider::Entry> WordSimilarityProvider::entries()
    const {
  std::vector<Entry> out;
  out.reserve(table_.size());
  for (const auto& [k, v] : table_) out.push_back({k.first, k.second, v.first, v.second});
  return out;
}

WordSimilarityProvider load_word_similarities(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  WordSimilarityProvider provider;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no) + ": ";
    std::vector<std::string_view> fields;
    std::string_view line(raw);
    std::size_t start = 0;
    for (std::size_t tab; (tab = line.find('\t', start)) != std::string_view::npos;
         start = tab + 1) {
      fields.push_back(line.substr(start, tab - start));
    }
    fields.push_back(line.substr(start));
    if (fields.size() != 4) {
      throw FormatError(where + "expected 'w1<TAB>w2<TAB>pathlen<TAB>lin'");
    }
    const Tokens a = tokenize(fields[0]);
    const Tokens b = tokenize(fields[1]);
    if (a.size() != 1 || b.size() != 1) {
      throw FormatError(where + "each word field must hold a single token");
    }
    provider.set(a[0], b[0], parse_unit(fields[2], where),
                 parse_unit(fields[3], where));
  }
  return provider;
}

InformationContent::InformationContent(FrequencyTable frequencies)
    : freq_(std::move(frequencies)) {
  for (const auto& [token, count] : freq_) {
    if (!(count > 0.0)) {
      throw RangeError("frequency for '" + token + "' must be positive");
    }
    total_ += count;
  }
}

double InformationContent::ic(const std::string& token) const {
  // Without any counts every token carries the same weight.
  if (total_ <= 0.0) return 1.0;
  const auto it = freq_.find(token);
  const double f = it == freq_.end() ? 1.0 : it->second;
  return std::log(total_ / f);
}

double ngram_overlap(const Tokens& a, const Tokens& b, std::size_t n) {
  if (n < 1 || n > 3) {
    throw ConfigError("ngram_overlap: n must be 1, 2 or 3, got " +
                      std::to_string(n));
  }
  const auto sa = ngram_set(a, n);
  const auto sb = ngram_set(b, n);
  if (sa.empty() || sb.empty()) return 0.0;
  std::size_t shared = 0;
  for (const auto& g : sa) shared += sb.count(g);
  if (shared == 0) return 0.0;
  const double o = static_cast<double>(shared);
  return 2.0 / (static_cast<double>(sa.size()) / o +
                static_cast<double>(sb.size()) / o);
}

double soft_overlap(const Tokens& a, const Tokens& b, WordMeasure measure,
                    const WordSimilarityProvider& provider) {
  if (a.empty() || b.empty()) return 0.0;
  const auto coverage = [&](const Tokens& from, const Tokens& to) {
    double total = 0.0;
    for (const auto& w : from) {
      double best = 0.0;
      for (const auto& v : to) best = std::max(best, provider.similarity(w, v, measure));
      total += best;
    }
    return total / static_cast<double>(from.size());
  };
  return clamp01(harmonic_mean(coverage(a, b), coverage(b, a)));
}

double cosine(std::span<const float> a, std::span<const float> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += static_cast<double>(a[k]) * b[k];
    aa += static_cast<double>(a[k]) * a[k];
    bb += static_cast<double>(b[k]) * b[k];
  }
  if (aa <= 0.0 || bb <= 0.0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

double weighted_cosine(const Tokens& a, const Tokens& b,
                       const EmbeddingView& emb, const InformationContent& ic) {
  if (a.empty() || b.empty()) return 0.0;
  const auto va = sentence_vector(a, emb, ic);
  const auto vb = sentence_vector(b, emb, ic);
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t k = 0; k < va.size(); ++k) {
    ab += va[k] * vb[k];
    aa += va[k] * va[k];
    bb += vb[k] * vb[k];
  }
  const double na = std::sqrt(aa), nb = std::sqrt(bb);
  if (na < 1e-12 || nb < 1e-12) return 0.0;
  return clamp01(ab / (na * nb));
}

double greedy_alignment(const Tokens& a, const Tokens& b,
                        const EmbeddingView& emb, const InformationContent& ic,
                        double threshold) {
  if (a.empty() || b.empty()) return 0.0;
  struct Candidate {
    double sim;
    std::size_t i, j;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double s = cosine(emb(a[i]), emb(b[j]));
      if (s >= threshold) candidates.push_back({s, i, j});
    }
  }
  // Highest similarity first, ties on the smaller (i, j).
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& x, const Candidate& y) {
              if (x.sim != y.sim) return x.sim > y.sim;
              return std::tie(x.i, x.j) < std::tie(y.i, y.j);
            });

  std::vector<double> wa(a.size()), wb(b.size());
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += wa[i] = ic.ic(a[i]);
  for (std::size_t j = 0; j < b.size(); ++j) total += wb[j] = ic.ic(b[j]);
  if (!(total > 0.0)) {
    std::fill(wa.begin(), wa.end(), 1.0);
    std::fill(wb.begin(), wb.end(), 1.0);
    total = static_cast<double>(a.size() + b.size());
  }

  std::vector<bool> used_a(a.size(), false), used_b(b.size(), false);
  double aligned = 0.0;
  for (const auto& c : candidates) {
    if (used_a[c.i] || used_b[c.j]) continue;
    used_a[c.i] = used_b[c.j] = true;
    aligned += wa[c.i] + wb[c.j];
  }
  return clamp01(aligned / total);
}

FeatureVector extract_features(const SentencePair& pair,
                               const EmbeddingView& emb,
                               const InformationContent& ic,
                               const WordSimilarityProvider& provider) {
  // Canonical order so that greedy tie-breaking cannot depend on which
  // sentence came first.
  const bool swap = pair.tokens2 < pair.tokens1;
  const Tokens& a = swap ? pair.tokens2 : pair.tokens1;
  const Tokens& b = swap ? pair.tokens1 : pair.tokens2;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  return {
      ngram_overlap(a, b, 1),
      ngram_overlap(a, b, 2),
      ngram_overlap(a, b, 3),
      soft_overlap(a, b, WordMeasure::kPathLen, provider),
      soft_overlap(a, b, WordMeasure::kLin, provider),
      weighted_cosine(a, b, emb, ic),
      greedy_alignment(a, b, emb, ic),
      (na == 0.0 || nb == 0.0) ? 0.0 : std::min(na, nb) / std::max(na, nb),
  };
}

}  // namespace csim
