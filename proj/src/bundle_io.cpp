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

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <fstream>
#include <iterator>
#include <map>

#include "json.hpp"
#include "trainer.hpp"

namespace csim {
namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'C', 'S', 'I', 'M'};
constexpr const char* kFeatureEmbedding = "features.embedding";

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

std::uint32_t crc32_of(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()),
            static_cast<uInt>(bytes.size())));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  std::string_view take(std::size_t n) {
    if (remaining() < n) {
      throw FormatError("model file truncated at byte " + std::to_string(pos_));
    }
    const auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint32_t u32() {
    const auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    }
    return v;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

json config_to_json(const TrainConfig& c) {
  return json{
      {"loss", std::string(loss_name(c.loss))},
      {"batch_size", c.batch_size},
      {"epochs", c.epochs},
      {"learning_rate", c.learning_rate},
      {"lr_halve_every", c.lr_halve_every},
      {"embedding_dim", c.embedding_dim},
      {"hidden", c.hidden},
      {"attention", c.attention},
      {"mlp", c.mlp},
      {"seed", c.seed},
      {"init", c.init == EmbeddingOrigin::kPretrained ? "wi" : "ri"},
      {"untied_encoders", c.untied_encoders},
  };
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  const auto loss = parse_loss(j.at("loss").get<std::string>());
  if (!loss) throw FormatError("model file names an unknown loss");
  c.loss = *loss;
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.lr_halve_every = j.at("lr_halve_every").get<std::size_t>();
  c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.attention = j.at("attention").get<std::size_t>();
  c.mlp = j.at("mlp").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.init = j.at("init").get<std::string>() == "wi" ? EmbeddingOrigin::kPretrained
                                                   : EmbeddingOrigin::kRandom;
  c.untied_encoders = j.at("untied_encoders").get<bool>();
  return c;
}

void put_record(std::string& out, const std::string& name, const Matrix<float>& m) {
  put_u32(out, static_cast<std::uint32_t>(name.size()));
  out += name;
  put_u32(out, 2);
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (float v : m.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
}

}  // namespace

std::string serialize_bundle(const ModelBundle& bundle) {
  json meta;
  meta["config"] = config_to_json(bundle.config);
  meta["vocab"] = std::vector<std::string>(bundle.vocab.tokens().begin() + 1,
                                           bundle.vocab.tokens().end());
  std::vector<std::pair<std::string, double>> freq(bundle.ic.frequencies().begin(),
                                                   bundle.ic.frequencies().end());
  std::sort(freq.begin(), freq.end());
  meta["frequencies"] = json::array();
  for (const auto& [t, c] : freq) meta["frequencies"].push_back({t, c});
  meta["similarities"] = json::array();
  for (const auto& e : bundle.sims.entries()) {
    meta["similarities"].push_back({e.a, e.b, e.pathlen, e.lin});
  }
  const std::string meta_text = meta.dump();

  std::string out(kMagic, 4);
  put_u32(out, ModelBundle::kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(meta_text.size()));
  out += meta_text;
  bundle.model.for_each([&](const std::string& name, const Matrix<float>& m) {
    put_record(out, name, m);
  });
  put_record(out, kFeatureEmbedding, bundle.feature_embedding);
  put_u32(out, crc32_of(out));
  return out;
}

ModelBundle deserialize_bundle(const std::string& bytes) {
  if (bytes.size() < 16 || std::string_view(bytes).substr(0, 4) != std::string_view(kMagic, 4)) {
    throw FormatError("not a csim model file");
  }
  const std::string_view body = std::string_view(bytes).substr(0, bytes.size() - 4);
  Reader tail(std::string_view(bytes).substr(bytes.size() - 4));
  if (tail.u32() != crc32_of(body)) {
    throw FormatError("model file checksum mismatch (corrupt or truncated)");
  }

  Reader in(body);
  in.take(4);
  const std::uint32_t version = in.u32();
  if (version != ModelBundle::kFormatVersion) {
    throw FormatError("unsupported model format version " + std::to_string(version) +
                      " (expected " + std::to_string(ModelBundle::kFormatVersion) + ")");
  }
  const std::uint32_t meta_len = in.u32();
  json meta;
  try {
    meta = json::parse(in.take(meta_len));
  } catch (const json::exception& e) {
    throw FormatError(std::string("model file config block: ") + e.what());
  }

  ModelBundle b;
  FrequencyTable freq;
  try {
    b.config = config_from_json(meta.at("config"));
    b.vocab = Vocabulary::from_tokens(meta.at("vocab").get<std::vector<std::string>>());
    for (const auto& f : meta.at("frequencies")) {
      freq[f.at(0).get<std::string>()] = f.at(1).get<double>();
    }
    for (const auto& s : meta.at("similarities")) {
      b.sims.set(s.at(0).get<std::string>(), s.at(1).get<std::string>(),
                 s.at(2).get<double>(), s.at(3).get<double>());
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("model file config block: ") + e.what());
  }
  b.ic = InformationContent(std::move(freq));

  std::map<std::string, Matrix<float>> records;
  while (in.remaining() > 0) {
    const std::uint32_t name_len = in.u32();
    std::string name(in.take(name_len));
    const std::uint32_t rank = in.u32();
    if (rank != 2) throw FormatError("record " + name + " has rank " + std::to_string(rank));
    const std::size_t rows = in.u32();
    const std::size_t cols = in.u32();
    if (in.remaining() / 4 < rows * cols) {
      throw FormatError("record " + name + " truncated at byte " +
                        std::to_string(in.position()));
    }
    std::vector<float> values(rows * cols);
    for (auto& v : values) v = std::bit_cast<float>(in.u32());
    if (!records.emplace(name, Matrix<float>(rows, cols, std::move(values))).second) {
      throw FormatError("duplicate record " + name);
    }
  }

  SeededRng unused(0);
  b.model = Model<float>::random(b.config.dims(b.vocab.size()), unused);
  std::size_t used = 0;
  b.model.for_each([&](const std::string& name, Matrix<float>& m) {
    const auto it = records.find(name);
    if (it == records.end()) throw FormatError("model file lacks record " + name);
    if (!it->second.same_shape(m)) {
      throw FormatError("record " + name + " has shape " + it->second.shape() +
                        ", expected " + m.shape());
    }
    m = std::move(it->second);
    ++used;
  });
  const auto fe = records.find(kFeatureEmbedding);
  if (fe == records.end() || !fe->second.same_shape(b.model.embedding)) {
    throw FormatError("model file lacks a matching feature embedding");
  }
  b.feature_embedding = std::move(fe->second);
  if (used + 1 != records.size()) throw FormatError("model file has unknown records");
  return b;
}

void save_bundle(const ModelBundle& bundle, const std::string& path) {
  const std::string bytes = serialize_bundle(bundle);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing '" + path + "'");
}

ModelBundle load_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return deserialize_bundle(bytes);
}

}  // namespace csim
