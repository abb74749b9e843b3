// Copyright 2026 The citetrend Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "citetrend/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "citetrend/error.hpp"
#include "json.hpp"

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace citetrend {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'C', 'T', 'R', 'D'};

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::kCheckpointFormat, what); }

template <class T>
T field(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

class Writer {
 public:
  void raw(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void str(std::string_view s) {
    u64(s.size());
    raw(s.data(), s.size());
  }
  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string bytes) : buf_(std::move(bytes)) {}
  void raw(void* p, std::size_t n) {
    if (n > buf_.size() - pos_) bad("checkpoint is truncated");
    std::memcpy(p, buf_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, sizeof v);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    raw(&v, sizeof v);
    return v;
  }
  std::string str() {
    const std::uint64_t n = u64();
    if (n > buf_.size() - pos_) bad("checkpoint is truncated");
    std::string s(buf_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == buf_.size(); }

 private:
  std::string buf_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_json(const nn::ModelConfig& c) {
  json j = {{"text_width", c.text_width},
            {"affiliation_width", c.affiliation_width},
            {"year_width", c.year_width},
            {"text_units", c.text_units},
            {"affiliation_units", c.affiliation_units},
            {"year_units", c.year_units},
            {"hidden_units", c.hidden_units},
            {"output_units", c.output_units},
            {"dropout", c.dropout},
            {"leaky_slope", c.leaky_slope},
            {"seed", c.seed}};
  return j.dump();
}

nn::ModelConfig model_config_from_json(const std::string& text) {
  nn::ModelConfig c;
  try {
    const json j = json::parse(text);
    c.text_width = field(j, "text_width", c.text_width);
    c.affiliation_width = field(j, "affiliation_width", c.affiliation_width);
    c.year_width = field(j, "year_width", c.year_width);
    c.text_units = field(j, "text_units", c.text_units);
    c.affiliation_units = field(j, "affiliation_units", c.affiliation_units);
    c.year_units = field(j, "year_units", c.year_units);
    c.hidden_units = field(j, "hidden_units", c.hidden_units);
    c.output_units = field(j, "output_units", c.output_units);
    c.dropout = field(j, "dropout", c.dropout);
    c.leaky_slope = field(j, "leaky_slope", c.leaky_slope);
    c.seed = field(j, "seed", c.seed);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string("model config: ") + e.what());
  }
  return c;
}

std::string to_json(const TrainConfig& c, int target_year) {
  json j = {{"epochs", c.epochs},
            {"learning_rate", c.learning_rate},
            {"weight_decay", c.weight_decay},
            {"dropout", c.dropout},
            {"leaky_slope", c.leaky_slope},
            {"percentile", c.percentile},
            {"window_years", c.window_years},
            {"seed", c.seed},
            {"pos_weight_mode", c.pos_weight_mode == PosWeightMode::kFixed ? "fixed" : "auto"},
            {"fixed_pos_weight", c.fixed_pos_weight},
            {"max_text_features", c.features.max_text_features},
            {"max_affiliation_features", c.features.max_affiliation_features},
            {"target_year", target_year}};
  return j.dump();
}

TrainConfig train_config_from_json(const std::string& text, int* target_year) {
  TrainConfig c;
  try {
    const json j = json::parse(text);
    c.epochs = field(j, "epochs", c.epochs);
    c.learning_rate = field(j, "learning_rate", c.learning_rate);
    c.weight_decay = field(j, "weight_decay", c.weight_decay);
    c.dropout = field(j, "dropout", c.dropout);
    c.leaky_slope = field(j, "leaky_slope", c.leaky_slope);
    c.percentile = field(j, "percentile", c.percentile);
    c.window_years = field(j, "window_years", c.window_years);
    c.seed = field(j, "seed", c.seed);
    const std::string mode = field<std::string>(j, "pos_weight_mode", "auto");
    if (mode != "auto" && mode != "fixed") {
      throw Error(ErrorKind::kParseError, "pos_weight_mode must be auto or fixed");
    }
    c.pos_weight_mode = mode == "fixed" ? PosWeightMode::kFixed : PosWeightMode::kAuto;
    c.fixed_pos_weight = field(j, "fixed_pos_weight", c.fixed_pos_weight);
    c.features.max_text_features = field(j, "max_text_features", c.features.max_text_features);
    c.features.max_affiliation_features = field(j, "max_affiliation_features", c.features.max_affiliation_features);
    if (target_year) *target_year = field(j, "target_year", 0);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string("train config: ") + e.what());
  }
  return c;
}

std::uint64_t Checkpoint::config_hash() const {
  return fnv1a(to_json(train, target_year), fnv1a(to_json(model)));
}

Checkpoint capture(const nn::NodeClassifier& model, const TrainConfig& train, int target_year) {
  Checkpoint c;
  c.kind = std::string(model.kind());
  c.model = model.config();
  c.train = train;
  c.target_year = target_year;
  for (const ad::Parameter* p : model.parameters()) c.parameters.emplace_back(p->name, p->value);
  return c;
}

void restore(const Checkpoint& ckpt, nn::NodeClassifier& model) {
  if (model.kind() != ckpt.kind) bad("checkpoint holds a " + ckpt.kind + " model");
  auto params = model.parameters();
  if (params.size() != ckpt.parameters.size()) bad("parameter count differs from model");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& [name, value] = ckpt.parameters[i];
    if (params[i]->name != name || !params[i]->value.same_shape(value)) {
      bad("parameter " + std::to_string(i) + " (" + name + ") does not match model");
    }
    params[i]->value = value;
    params[i]->zero_grad();
  }
}

std::unique_ptr<nn::NodeClassifier> instantiate(const Checkpoint& ckpt) {
  auto model = nn::make_model(ckpt.kind, ckpt.model);
  restore(ckpt, *model);
  return model;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);
  w.str(ckpt.kind);
  const std::string model_json = to_json(ckpt.model);
  const std::string train_json = to_json(ckpt.train, ckpt.target_year);
  w.str(model_json);
  w.str(train_json);
  w.u64(fnv1a(train_json, fnv1a(model_json)));
  w.u64(ckpt.model.seed);
  w.u64(ckpt.parameters.size());
  for (const auto& [name, value] : ckpt.parameters) {
    w.str(name);
    w.u64(value.rows());
    w.u64(value.cols());
    w.raw(value.data().data(), value.size() * sizeof(double));
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorKind::kIoError, "cannot write " + path.string());
  os.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!os) throw Error(ErrorKind::kIoError, "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::kIoError, "cannot read " + path.string());
  Reader r(std::string(std::istreambuf_iterator<char>(is), {}));

  char magic[4];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) bad("not a checkpoint file: " + path.string());
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) bad("unsupported checkpoint version " + std::to_string(version));

  Checkpoint c;
  c.kind = r.str();
  const std::string model_json = r.str();
  const std::string train_json = r.str();
  if (r.u64() != fnv1a(train_json, fnv1a(model_json))) bad("config hash mismatch");
  c.model = model_config_from_json(model_json);
  c.train = train_config_from_json(train_json, &c.target_year);
  if (r.u64() != c.model.seed) bad("seed does not match the stored config");
  const std::uint64_t count = r.u64();
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = r.str();
    const std::uint64_t rows = r.u64(), cols = r.u64();
    if (cols != 0 && rows > (std::uint64_t{1} << 40) / cols) bad("implausible tensor shape for " + name);
    Tensor t(rows, cols);
    r.raw(t.data().data(), t.size() * sizeof(double));
    c.parameters.emplace_back(std::move(name), std::move(t));
  }
  if (!r.done()) bad("trailing bytes after parameters");
  return c;
}

}  // namespace citetrend
