// Copyright 2026 The WSDC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wsdc/serialize.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <vector>

#include "wsdc/errors.hpp"

namespace wsdc {

namespace {

constexpr char kMagic[4] = {'W', 'S', 'D', 'C'};

void put_u32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string* out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string* out, double d) {
  uint64_t bits;
  std::memcpy(&bits, &d, sizeof(bits));
  put_u64(out, bits);
}

class Reader {
 public:
  Reader(const uint8_t* data, size_t size) : data_(data), size_(size) {}

  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() {
    const uint64_t bits = u64();
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    return d;
  }
  std::string bytes(size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == size_; }

 private:
  void need(size_t n) const {
    if (pos_ + n > size_) throw ArtifactError("model container truncated");
  }
  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
};

void append_block(std::string* out, const std::string& name,
                  const double* data, uint64_t count) {
  put_u32(out, static_cast<uint32_t>(name.size()));
  out->append(name);
  put_u64(out, count);
  for (uint64_t i = 0; i < count; ++i) put_f64(out, data[i]);
}

int init_id(const std::string& name) {
  return static_cast<int>(codebook_init_from_string(name));
}

std::vector<double> pack_meta(const ModelState& state) {
  const TrainConfig& c = state.cfg;
  std::vector<double> m;
  m.push_back(c.K);
  m.push_back(c.D);
  m.push_back(c.Q);
  m.push_back(c.alpha);
  m.push_back(c.lambda);
  m.push_back(c.eps);
  m.push_back(c.snr_train_db);
  m.push_back(c.epochs);
  m.push_back(c.batch_size);
  m.push_back(c.learning_rate);
  m.push_back(static_cast<double>(c.seed & 0xffffffffULL));
  m.push_back(static_cast<double>(c.seed >> 32));
  m.push_back(c.channel_in_loop ? 1.0 : 0.0);
  m.push_back(c.gaussian_std);
  m.push_back(c.n_gauss);
  m.push_back(c.per_q_targets ? 1.0 : 0.0);
  m.push_back(c.per_q_logits ? 1.0 : 0.0);
  m.push_back(c.commitment_weight);
  m.push_back(init_id(c.init));
  m.push_back(state.input_dim);
  m.push_back(state.n_classes);
  m.push_back(static_cast<double>(state.step));
  m.push_back(c.dataset.type == "cifar10" ? 1.0 : 0.0);
  m.push_back(c.dataset.n_classes);
  m.push_back(c.dataset.dim);
  m.push_back(c.dataset.separation);
  m.push_back(c.dataset.n_per_class);
  m.push_back(c.dataset.limit);
  m.push_back(static_cast<double>(c.hidden.size()));
  for (int h : c.hidden) m.push_back(h);
  return m;
}

ModelState unpack_meta(const std::vector<double>& m) {
  if (m.size() < 29) throw ArtifactError("model meta block too short");
  size_t i = 0;
  TrainConfig c;
  c.K = static_cast<int>(m[i++]);
  c.D = static_cast<int>(m[i++]);
  c.Q = static_cast<int>(m[i++]);
  c.alpha = m[i++];
  c.lambda = m[i++];
  c.eps = m[i++];
  c.snr_train_db = m[i++];
  c.epochs = static_cast<int>(m[i++]);
  c.batch_size = static_cast<int>(m[i++]);
  c.learning_rate = m[i++];
  const uint64_t seed_lo = static_cast<uint64_t>(m[i++]);
  const uint64_t seed_hi = static_cast<uint64_t>(m[i++]);
  c.seed = seed_lo | (seed_hi << 32);
  c.channel_in_loop = m[i++] != 0.0;
  c.gaussian_std = m[i++];
  c.n_gauss = static_cast<int>(m[i++]);
  c.per_q_targets = m[i++] != 0.0;
  c.per_q_logits = m[i++] != 0.0;
  c.commitment_weight = m[i++];
  c.init = to_string(static_cast<CodebookInit>(static_cast<int>(m[i++])));
  const int input_dim = static_cast<int>(m[i++]);
  const int n_classes = static_cast<int>(m[i++]);
  const int64_t step = static_cast<int64_t>(m[i++]);
  c.dataset.type = m[i++] != 0.0 ? "cifar10" : "gmm";
  c.dataset.n_classes = static_cast<int>(m[i++]);
  c.dataset.dim = static_cast<int>(m[i++]);
  c.dataset.separation = m[i++];
  c.dataset.n_per_class = static_cast<int>(m[i++]);
  c.dataset.limit = static_cast<int>(m[i++]);
  const size_t n_hidden = static_cast<size_t>(m[i++]);
  if (m.size() != i + n_hidden) throw ArtifactError("model meta block size mismatch");
  c.hidden.clear();
  for (size_t h = 0; h < n_hidden; ++h) c.hidden.push_back(static_cast<int>(m[i++]));

  ModelState state = make_model(c, input_dim, n_classes);
  state.step = step;
  return state;
}

}  // namespace

void save_model(const ModelState& state, const std::string& path) {
  std::string out;
  out.append(kMagic, 4);
  put_u32(&out, kModelFormatVersion);

  const std::vector<double> meta = pack_meta(state);
  append_block(&out, "meta", meta.data(), meta.size());

  // param_views only mutates through the views, never the state layout.
  auto views = param_views(const_cast<ModelState&>(state));
  for (const auto& v : views) {
    append_block(&out, v.name, v.data, static_cast<uint64_t>(v.size));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ArtifactError("cannot open model file for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw ArtifactError("failed writing model file: " + path);
}

ModelState load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ArtifactError("cannot open model file: " + path);
  const std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());

  Reader r(bytes.data(), bytes.size());
  if (r.bytes(4) != std::string(kMagic, 4)) {
    throw ArtifactError("bad model magic (expected 'WSDC'): " + path);
  }
  const uint32_t version = r.u32();
  if (version != kModelFormatVersion) {
    throw ArtifactError("unsupported model format version " +
                        std::to_string(version));
  }

  std::map<std::string, std::vector<double>> blocks;
  std::vector<std::string> block_order;
  while (!r.done()) {
    const uint32_t name_len = r.u32();
    const std::string name = r.bytes(name_len);
    const uint64_t count = r.u64();
    std::vector<double> data(count);
    for (uint64_t i = 0; i < count; ++i) data[i] = r.f64();
    blocks.emplace(name, std::move(data));
    block_order.push_back(name);
  }
  if (blocks.find("meta") == blocks.end()) {
    throw ArtifactError("model container missing meta block");
  }

  ModelState state = unpack_meta(blocks.at("meta"));
  for (auto& view : param_views(state)) {
    auto it = blocks.find(view.name);
    if (it == blocks.end()) {
      throw ArtifactError("model container missing block '" + view.name + "'");
    }
    if (static_cast<Eigen::Index>(it->second.size()) != view.size) {
      throw ArtifactError("model block '" + view.name + "' has wrong size");
    }
    std::memcpy(view.data, it->second.data(), sizeof(double) * it->second.size());
  }
  return state;
}

}  // namespace wsdc
