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

#include "wsdc/dataset.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wsdc/errors.hpp"
#include "wsdc/rng.hpp"

namespace wsdc {

namespace {
constexpr int kCifarRecordBytes = 3073;
constexpr int kCifarPixels = 3072;
constexpr int kCifarSide = 32;
constexpr int kCifarPad = 4;
}  // namespace

void Dataset::validate() const {
  if (inputs.rows() != labels.size()) {
    throw ContractError("dataset inputs/labels length mismatch");
  }
  if (!inputs.allFinite()) throw ContractError("dataset has non-finite inputs");
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes) {
      throw ContractError("dataset label out of range");
    }
  }
}

Dataset gen_gmm(int n_classes, int dim, double separation, int n_per_class,
                uint64_t seed) {
  if (n_classes < 2 || dim < 2 || n_per_class < 1 || !(separation > 0.0)) {
    std::ostringstream os;
    os << "gen_gmm: invalid sizes (n_classes=" << n_classes << ", dim=" << dim
       << ", separation=" << separation << ", n_per_class=" << n_per_class << ")";
    throw ConfigError(os.str());
  }
  if (n_classes > dim) {
    throw ConfigError("gen_gmm: n_classes must be <= dim for an orthonormal frame");
  }

  Rng rng(seed);
  Eigen::MatrixXd gauss(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) gauss(r, c) = rng.normal();
  const Eigen::MatrixXd frame =
      Eigen::HouseholderQR<Eigen::MatrixXd>(gauss).householderQ() *
      Eigen::MatrixXd::Identity(dim, n_classes);

  Dataset data;
  data.n_classes = n_classes;
  data.split = "train";
  {
    std::ostringstream os;
    os << "gmm(n_classes=" << n_classes << ",dim=" << dim << ",separation="
       << separation << ",n_per_class=" << n_per_class << ",seed=" << seed << ")";
    data.provenance = os.str();
  }
  const int n = n_classes * n_per_class;
  data.inputs.resize(n, dim);
  data.labels.resize(n);
  for (int c = 0; c < n_classes; ++c) {
    const Eigen::VectorXd mean = separation * frame.col(c);
    for (int i = 0; i < n_per_class; ++i) {
      const int row = c * n_per_class + i;
      for (int d = 0; d < dim; ++d) data.inputs(row, d) = mean[d] + rng.normal();
      data.labels[row] = c;
    }
  }
  return data;
}

namespace {

std::vector<uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("cannot open file: " + path);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

void append_records(const std::string& path, Eigen::MatrixXd* inputs,
                    std::vector<int>* labels) {
  const std::vector<uint8_t> bytes = read_file_bytes(path);
  if (bytes.empty() || bytes.size() % kCifarRecordBytes != 0) {
    std::ostringstream os;
    os << "cifar10 batch '" << path << "' has " << bytes.size()
       << " bytes, not a positive multiple of " << kCifarRecordBytes;
    throw ArtifactError(os.str());
  }
  const int n = static_cast<int>(bytes.size() / kCifarRecordBytes);
  const int base = static_cast<int>(inputs->rows());
  inputs->conservativeResize(base + n, kCifarPixels);
  for (int r = 0; r < n; ++r) {
    const uint8_t* rec = bytes.data() + static_cast<size_t>(r) * kCifarRecordBytes;
    if (rec[0] > 9) {
      std::ostringstream os;
      os << "cifar10 batch '" << path << "' record " << r << " has label byte "
         << static_cast<int>(rec[0]) << " > 9";
      throw ArtifactError(os.str());
    }
    labels->push_back(rec[0]);
    for (int p = 0; p < kCifarPixels; ++p) {
      (*inputs)(base + r, p) = rec[1 + p] / 255.0;
    }
  }
}

}  // namespace

Dataset load_cifar10_file(const std::string& path) {
  Dataset data;
  data.n_classes = 10;
  data.split = "test";
  data.provenance = "cifar10:" + path;
  data.inputs.resize(0, kCifarPixels);
  std::vector<int> labels;
  append_records(path, &data.inputs, &labels);
  data.labels = Eigen::Map<Eigen::VectorXi>(labels.data(), labels.size());
  return data;
}

Dataset load_cifar10(const std::string& dir, const std::string& split) {
  namespace fs = std::filesystem;
  if (split != "train" && split != "test") {
    throw ConfigError("load_cifar10: split must be 'train' or 'test'");
  }

  std::vector<std::string> files;
  if (split == "test") {
    files.push_back((fs::path(dir) / "test_batch.bin").string());
  } else {
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("data_batch_", 0) == 0 && name.ends_with(".bin")) {
        files.push_back(entry.path().string());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      throw ArtifactError("load_cifar10: no data_batch_*.bin files in " + dir);
    }
  }

  Dataset data;
  data.n_classes = 10;
  data.split = split;
  data.provenance = "cifar10:" + dir + ":" + split;
  data.inputs.resize(0, kCifarPixels);
  std::vector<int> labels;
  for (const auto& f : files) append_records(f, &data.inputs, &labels);
  data.labels = Eigen::Map<Eigen::VectorXi>(labels.data(), labels.size());
  return data;
}

std::vector<uint8_t> serialize_cifar_batch(const Dataset& data) {
  if (data.input_dim() != kCifarPixels) {
    throw ContractError("serialize_cifar_batch: inputs are not CIFAR-shaped");
  }
  std::vector<uint8_t> bytes;
  bytes.reserve(static_cast<size_t>(data.size()) * kCifarRecordBytes);
  for (int r = 0; r < data.size(); ++r) {
    bytes.push_back(static_cast<uint8_t>(data.labels[r]));
    for (int p = 0; p < kCifarPixels; ++p) {
      bytes.push_back(static_cast<uint8_t>(std::llround(data.inputs(r, p) * 255.0)));
    }
  }
  return bytes;
}

namespace {

inline int reflect(int coord, int size) {
  if (coord < 0) coord = -coord;
  if (coord >= size) coord = 2 * size - 2 - coord;
  return coord;
}

}  // namespace

Eigen::RowVectorXd augment_one(const Eigen::RowVectorXd& image, int offset_row,
                               int offset_col, bool flip) {
  if (image.size() != kCifarPixels) {
    throw ContractError("augment: image is not 3x32x32");
  }
  if (offset_row < 0 || offset_row > 2 * kCifarPad || offset_col < 0 ||
      offset_col > 2 * kCifarPad) {
    throw ContractError("augment: crop offset out of range");
  }
  Eigen::RowVectorXd out(kCifarPixels);
  for (int ch = 0; ch < 3; ++ch) {
    const int plane = ch * kCifarSide * kCifarSide;
    for (int r = 0; r < kCifarSide; ++r) {
      const int src_r = reflect(r + offset_row - kCifarPad, kCifarSide);
      for (int c = 0; c < kCifarSide; ++c) {
        const int cc = flip ? kCifarSide - 1 - c : c;
        const int src_c = reflect(cc + offset_col - kCifarPad, kCifarSide);
        out[plane + r * kCifarSide + c] = image[plane + src_r * kCifarSide + src_c];
      }
    }
  }
  return out;
}

Eigen::RowVectorXd hflip(const Eigen::RowVectorXd& image) {
  return augment_one(image, kCifarPad, kCifarPad, true);
}

Eigen::MatrixXd augment(const Eigen::MatrixXd& images, uint64_t seed) {
  if (images.cols() != kCifarPixels) {
    throw ContractError("augment: inputs are not 3x32x32 images");
  }
  Rng rng(seed);
  Eigen::MatrixXd out(images.rows(), images.cols());
  for (Eigen::Index i = 0; i < images.rows(); ++i) {
    const int dr = static_cast<int>(rng.uniform_index(2 * kCifarPad + 1));
    const int dc = static_cast<int>(rng.uniform_index(2 * kCifarPad + 1));
    const bool flip = rng.uniform() < 0.5;
    out.row(i) = augment_one(images.row(i), dr, dc, flip);
  }
  return out;
}

}  // namespace wsdc
