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

#ifndef WSDC_DATASET_HPP_
#define WSDC_DATASET_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace wsdc {

struct Dataset {
  Eigen::MatrixXd inputs;  // N x n, one sample per row
  Eigen::VectorXi labels;  // N, class ids in [0, n_classes)
  int n_classes = 0;
  std::string split;       // "train" or "test"
  std::string provenance;

  int size() const { return static_cast<int>(inputs.rows()); }
  int input_dim() const { return static_cast<int>(inputs.cols()); }
  void validate() const;
};

// Synthetic Gaussian-mixture classification task: class means sit on a
// seeded random orthonormal frame scaled by `separation`, clusters are
// unit-variance isotropic. Requires n_classes <= dim so the frame exists.
Dataset gen_gmm(int n_classes, int dim, double separation, int n_per_class,
                uint64_t seed);

// CIFAR-10 binary batches: records of exactly 3073 bytes, 1 label byte then
// 3072 pixels in planar R,G,B row-major order. Pixels are scaled to [0, 1].
Dataset load_cifar10(const std::string& dir, const std::string& split);
Dataset load_cifar10_file(const std::string& path);

// Inverse of the loader's scaling; reproduces the batch file bytes exactly.
std::vector<uint8_t> serialize_cifar_batch(const Dataset& data);

// Reflect-pad 4 + random 32x32 crop + horizontal flip with probability 1/2,
// per image, deterministic given seed.
Eigen::MatrixXd augment(const Eigen::MatrixXd& images, uint64_t seed);

// Deterministic pieces of the augmentation, exposed for direct use:
// crop offsets live in [0, 8]; (4, 4) with no flip is the identity.
Eigen::RowVectorXd augment_one(const Eigen::RowVectorXd& image, int offset_row,
                               int offset_col, bool flip);
Eigen::RowVectorXd hflip(const Eigen::RowVectorXd& image);

}  // namespace wsdc

#endif  // WSDC_DATASET_HPP_
