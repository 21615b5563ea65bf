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

#ifndef WSDC_CODEBOOK_HPP_
#define WSDC_CODEBOOK_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <string>

namespace wsdc {

enum class CodebookInit { kUniformBox, kGaussian, kKmeansOnSample };

CodebookInit codebook_init_from_string(const std::string& name);
std::string to_string(CodebookInit init);

// Learnable discrete codebook: K codewords of dimension D plus softmax
// logits for the codeword activation weights. Logits are shared across the
// Q latent components by default; per-component logits are a column each.
struct Codebook {
  Eigen::MatrixXd codewords;  // K x D
  Eigen::MatrixXd logits;     // K x 1 (shared) or K x Q (per component)
  int num_components = 1;     // Q

  int size() const { return static_cast<int>(codewords.rows()); }
  int dim() const { return static_cast<int>(codewords.cols()); }
  bool per_component_logits() const { return logits.cols() > 1; }

  // Logits column backing component q.
  Eigen::VectorXd logits_for(int q) const {
    return logits.col(per_component_logits() ? q : 0);
  }

  void validate() const;
};

// Batch of continuous encoder outputs. Component (b, q) lives in row
// b * num_components + q, so the storage doubles as the pooled atom list.
struct LatentBatch {
  Eigen::MatrixXd values;  // (B * Q) x D
  int batch = 0;           // B
  int num_components = 1;  // Q

  int dim() const { return static_cast<int>(values.cols()); }
  Eigen::RowVectorXd component(int b, int q) const {
    return values.row(b * num_components + q);
  }
  void validate() const;
};

struct QuantizeResult {
  Eigen::ArrayXXi indices;  // B x Q
  Eigen::MatrixXd quantized;  // (B * Q) x D, rows aligned with the input
  double distortion = 0.0;    // mean squared distance over (b, q)
};

Codebook new_codebook(int num_codewords, int dim, int num_components,
                      CodebookInit init, uint64_t seed,
                      bool per_component_logits = false);

// Nearest-neighbor quantization; ties broken toward the lowest index.
QuantizeResult quantize(const Codebook& cb, const LatentBatch& z);

// Empirical activation pmf over codeword indices.
Eigen::VectorXd activation_pmf(const Eigen::ArrayXXi& indices, int num_codewords);

// Numerically stable softmax of the activation logits.
Eigen::VectorXd codeword_weights(const Eigen::VectorXd& logits);

// 2^H(pmf) with H in bits; K for uniform usage, 1 for total collapse.
double perplexity(const Eigen::VectorXd& pmf);

// Lloyd iterations from a given initial codebook; used by the
// kmeans-on-sample init scheme. Empty clusters keep their centroid.
Eigen::MatrixXd lloyd_kmeans(const Eigen::MatrixXd& points,
                             Eigen::MatrixXd centroids, int max_iter = 50,
                             double tol = 1e-10);

}  // namespace wsdc

#endif  // WSDC_CODEBOOK_HPP_
