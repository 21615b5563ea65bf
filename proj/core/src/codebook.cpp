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

#include "wsdc/codebook.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "wsdc/errors.hpp"
#include "wsdc/rng.hpp"

namespace wsdc {

CodebookInit codebook_init_from_string(const std::string& name) {
  if (name == "uniform-box") return CodebookInit::kUniformBox;
  if (name == "gaussian") return CodebookInit::kGaussian;
  if (name == "kmeans-on-sample") return CodebookInit::kKmeansOnSample;
  throw ConfigError("unknown codebook init scheme: '" + name +
                    "' (expected uniform-box, gaussian, kmeans-on-sample)");
}

std::string to_string(CodebookInit init) {
  switch (init) {
    case CodebookInit::kUniformBox: return "uniform-box";
    case CodebookInit::kGaussian: return "gaussian";
    case CodebookInit::kKmeansOnSample: return "kmeans-on-sample";
  }
  return "?";
}

void Codebook::validate() const {
  if (size() < 2 || dim() < 1 || num_components < 1) {
    throw ConfigError("codebook requires K >= 2, D >= 1, Q >= 1");
  }
  if (!codewords.allFinite() || !logits.allFinite()) {
    throw ContractError("codebook contains non-finite entries");
  }
  if (logits.rows() != codewords.rows()) {
    throw ContractError("logits rows must match codeword count");
  }
}

void LatentBatch::validate() const {
  if (batch < 1 || num_components < 1 ||
      values.rows() != static_cast<Eigen::Index>(batch) * num_components) {
    throw ContractError("latent batch shape inconsistent with B and Q");
  }
  if (!values.allFinite()) {
    throw ContractError("latent batch contains non-finite entries");
  }
}

Codebook new_codebook(int num_codewords, int dim, int num_components,
                      CodebookInit init, uint64_t seed,
                      bool per_component_logits) {
  if (num_codewords < 2 || dim < 1 || num_components < 1) {
    std::ostringstream os;
    os << "invalid codebook dimensions K=" << num_codewords << " D=" << dim
       << " Q=" << num_components << " (need K >= 2, D >= 1, Q >= 1)";
    throw ConfigError(os.str());
  }

  Rng rng(seed);
  Codebook cb;
  cb.num_components = num_components;
  cb.codewords.resize(num_codewords, dim);

  switch (init) {
    case CodebookInit::kUniformBox:
      for (int k = 0; k < num_codewords; ++k)
        for (int d = 0; d < dim; ++d) cb.codewords(k, d) = rng.uniform(-1.0, 1.0);
      break;
    case CodebookInit::kGaussian: {
      // Scale 1/sqrt(D) keeps initial codeword power near 1, matching the
      // unit-power constellation convention.
      const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
      for (int k = 0; k < num_codewords; ++k)
        for (int d = 0; d < dim; ++d) cb.codewords(k, d) = scale * rng.normal();
      break;
    }
    case CodebookInit::kKmeansOnSample: {
      const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
      const int n_sample = 64 * num_codewords;
      Eigen::MatrixXd sample(n_sample, dim);
      for (int i = 0; i < n_sample; ++i)
        for (int d = 0; d < dim; ++d) sample(i, d) = scale * rng.normal();
      cb.codewords = lloyd_kmeans(sample, sample.topRows(num_codewords), 25);
      break;
    }
  }

  cb.logits = Eigen::MatrixXd::Zero(num_codewords,
                                    per_component_logits ? num_components : 1);
  cb.validate();
  return cb;
}

QuantizeResult quantize(const Codebook& cb, const LatentBatch& z) {
  cb.validate();
  z.validate();
  if (z.dim() != cb.dim()) {
    std::ostringstream os;
    os << "latent dim " << z.dim() << " != codeword dim " << cb.dim();
    throw ContractError(os.str());
  }

  const int rows = static_cast<int>(z.values.rows());
  const int k_count = cb.size();

  QuantizeResult out;
  out.indices.resize(z.batch, z.num_components);
  out.quantized.resize(rows, cb.dim());

  double total = 0.0;
  for (int r = 0; r < rows; ++r) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < k_count; ++k) {
      const double d = (z.values.row(r) - cb.codewords.row(k)).squaredNorm();
      if (d < best_d) {  // strict: ties keep the lowest index
        best_d = d;
        best = k;
      }
    }
    out.indices(r / z.num_components, r % z.num_components) = best;
    out.quantized.row(r) = cb.codewords.row(best);
    total += best_d;
  }
  out.distortion = total / rows;
  return out;
}

Eigen::VectorXd activation_pmf(const Eigen::ArrayXXi& indices, int num_codewords) {
  if (indices.size() == 0) throw ContractError("activation_pmf: empty index array");
  Eigen::VectorXd pmf = Eigen::VectorXd::Zero(num_codewords);
  for (Eigen::Index i = 0; i < indices.size(); ++i) {
    const int k = indices(i);
    if (k < 0 || k >= num_codewords) {
      std::ostringstream os;
      os << "activation_pmf: index " << k << " out of range [0, "
         << num_codewords << ")";
      throw ContractError(os.str());
    }
    pmf[k] += 1.0;
  }
  pmf /= static_cast<double>(indices.size());
  return pmf;
}

Eigen::VectorXd codeword_weights(const Eigen::VectorXd& logits) {
  if (!logits.allFinite()) throw ContractError("codeword_weights: non-finite logits");
  const Eigen::VectorXd shifted = logits.array() - logits.maxCoeff();
  Eigen::VectorXd w = shifted.array().exp();
  return w / w.sum();
}

double perplexity(const Eigen::VectorXd& pmf) {
  double entropy_bits = 0.0;
  for (Eigen::Index k = 0; k < pmf.size(); ++k) {
    const double p = pmf[k];
    if (p < 0.0) throw ContractError("perplexity: negative pmf entry");
    if (p > 0.0) entropy_bits -= p * std::log2(p);
  }
  return std::exp2(entropy_bits);
}

Eigen::MatrixXd lloyd_kmeans(const Eigen::MatrixXd& points,
                             Eigen::MatrixXd centroids, int max_iter,
                             double tol) {
  const int n = static_cast<int>(points.rows());
  const int k_count = static_cast<int>(centroids.rows());
  Eigen::VectorXi assign(n);

  for (int it = 0; it < max_iter; ++it) {
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int k = 0; k < k_count; ++k) {
        const double d = (points.row(i) - centroids.row(k)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      assign[i] = best;
    }

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k_count, points.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k_count);
    for (int i = 0; i < n; ++i) {
      sums.row(assign[i]) += points.row(i);
      counts[assign[i]] += 1.0;
    }
    double shift = 0.0;
    for (int k = 0; k < k_count; ++k) {
      if (counts[k] > 0.0) {
        const Eigen::RowVectorXd next = sums.row(k) / counts[k];
        shift += (next - centroids.row(k)).squaredNorm();
        centroids.row(k) = next;
      }
    }
    if (shift < tol) break;
  }
  return centroids;
}

}  // namespace wsdc
