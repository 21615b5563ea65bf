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

#ifndef WSDC_OBJECTIVE_HPP_
#define WSDC_OBJECTIVE_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "wsdc/codebook.hpp"
#include "wsdc/transport.hpp"

namespace wsdc {

// Convex mix of the empirical batch distribution (trainable atoms, weight
// alpha/B each) and a fixed isotropic Gaussian cloud (weight (1-alpha)/G
// each). alpha = 1 drops the Gaussian atoms, alpha = 0 drops the batch.
struct HybridTarget {
  double alpha = 0.5;
  double gaussian_std = 1.0;
  int n_batch = 0;  // leading batch atoms in measure.points
  int n_gauss = 0;
  DiscreteMeasure measure;
};

struct WsConfig {
  double lambda = 1.0;
  // Sinkhorn temperature relative to the mean ground cost of each solve.
  double eps_scale = 0.05;
  Metric metric = Metric::kSquaredEuclidean;
  bool per_component = false;  // per-q targets instead of one pooled solve
  int max_iter = 2000;
  double tol = 1e-6;
};

HybridTarget build_hybrid_target(const Eigen::MatrixXd& latents, double alpha,
                                 double gaussian_std, int n_gauss, uint64_t seed);

// Wasserstein alignment term between the hybrid target(s) and the weighted
// codeword measure, with all gradient blocks needed by the training loop.
struct WsResult {
  double value = 0.0;      // averaged primal transport cost
  double reg_value = 0.0;  // averaged entropic objective (the trained quantity)
  bool converged = true;
  Eigen::MatrixXd d_codewords;               // K x D
  Eigen::MatrixXd d_logits;                  // matches Codebook::logits
  std::vector<Eigen::MatrixXd> d_latents;    // per target, n_batch x D
  std::vector<TransportPlan> plans;          // one per solved target
};

WsResult ws_regularizer(const std::vector<HybridTarget>& targets,
                        const Codebook& cb, const WsConfig& cfg);

// total = task + lambda * ws. Gradient blocks are combined by the caller
// with the same scaling; this helper keeps the scalar bookkeeping in one
// place.
double composite_loss(double task_loss, double ws_value, double lambda);

}  // namespace wsdc

#endif  // WSDC_OBJECTIVE_HPP_
