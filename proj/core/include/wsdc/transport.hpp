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

#ifndef WSDC_TRANSPORT_HPP_
#define WSDC_TRANSPORT_HPP_

#include <Eigen/Core>

namespace wsdc {

enum class Metric { kSquaredEuclidean, kEuclidean };

// Weighted point set: M support points in R^D with a pmf over them.
struct DiscreteMeasure {
  Eigen::MatrixXd points;   // M x D
  Eigen::VectorXd weights;  // M, nonnegative, sums to 1

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
  void validate() const;
};

DiscreteMeasure uniform_measure(const Eigen::MatrixXd& points);

// Nonnegative coupling between two measures plus the data needed to
// differentiate through the solve.
struct TransportPlan {
  Eigen::MatrixXd coupling;  // M x N, row sums = source weights, col sums = target weights
  double value = 0.0;        // sum_ij coupling * cost (primal transport cost)
  double reg_value = 0.0;    // entropic objective; equals value when eps == 0
  Eigen::VectorXd dual_u;    // M, empty for exact plans
  Eigen::VectorXd dual_v;    // N, centered to zero mean, empty for exact plans
  double eps = 0.0;          // 0 marks an exact plan
  bool converged = true;

  bool has_duals() const { return dual_v.size() > 0; }
  void validate(const DiscreteMeasure& a, const DiscreteMeasure& b,
                const Eigen::MatrixXd& cost, double tol = 1e-6) const;
};

Eigen::MatrixXd cost_matrix(const DiscreteMeasure& a, const DiscreteMeasure& b,
                            Metric metric = Metric::kSquaredEuclidean);

// Exact discrete OT by successive-shortest-path min-cost flow over the
// transport polytope. Intended for small supports; larger problems should
// go through sinkhorn.
TransportPlan ot_exact(const DiscreteMeasure& a, const DiscreteMeasure& b,
                       const Eigen::MatrixXd& cost, int max_cells = 4096);

// Log-domain Sinkhorn with eps-scaling warm starts. Stops when the L1 row
// marginal violation drops below tol or max_iter is reached; a
// non-converged result is flagged but still returned.
TransportPlan sinkhorn(const DiscreteMeasure& a, const DiscreteMeasure& b,
                       const Eigen::MatrixXd& cost, double eps,
                       int max_iter = 2000, double tol = 1e-6);

// Gradient of the transport cost in the source support points with the plan
// held fixed (Danskin): grad_i = 2 * sum_j coupling_ij (a_i - b_j).
// Squared-Euclidean ground metric only.
Eigen::MatrixXd ot_grad_points(const TransportPlan& plan,
                               const DiscreteMeasure& a,
                               const DiscreteMeasure& b,
                               Metric metric = Metric::kSquaredEuclidean);

// Same envelope gradient taken in the target support points.
Eigen::MatrixXd ot_grad_points_target(const TransportPlan& plan,
                                      const DiscreteMeasure& a,
                                      const DiscreteMeasure& b,
                                      Metric metric = Metric::kSquaredEuclidean);

// Subgradient of the OT value in the target weights: the centered dual
// potential. Requires a plan with duals (sinkhorn).
Eigen::VectorXd ot_grad_weights(const TransportPlan& plan);

}  // namespace wsdc

#endif  // WSDC_TRANSPORT_HPP_
