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

#include "wsdc/objective.hpp"

#include <cmath>
#include <sstream>

#include "wsdc/errors.hpp"
#include "wsdc/rng.hpp"

namespace wsdc {

HybridTarget build_hybrid_target(const Eigen::MatrixXd& latents, double alpha,
                                 double gaussian_std, int n_gauss, uint64_t seed) {
  if (alpha < 0.0 || alpha > 1.0) {
    std::ostringstream os;
    os << "hybrid target alpha " << alpha << " outside [0, 1]";
    throw ConfigError(os.str());
  }
  const int n_batch = static_cast<int>(latents.rows());
  const int dim = static_cast<int>(latents.cols());
  if (alpha > 0.0 && n_batch < 1) {
    throw ConfigError("hybrid target needs batch atoms when alpha > 0");
  }
  if (alpha < 1.0 && n_gauss < 1) {
    throw ConfigError("hybrid target needs n_gauss >= 1 when alpha < 1");
  }

  HybridTarget t;
  t.alpha = alpha;
  t.gaussian_std = gaussian_std;
  t.n_batch = alpha > 0.0 ? n_batch : 0;
  t.n_gauss = alpha < 1.0 ? n_gauss : 0;

  t.measure.points.resize(t.n_batch + t.n_gauss, dim);
  t.measure.weights.resize(t.n_batch + t.n_gauss);
  if (t.n_batch > 0) {
    t.measure.points.topRows(t.n_batch) = latents;
    t.measure.weights.head(t.n_batch).setConstant(alpha / t.n_batch);
  }
  if (t.n_gauss > 0) {
    Rng rng(seed);
    for (int i = 0; i < t.n_gauss; ++i) {
      for (int d = 0; d < dim; ++d) {
        t.measure.points(t.n_batch + i, d) = gaussian_std * rng.normal();
      }
    }
    t.measure.weights.tail(t.n_gauss).setConstant((1.0 - alpha) / t.n_gauss);
  }
  t.measure.validate();
  return t;
}

namespace {

// d(softmax)/d(logits) applied to an upstream vector:
// J^T v = pi .* (v - <pi, v>).
Eigen::VectorXd softmax_backward(const Eigen::VectorXd& pi, const Eigen::VectorXd& v) {
  return pi.cwiseProduct((v.array() - pi.dot(v)).matrix());
}

}  // namespace

WsResult ws_regularizer(const std::vector<HybridTarget>& targets,
                        const Codebook& cb, const WsConfig& cfg) {
  cb.validate();
  if (targets.empty()) throw ContractError("ws_regularizer: no targets");
  if (cfg.per_component && static_cast<int>(targets.size()) != cb.num_components) {
    throw ContractError("ws_regularizer: per-component mode needs Q targets");
  }
  if (!cfg.per_component && targets.size() != 1) {
    throw ContractError("ws_regularizer: pooled mode expects one target");
  }

  const int n_solves = static_cast<int>(targets.size());
  const double inv = 1.0 / n_solves;

  WsResult out;
  out.d_codewords = Eigen::MatrixXd::Zero(cb.size(), cb.dim());
  out.d_logits = Eigen::MatrixXd::Zero(cb.logits.rows(), cb.logits.cols());
  out.d_latents.resize(n_solves);
  out.plans.reserve(n_solves);

  for (int q = 0; q < n_solves; ++q) {
    const HybridTarget& target = targets[q];
    const int logits_col = cb.per_component_logits() ? q : 0;
    const Eigen::VectorXd pi = codeword_weights(cb.logits.col(logits_col));

    DiscreteMeasure codeword_measure{cb.codewords, pi};
    const Eigen::MatrixXd c =
        cost_matrix(target.measure, codeword_measure, cfg.metric);
    const double eps = cfg.eps_scale * std::max(c.mean(), 1e-12);
    TransportPlan plan =
        sinkhorn(target.measure, codeword_measure, c, eps, cfg.max_iter, cfg.tol);

    out.value += inv * plan.value;
    out.reg_value += inv * plan.reg_value;
    out.converged = out.converged && plan.converged;

    out.d_codewords +=
        inv * ot_grad_points_target(plan, target.measure, codeword_measure,
                                    cfg.metric);
    out.d_logits.col(logits_col) +=
        inv * softmax_backward(pi, ot_grad_weights(plan));

    const Eigen::MatrixXd d_source =
        ot_grad_points(plan, target.measure, codeword_measure, cfg.metric);
    out.d_latents[q] = d_source.topRows(target.n_batch);

    out.plans.push_back(std::move(plan));
  }
  return out;
}

double composite_loss(double task_loss, double ws_value, double lambda) {
  if (!std::isfinite(task_loss) || !std::isfinite(ws_value)) {
    throw NumericError("composite_loss: non-finite input");
  }
  if (lambda < 0.0) throw ContractError("composite_loss: lambda must be >= 0");
  return task_loss + lambda * ws_value;
}

}  // namespace wsdc
