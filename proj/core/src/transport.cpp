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

#include "wsdc/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "wsdc/errors.hpp"

namespace wsdc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void DiscreteMeasure::validate() const {
  if (size() < 1) throw ContractError("measure needs at least one support point");
  if (weights.size() != points.rows()) {
    throw ContractError("measure weights length != point count");
  }
  if (!points.allFinite() || !weights.allFinite()) {
    throw ContractError("measure has non-finite entries");
  }
  if (weights.minCoeff() < 0.0) throw ContractError("measure weights must be >= 0");
  if (std::abs(weights.sum() - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "measure weights sum to " << weights.sum() << ", expected 1";
    throw ContractError(os.str());
  }
}

DiscreteMeasure uniform_measure(const Eigen::MatrixXd& points) {
  DiscreteMeasure m;
  m.points = points;
  m.weights = Eigen::VectorXd::Constant(points.rows(), 1.0 / points.rows());
  return m;
}

void TransportPlan::validate(const DiscreteMeasure& a, const DiscreteMeasure& b,
                             const Eigen::MatrixXd& cost, double tol) const {
  if (coupling.rows() != a.size() || coupling.cols() != b.size()) {
    throw ContractError("coupling shape mismatch");
  }
  if (coupling.minCoeff() < -1e-12) throw ContractError("negative coupling entry");
  const Eigen::VectorXd row = coupling.rowwise().sum();
  const Eigen::VectorXd col = coupling.colwise().sum();
  if ((row - a.weights).cwiseAbs().maxCoeff() > tol ||
      (col - b.weights).cwiseAbs().maxCoeff() > tol) {
    throw ContractError("coupling marginals violate measure weights");
  }
  if (std::abs(coupling.cwiseProduct(cost).sum() - value) > 1e-9) {
    throw ContractError("reported transport cost disagrees with <coupling, cost>");
  }
}

Eigen::MatrixXd cost_matrix(const DiscreteMeasure& a, const DiscreteMeasure& b,
                            Metric metric) {
  a.validate();
  b.validate();
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << "point dimension mismatch: " << a.dim() << " vs " << b.dim();
    throw ContractError(os.str());
  }
  Eigen::MatrixXd c(a.size(), b.size());
  for (int i = 0; i < a.size(); ++i) {
    for (int j = 0; j < b.size(); ++j) {
      const double sq = (a.points.row(i) - b.points.row(j)).squaredNorm();
      c(i, j) = metric == Metric::kSquaredEuclidean ? sq : std::sqrt(sq);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Exact solver: successive shortest paths with node potentials on the
// complete bipartite flow network. Each augmentation runs one Dijkstra
// (dense O(V^2) scan, no heap needed at these sizes) and pushes the
// bottleneck mass along the shortest residual path.
// ---------------------------------------------------------------------------

TransportPlan ot_exact(const DiscreteMeasure& a, const DiscreteMeasure& b,
                       const Eigen::MatrixXd& cost, int max_cells) {
  a.validate();
  b.validate();
  const int m = a.size();
  const int n = b.size();
  if (cost.rows() != m || cost.cols() != n) {
    throw ContractError("cost matrix shape mismatch");
  }
  if (!cost.allFinite()) throw ContractError("cost matrix has non-finite entries");
  if (static_cast<long long>(m) * n > max_cells) {
    std::ostringstream os;
    os << "ot_exact support cap exceeded (" << m << "x" << n << " > " << max_cells
       << " cells); use sinkhorn for large supports";
    throw CapacityError(os.str());
  }

  // Shift costs to be nonnegative; a constant shift moves the optimal value
  // by exactly the shift (total mass is 1) and leaves the plan unchanged.
  const double shift = std::min(0.0, cost.minCoeff());
  const Eigen::MatrixXd c = cost.array() - shift;

  Eigen::VectorXd supply = a.weights / a.weights.sum();
  Eigen::VectorXd demand = b.weights / b.weights.sum();
  Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(m, n);

  const int n_nodes = m + n;  // sources [0, m), sinks [m, m+n)
  std::vector<double> pot(n_nodes, 0.0);
  std::vector<double> dist(n_nodes);
  std::vector<int> parent(n_nodes);  // previous node on the shortest path
  std::vector<char> done(n_nodes);

  double remaining = supply.sum();
  const int aug_limit = 40 * n_nodes + 400;
  int augmentations = 0;

  while (remaining > 1e-12) {
    if (++augmentations > aug_limit) {
      throw NumericError("ot_exact: augmentation limit exceeded");
    }

    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (int i = 0; i < m; ++i) {
      if (supply[i] > 1e-15) dist[i] = 0.0;
    }

    int sink = -1;
    while (true) {
      int u = -1;
      double best = kInf;
      for (int v = 0; v < n_nodes; ++v) {
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      }
      if (u < 0) break;  // nothing reachable
      done[u] = 1;
      if (u >= m && demand[u - m] > 1e-15) {
        sink = u;
        break;
      }
      if (u < m) {
        for (int j = 0; j < n; ++j) {
          const double rc = std::max(0.0, c(u, j) + pot[u] - pot[m + j]);
          if (dist[u] + rc < dist[m + j]) {
            dist[m + j] = dist[u] + rc;
            parent[m + j] = u;
          }
        }
      } else {
        const int j = u - m;
        for (int i = 0; i < m; ++i) {
          if (flow(i, j) <= 0.0) continue;
          const double rc = std::max(0.0, -c(i, j) + pot[u] - pot[i]);
          if (dist[u] + rc < dist[i]) {
            dist[i] = dist[u] + rc;
            parent[i] = u;
          }
        }
      }
    }

    if (sink < 0) {
      throw NumericError("ot_exact: no augmenting path despite remaining mass");
    }

    // Bottleneck over the path: terminal supply/demand and backward arcs.
    double delta = demand[sink - m];
    int v = sink;
    while (parent[v] >= 0) {
      const int u = parent[v];
      if (u >= m && v < m) delta = std::min(delta, flow(v, u - m));
      v = u;
    }
    delta = std::min(delta, supply[v]);

    int w = sink;
    while (parent[w] >= 0) {
      const int u = parent[w];
      if (u < m) {
        flow(u, w - m) += delta;
      } else {
        flow(w, u - m) -= delta;
      }
      w = u;
    }
    supply[w] -= delta;
    demand[sink - m] -= delta;
    remaining -= delta;

    const double reach = dist[sink];
    for (int x = 0; x < n_nodes; ++x) {
      pot[x] += std::min(dist[x], reach);
    }
  }

  TransportPlan plan;
  plan.coupling = flow;
  plan.value = flow.cwiseProduct(cost).sum();
  plan.reg_value = plan.value;
  plan.eps = 0.0;
  plan.converged = true;
  return plan;
}

// ---------------------------------------------------------------------------
// Log-domain Sinkhorn.
// ---------------------------------------------------------------------------

namespace {

// Row update: f_i = -eps * LSE_j(log b_j + (g_j - C_ij) / eps).
void potential_update(const Eigen::MatrixXd& c, const Eigen::VectorXd& log_w,
                      const Eigen::VectorXd& g, double eps, bool rows,
                      Eigen::VectorXd* out) {
  const int m = rows ? static_cast<int>(c.rows()) : static_cast<int>(c.cols());
  const int n = rows ? static_cast<int>(c.cols()) : static_cast<int>(c.rows());
  for (int i = 0; i < m; ++i) {
    double hi = -kInf;
    for (int j = 0; j < n; ++j) {
      if (log_w[j] == -kInf) continue;
      const double cij = rows ? c(i, j) : c(j, i);
      hi = std::max(hi, log_w[j] + (g[j] - cij) / eps);
    }
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (log_w[j] == -kInf) continue;
      const double cij = rows ? c(i, j) : c(j, i);
      acc += std::exp(log_w[j] + (g[j] - cij) / eps - hi);
    }
    (*out)[i] = -eps * (hi + std::log(acc));
  }
}

Eigen::VectorXd masked_log(const Eigen::VectorXd& w) {
  Eigen::VectorXd lw(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    lw[i] = w[i] > 0.0 ? std::log(w[i]) : -kInf;
  }
  return lw;
}

}  // namespace

TransportPlan sinkhorn(const DiscreteMeasure& a, const DiscreteMeasure& b,
                       const Eigen::MatrixXd& cost, double eps, int max_iter,
                       double tol) {
  a.validate();
  b.validate();
  const int m = a.size();
  const int n = b.size();
  if (cost.rows() != m || cost.cols() != n) {
    throw ContractError("cost matrix shape mismatch");
  }
  if (!cost.allFinite()) throw ContractError("cost matrix has non-finite entries");
  if (!(eps > 0.0)) throw ContractError("sinkhorn requires eps > 0");

  const Eigen::VectorXd log_a = masked_log(a.weights);
  const Eigen::VectorXd log_b = masked_log(b.weights);

  Eigen::VectorXd f = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd f_next(m);

  // eps-scaling warm start: a few iterations at geometrically decreasing
  // temperatures stabilizes small-eps solves.
  const double mean_c = cost.cwiseAbs().mean();
  std::vector<double> stages;
  for (double e = 0.2 * std::max(mean_c, eps); e > 2.0 * eps; e /= 3.0) {
    stages.push_back(e);
  }
  for (double stage_eps : stages) {
    for (int it = 0; it < 30; ++it) {
      potential_update(cost, log_b, g, stage_eps, true, &f);
      potential_update(cost, log_a, f, stage_eps, false, &g);
    }
  }

  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    potential_update(cost, log_b, g, eps, true, &f);
    potential_update(cost, log_a, f, eps, false, &g);
    // After the column update the column marginals are exact; the row
    // violation is |a_i exp((f_i - f*_i)/eps) - a_i| with f* the next row
    // update, which reuses the same LSE pass.
    potential_update(cost, log_b, g, eps, true, &f_next);
    double err = 0.0;
    for (int i = 0; i < m; ++i) {
      if (log_a[i] == -kInf) continue;
      err += a.weights[i] * std::abs(std::exp((f[i] - f_next[i]) / eps) - 1.0);
    }
    f = f_next;
    if (err < tol) {
      converged = true;
      break;
    }
  }

  TransportPlan plan;
  plan.eps = eps;
  plan.converged = converged;
  plan.coupling.resize(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      if (log_a[i] == -kInf || log_b[j] == -kInf) {
        plan.coupling(i, j) = 0.0;
        continue;
      }
      const double ex = log_a[i] + log_b[j] + (f[i] + g[j] - cost(i, j)) / eps;
      plan.coupling(i, j) = std::exp(std::min(ex, 30.0));
    }
  }
  plan.value = plan.coupling.cwiseProduct(cost).sum();
  plan.reg_value = f.dot(a.weights) + g.dot(b.weights);

  const double center = g.mean();
  plan.dual_u = f.array() + center;
  plan.dual_v = g.array() - center;
  return plan;
}

Eigen::MatrixXd ot_grad_points(const TransportPlan& plan,
                               const DiscreteMeasure& a,
                               const DiscreteMeasure& b, Metric metric) {
  if (metric != Metric::kSquaredEuclidean) {
    throw UnsupportedError("ot_grad_points: squared-Euclidean metric only");
  }
  const Eigen::VectorXd row = plan.coupling.rowwise().sum();
  return 2.0 * (row.asDiagonal() * a.points - plan.coupling * b.points);
}

Eigen::MatrixXd ot_grad_points_target(const TransportPlan& plan,
                                      const DiscreteMeasure& a,
                                      const DiscreteMeasure& b, Metric metric) {
  if (metric != Metric::kSquaredEuclidean) {
    throw UnsupportedError("ot_grad_points_target: squared-Euclidean metric only");
  }
  const Eigen::VectorXd col = plan.coupling.colwise().sum();
  return 2.0 * (col.asDiagonal() * b.points - plan.coupling.transpose() * a.points);
}

Eigen::VectorXd ot_grad_weights(const TransportPlan& plan) {
  if (!plan.has_duals()) {
    throw UnsupportedError(
        "ot_grad_weights: plan has no dual potentials (exact solver); "
        "use sinkhorn");
  }
  return plan.dual_v;
}

}  // namespace wsdc
