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

#include "wsdc/metrics.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "wsdc/errors.hpp"
#include "wsdc/transport.hpp"

namespace wsdc {

Eigen::VectorXi predictions(const Eigen::MatrixXd& logits) {
  Eigen::VectorXi preds(logits.cols());
  for (Eigen::Index b = 0; b < logits.cols(); ++b) {
    Eigen::Index best;
    logits.col(b).maxCoeff(&best);
    preds[b] = static_cast<int>(best);
  }
  return preds;
}

double accuracy(const Eigen::VectorXi& preds, const Eigen::VectorXi& labels) {
  if (preds.size() != labels.size()) throw ContractError("accuracy: length mismatch");
  if (preds.size() == 0) throw ContractError("accuracy: empty input");
  long correct = 0;
  for (Eigen::Index i = 0; i < preds.size(); ++i) {
    if (preds[i] == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / preds.size();
}

double mi_plugin(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty() || a.size() != b.size()) {
    throw ContractError("mi_plugin: sequences must be nonempty and equal length");
  }
  const double n = static_cast<double>(a.size());
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> pa, pb;
  for (size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    pa[a[i]] += 1.0;
    pb[b[i]] += 1.0;
  }
  double mi = 0.0;
  for (const auto& [key, count] : joint) {
    const double pxy = count / n;
    const double px = pa[key.first] / n;
    const double py = pb[key.second] / n;
    mi += pxy * std::log2(pxy / (px * py));
  }
  return mi;
}

double delta_mi(const Eigen::ArrayXXi& pre_idx, const Eigen::ArrayXXi& post_idx,
                const Eigen::VectorXi& labels) {
  if (pre_idx.rows() != post_idx.rows() || pre_idx.cols() != post_idx.cols()) {
    throw ContractError("delta_mi: index shape mismatch");
  }
  if (pre_idx.rows() != labels.size()) {
    throw ContractError("delta_mi: labels length mismatch");
  }
  const int b_size = static_cast<int>(pre_idx.rows());
  const int q_comps = static_cast<int>(pre_idx.cols());
  std::vector<int> y(labels.data(), labels.data() + labels.size());

  double total = 0.0;
  for (int q = 0; q < q_comps; ++q) {
    std::vector<int> pre(b_size), post(b_size);
    for (int b = 0; b < b_size; ++b) {
      pre[b] = pre_idx(b, q);
      post[b] = post_idx(b, q);
    }
    total += mi_plugin(post, y) - mi_plugin(pre, y);
  }
  return total / q_comps;
}

double index_error_rate(const Eigen::ArrayXXi& sent, const Eigen::ArrayXXi& received) {
  if (sent.rows() != received.rows() || sent.cols() != received.cols()) {
    throw ContractError("index_error_rate: shape mismatch");
  }
  if (sent.size() == 0) throw ContractError("index_error_rate: empty input");
  long errors = 0;
  for (Eigen::Index i = 0; i < sent.size(); ++i) {
    if (sent(i) != received(i)) ++errors;
  }
  return static_cast<double>(errors) / sent.size();
}

Eigen::VectorXd symbol_target_pmf(const Constellation& c, SymbolTarget target) {
  Eigen::VectorXd pmf(c.order);
  if (target == SymbolTarget::kUniform) {
    pmf.setConstant(1.0 / c.order);
    return pmf;
  }
  // Zero-mean Gaussian restricted to the constellation, sigma_t^2 = 1/2 per
  // complex dimension: weight proportional to exp(-|s|^2).
  for (int k = 0; k < c.order; ++k) {
    pmf[k] = std::exp(-std::norm(c.symbols[k]));
  }
  pmf /= pmf.sum();
  return pmf;
}

double symbol_ws_diagnostic(const Eigen::VectorXd& activation,
                            const Constellation& c, SymbolTarget target) {
  if (activation.size() != c.order) {
    throw ContractError("symbol_ws_diagnostic: pmf size != constellation order");
  }
  if (activation.minCoeff() < 0.0 || std::abs(activation.sum() - 1.0) > 1e-9) {
    throw ContractError("symbol_ws_diagnostic: invalid activation pmf");
  }

  Eigen::MatrixXd points(c.order, 2);
  for (int k = 0; k < c.order; ++k) {
    points(k, 0) = c.symbols[k].real();
    points(k, 1) = c.symbols[k].imag();
  }
  DiscreteMeasure a{points, activation};
  DiscreteMeasure b{points, symbol_target_pmf(c, target)};
  const Eigen::MatrixXd cost = cost_matrix(a, b);
  return ot_exact(a, b, cost, c.order * c.order).value;
}

}  // namespace wsdc
