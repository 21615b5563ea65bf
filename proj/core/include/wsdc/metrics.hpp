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

#ifndef WSDC_METRICS_HPP_
#define WSDC_METRICS_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "wsdc/modem.hpp"

namespace wsdc {

// One evaluated configuration; the per-run CSV row.
struct MetricsRecord {
  // config echo
  int K = 0, D = 0, Q = 0;
  double alpha = 0.0, lambda = 0.0;
  double snr_db = 0.0;
  uint64_t seed = 0;
  // measured quantities
  double accuracy = 0.0;
  double ot_cost = 0.0;
  double perplexity = 0.0;
  double delta_mi_bits = 0.0;
  double index_error_rate = 0.0;
  double symbol_ws = 0.0;
  double wall_time_s = 0.0;
};

Eigen::VectorXi predictions(const Eigen::MatrixXd& logits);

double accuracy(const Eigen::VectorXi& preds, const Eigen::VectorXi& labels);

// Plug-in mutual information (bits) from the empirical joint histogram of
// two equal-length discrete sequences.
double mi_plugin(const std::vector<int>& a, const std::vector<int>& b);

// Per-component plug-in MI between index stream and label, averaged over the
// Q positions: (1/Q) sum_q [I(post_q; Y) - I(pre_q; Y)].
double delta_mi(const Eigen::ArrayXXi& pre_idx, const Eigen::ArrayXXi& post_idx,
                const Eigen::VectorXi& labels);

double index_error_rate(const Eigen::ArrayXXi& sent, const Eigen::ArrayXXi& received);

enum class SymbolTarget { kUniform, kGaussian };

// Exact OT distance in the complex plane between the constellation weighted
// by the activation pmf and the same points weighted by the target pmf
// (uniform, or a discretized zero-mean Gaussian with sigma_t^2 = 1/2).
double symbol_ws_diagnostic(const Eigen::VectorXd& activation,
                            const Constellation& c, SymbolTarget target);

// The discretized Gaussian reference weights used above.
Eigen::VectorXd symbol_target_pmf(const Constellation& c, SymbolTarget target);

}  // namespace wsdc

#endif  // WSDC_METRICS_HPP_
