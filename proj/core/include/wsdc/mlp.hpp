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

#ifndef WSDC_MLP_HPP_
#define WSDC_MLP_HPP_

#include <Eigen/Core>
#include <vector>

#include "wsdc/rng.hpp"

namespace wsdc {

// Fully-connected network with tanh hidden activations and a linear output
// layer. Reverse-mode gradients are accumulated by hand over this fixed
// operator set; no general autodiff tape is involved. Batches are stored as
// columns.
class Mlp {
 public:
  struct Layer {
    Eigen::MatrixXd w;  // out x in
    Eigen::VectorXd b;  // out
  };

  // Per-call forward cache: activations[0] is the input, activations[i] the
  // post-nonlinearity output of layer i-1.
  struct Cache {
    std::vector<Eigen::MatrixXd> activations;
  };

  struct Grads {
    std::vector<Layer> layers;
  };

  Mlp() = default;
  // dims = {input, hidden..., output}; weights ~ N(0, 1/fan_in).
  Mlp(const std::vector<int>& dims, Rng& rng);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache* cache = nullptr) const;

  // Backpropagates d(loss)/d(output); accumulates into grads and returns
  // d(loss)/d(input).
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& d_out,
                           Grads* grads) const;

  Grads zero_grads() const;
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }
  int input_dim() const { return static_cast<int>(layers_.front().w.cols()); }
  int output_dim() const { return static_cast<int>(layers_.back().w.rows()); }
  long parameter_count() const;

 private:
  std::vector<Layer> layers_;
};

}  // namespace wsdc

#endif  // WSDC_MLP_HPP_
