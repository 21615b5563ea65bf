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

#include "wsdc/mlp.hpp"

#include <cmath>

#include "wsdc/errors.hpp"

namespace wsdc {

Mlp::Mlp(const std::vector<int>& dims, Rng& rng) {
  if (dims.size() < 2) throw ConfigError("mlp needs at least input and output dims");
  layers_.resize(dims.size() - 1);
  for (size_t l = 0; l < layers_.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    if (fan_in < 1 || fan_out < 1) throw ConfigError("mlp layer dims must be >= 1");
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    layers_[l].w.resize(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) layers_[l].w(r, c) = scale * rng.normal();
    layers_[l].b = Eigen::VectorXd::Zero(fan_out);
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Cache* cache) const {
  if (x.rows() != input_dim()) throw ContractError("mlp forward: input dim mismatch");
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(x);
  }
  Eigen::MatrixXd h = x;
  for (size_t l = 0; l < layers_.size(); ++l) {
    h = (layers_[l].w * h).colwise() + layers_[l].b;
    if (l + 1 < layers_.size()) h = h.array().tanh();
    if (cache) cache->activations.push_back(h);
  }
  return h;
}

Eigen::MatrixXd Mlp::backward(const Cache& cache, const Eigen::MatrixXd& d_out,
                              Grads* grads) const {
  Eigen::MatrixXd delta = d_out;
  for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
    if (static_cast<size_t>(l) + 1 < layers_.size()) {
      // tanh'(z) = 1 - tanh(z)^2, from the cached post-activation.
      delta = delta.cwiseProduct(
          (1.0 - cache.activations[l + 1].array().square()).matrix());
    }
    grads->layers[l].w += delta * cache.activations[l].transpose();
    grads->layers[l].b += delta.rowwise().sum();
    delta = (layers_[l].w.transpose() * delta).eval();
  }
  return delta;
}

Mlp::Grads Mlp::zero_grads() const {
  Grads g;
  g.layers.resize(layers_.size());
  for (size_t l = 0; l < layers_.size(); ++l) {
    g.layers[l].w = Eigen::MatrixXd::Zero(layers_[l].w.rows(), layers_[l].w.cols());
    g.layers[l].b = Eigen::VectorXd::Zero(layers_[l].b.size());
  }
  return g;
}

long Mlp::parameter_count() const {
  long n = 0;
  for (const auto& l : layers_) n += l.w.size() + l.b.size();
  return n;
}

}  // namespace wsdc
