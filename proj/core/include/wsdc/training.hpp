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

#ifndef WSDC_TRAINING_HPP_
#define WSDC_TRAINING_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wsdc/codebook.hpp"
#include "wsdc/dataset.hpp"
#include "wsdc/mlp.hpp"
#include "wsdc/modem.hpp"
#include "wsdc/objective.hpp"

namespace wsdc {

struct DatasetConfig {
  std::string type = "gmm";  // "gmm" or "cifar10"
  // gmm
  int n_classes = 10;
  int dim = 32;
  double separation = 6.0;
  int n_per_class = 200;
  // cifar10
  std::string dir;
  int limit = 0;  // optional record cap for desk-scale subsets, 0 = all
};

struct TrainConfig {
  int K = 16;  // codebook size, also the QAM order on the channel
  int D = 8;   // codeword dimension
  int Q = 2;   // latent components per sample
  double alpha = 0.5;
  double lambda = 1.0;
  double eps = 0.05;  // Sinkhorn temperature relative to mean ground cost
  double snr_train_db = 12.0;
  int epochs = 30;
  int batch_size = 64;
  double learning_rate = 1e-3;
  uint64_t seed = 1;
  DatasetConfig dataset;
  bool channel_in_loop = true;

  std::vector<int> hidden = {128, 128};
  double gaussian_std = 1.0;
  int n_gauss = 0;  // 0: match the number of pooled batch atoms
  bool per_q_targets = false;
  bool per_q_logits = false;
  double commitment_weight = 0.0;
  std::string init = "gaussian";

  void validate() const;
};

// Per-step diagnostics; per-epoch evaluation lives in metrics.hpp.
struct StepMetrics {
  double task_loss = 0.0;
  double ws_value = 0.0;
  double total_loss = 0.0;
  double distortion = 0.0;
  double perplexity = 0.0;
};

struct EpochRecord {
  int epoch = 0;
  double task_loss = 0.0;   // mean over steps
  double ws_value = 0.0;    // mean over steps
  double distortion = 0.0;  // mean over steps
  double perplexity = 0.0;  // mean over steps
  double train_accuracy = 0.0;
  double wall_time_s = 0.0;
};

struct AdamState {
  std::vector<Eigen::VectorXd> m;
  std::vector<Eigen::VectorXd> v;
  int64_t t = 0;
};

struct ModelState {
  TrainConfig cfg;
  Mlp encoder;  // input_dim -> hidden -> Q*D
  Mlp head;     // Q*D -> hidden -> n_classes
  Codebook codebook;
  Constellation constellation;
  AdamState opt;
  int64_t step = 0;
  Rng rng{0};
  int input_dim = 0;
  int n_classes = 0;

  void check_finite() const;
};

ModelState make_model(const TrainConfig& cfg, int input_dim, int n_classes);

// Flat view over every trainable scalar, in a stable serialization order.
struct ParamView {
  std::string name;
  double* data;
  Eigen::Index size;
};
std::vector<ParamView> param_views(ModelState& state);

// Gradient blocks matching param_views order.
struct Grads {
  Mlp::Grads encoder;
  Mlp::Grads head;
  Eigen::MatrixXd codewords;
  Eigen::MatrixXd logits;
};
Grads zero_grads(const ModelState& state);
std::vector<ParamView> grad_views(const ModelState& state, Grads& grads);

struct Batch {
  Eigen::MatrixXd inputs;  // input_dim x B (column-major batch)
  Eigen::VectorXi labels;  // B
  int size() const { return static_cast<int>(inputs.cols()); }
};
Batch make_batch(const Dataset& data, const std::vector<int>& rows);

enum class RunMode { kTrain, kEval };

struct ForwardResult {
  Eigen::MatrixXd logits;      // n_classes x B
  LatentBatch z_e;
  Eigen::ArrayXXi sent;        // B x Q indices out of the quantizer
  Eigen::ArrayXXi received;    // B x Q indices after the extended channel
  Eigen::MatrixXd z_c;         // (B*Q) x D quantized latents
  Eigen::MatrixXd z_d;         // (B*Q) x D receiver-side lookups
  std::vector<Complex> tx_symbols;
  std::vector<Complex> rx_symbols;
  double distortion = 0.0;
  Mlp::Cache encoder_cache;    // populated in train mode only
  Mlp::Cache head_cache;
};

// z_e -> quantize -> modulate -> AWGN -> demodulate -> codeword lookup ->
// head. `noise` supplies the channel draw in train mode; eval mode seeds a
// fresh generator from cfg.seed so evaluations are reproducible.
ForwardResult forward_pass(const ModelState& state, const Batch& batch,
                           const ChannelConfig& ch, RunMode mode,
                           Rng* noise = nullptr);

// Straight-through combination: value from the receiver path, gradient to
// the encoder as if the quantizer/channel were the identity.
Eigen::MatrixXd straight_through(const Eigen::MatrixXd& z_e,
                                 const Eigen::MatrixXd& z_d);

// Mean softmax cross-entropy in nats; gradient is (softmax - onehot)/B.
struct TaskLoss {
  double value = 0.0;
  Eigen::MatrixXd d_logits;  // n_classes x B
};
TaskLoss task_loss(const Eigen::MatrixXd& logits, const Eigen::VectorXi& labels);

StepMetrics train_step(ModelState& state, const Batch& batch);

struct TrainResult {
  std::vector<EpochRecord> history;
};
TrainResult train(ModelState& state, const Dataset& data);

// Compares engine gradients of the composite loss against central finite
// differences with the discrete paths frozen (quantizer indices, channel
// outcome, and OT plans held fixed). Returns the max relative error over a
// deterministic sample of parameters.
double grad_check(ModelState& state, const Batch& batch, int max_per_block = 12);

}  // namespace wsdc

#endif  // WSDC_TRAINING_HPP_
