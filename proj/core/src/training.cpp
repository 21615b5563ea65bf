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

#include "wsdc/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "wsdc/errors.hpp"
#include "wsdc/metrics.hpp"

namespace wsdc {

namespace {
// Sub-stream tags so independent consumers never share RNG positions.
constexpr uint64_t kTagTrainStream = 0x7261696e01ULL;
constexpr uint64_t kTagCodebook = 0x636f646501ULL;
constexpr uint64_t kTagHybrid = 0x68796272ULL;
constexpr uint64_t kTagGradCheck = 0x67636b01ULL;
}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (K < 2 || D < 1 || Q < 1) throw ConfigError("need K >= 2, D >= 1, Q >= 1");
  if (K != 4 && K != 16 && K != 64 && K != 256) {
    throw ConfigError(
        "K must be one of {4, 16, 64, 256}: each codebook index rides one "
        "K-QAM symbol");
  }
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha must be in [0, 1]");
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  if (!(eps > 0.0)) throw ConfigError("eps must be > 0");
  if (!(gaussian_std > 0.0)) throw ConfigError("gaussian_std must be > 0");
  if (commitment_weight < 0.0) throw ConfigError("commitment_weight must be >= 0");
  if (hidden.empty()) throw ConfigError("hidden layer list must be nonempty");
  for (int h : hidden) {
    if (h < 1) throw ConfigError("hidden widths must be >= 1");
  }
  if (dataset.type != "gmm" && dataset.type != "cifar10") {
    throw ConfigError("dataset.type must be 'gmm' or 'cifar10'");
  }
}

void ModelState::check_finite() const {
  for (const auto& l : encoder.layers()) {
    if (!l.w.allFinite() || !l.b.allFinite()) {
      throw NumericError("encoder parameters became non-finite");
    }
  }
  for (const auto& l : head.layers()) {
    if (!l.w.allFinite() || !l.b.allFinite()) {
      throw NumericError("head parameters became non-finite");
    }
  }
  if (!codebook.codewords.allFinite() || !codebook.logits.allFinite()) {
    throw NumericError("codebook became non-finite");
  }
}

ModelState make_model(const TrainConfig& cfg, int input_dim, int n_classes) {
  cfg.validate();
  if (input_dim < 1 || n_classes < 2) {
    throw ConfigError("model needs input_dim >= 1 and n_classes >= 2");
  }

  ModelState state;
  state.cfg = cfg;
  state.input_dim = input_dim;
  state.n_classes = n_classes;

  Rng init_rng(cfg.seed);
  std::vector<int> enc_dims{input_dim};
  enc_dims.insert(enc_dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  enc_dims.push_back(cfg.Q * cfg.D);
  state.encoder = Mlp(enc_dims, init_rng);

  std::vector<int> head_dims{cfg.Q * cfg.D};
  head_dims.insert(head_dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  head_dims.push_back(n_classes);
  state.head = Mlp(head_dims, init_rng);

  state.codebook = new_codebook(cfg.K, cfg.D, cfg.Q,
                                codebook_init_from_string(cfg.init),
                                mix_seed(cfg.seed, kTagCodebook),
                                cfg.per_q_logits);
  state.constellation = build_constellation(cfg.K);
  state.rng = Rng(mix_seed(cfg.seed, kTagTrainStream));

  auto views = param_views(state);
  state.opt.m.resize(views.size());
  state.opt.v.resize(views.size());
  for (size_t i = 0; i < views.size(); ++i) {
    state.opt.m[i] = Eigen::VectorXd::Zero(views[i].size);
    state.opt.v[i] = Eigen::VectorXd::Zero(views[i].size);
  }
  return state;
}

std::vector<ParamView> param_views(ModelState& state) {
  std::vector<ParamView> views;
  auto add_mlp = [&views](const std::string& prefix, Mlp& mlp) {
    for (size_t l = 0; l < mlp.layers().size(); ++l) {
      auto& layer = mlp.layers()[l];
      views.push_back({prefix + ".w" + std::to_string(l), layer.w.data(),
                       layer.w.size()});
      views.push_back({prefix + ".b" + std::to_string(l), layer.b.data(),
                       layer.b.size()});
    }
  };
  add_mlp("encoder", state.encoder);
  add_mlp("head", state.head);
  views.push_back({"codebook.codewords", state.codebook.codewords.data(),
                   state.codebook.codewords.size()});
  views.push_back({"codebook.logits", state.codebook.logits.data(),
                   state.codebook.logits.size()});
  return views;
}

Grads zero_grads(const ModelState& state) {
  Grads g;
  g.encoder = state.encoder.zero_grads();
  g.head = state.head.zero_grads();
  g.codewords = Eigen::MatrixXd::Zero(state.codebook.codewords.rows(),
                                      state.codebook.codewords.cols());
  g.logits = Eigen::MatrixXd::Zero(state.codebook.logits.rows(),
                                   state.codebook.logits.cols());
  return g;
}

std::vector<ParamView> grad_views(const ModelState& state, Grads& grads) {
  std::vector<ParamView> views;
  auto add_mlp = [&views](const std::string& prefix, Mlp::Grads& g) {
    for (size_t l = 0; l < g.layers.size(); ++l) {
      views.push_back({prefix + ".w" + std::to_string(l), g.layers[l].w.data(),
                       g.layers[l].w.size()});
      views.push_back({prefix + ".b" + std::to_string(l), g.layers[l].b.data(),
                       g.layers[l].b.size()});
    }
  };
  (void)state;
  add_mlp("encoder", grads.encoder);
  add_mlp("head", grads.head);
  views.push_back({"codebook.codewords", grads.codewords.data(),
                   grads.codewords.size()});
  views.push_back({"codebook.logits", grads.logits.data(), grads.logits.size()});
  return views;
}

Batch make_batch(const Dataset& data, const std::vector<int>& rows) {
  Batch b;
  b.inputs.resize(data.input_dim(), rows.size());
  b.labels.resize(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    b.inputs.col(i) = data.inputs.row(rows[i]).transpose();
    b.labels[i] = data.labels[rows[i]];
  }
  return b;
}

namespace {

LatentBatch to_latent(const Eigen::MatrixXd& encoder_out, int batch, int q_comps,
                      int dim) {
  LatentBatch z;
  z.batch = batch;
  z.num_components = q_comps;
  z.values.resize(static_cast<Eigen::Index>(batch) * q_comps, dim);
  for (int b = 0; b < batch; ++b) {
    for (int q = 0; q < q_comps; ++q) {
      z.values.row(b * q_comps + q) =
          encoder_out.col(b).segment(q * dim, dim).transpose();
    }
  }
  return z;
}

Eigen::MatrixXd to_columns(const Eigen::MatrixXd& per_component, int batch,
                           int q_comps, int dim) {
  Eigen::MatrixXd out(q_comps * dim, batch);
  for (int b = 0; b < batch; ++b) {
    for (int q = 0; q < q_comps; ++q) {
      out.col(b).segment(q * dim, dim) =
          per_component.row(b * q_comps + q).transpose();
    }
  }
  return out;
}

}  // namespace

ForwardResult forward_pass(const ModelState& state, const Batch& batch,
                           const ChannelConfig& ch, RunMode mode, Rng* noise) {
  if (batch.inputs.rows() != state.input_dim) {
    throw ContractError("forward_pass: batch input dim mismatch");
  }
  const TrainConfig& cfg = state.cfg;
  const int b_size = batch.size();

  ForwardResult fwd;
  const bool cache = mode == RunMode::kTrain;
  const Eigen::MatrixXd enc_out =
      state.encoder.forward(batch.inputs, cache ? &fwd.encoder_cache : nullptr);
  fwd.z_e = to_latent(enc_out, b_size, cfg.Q, cfg.D);

  QuantizeResult quant = quantize(state.codebook, fwd.z_e);
  fwd.sent = quant.indices;
  fwd.z_c = std::move(quant.quantized);
  fwd.distortion = quant.distortion;

  // Symbol stream in (b, q) order: one K-QAM symbol per index.
  std::vector<int> flat(static_cast<size_t>(b_size) * cfg.Q);
  for (int b = 0; b < b_size; ++b) {
    for (int q = 0; q < cfg.Q; ++q) flat[b * cfg.Q + q] = fwd.sent(b, q);
  }
  fwd.tx_symbols = modulate(flat, state.constellation);
  if (ch.noiseless()) {
    fwd.rx_symbols = fwd.tx_symbols;
  } else if (noise != nullptr) {
    fwd.rx_symbols = awgn(fwd.tx_symbols, ch.noise_variance(), *noise);
  } else {
    fwd.rx_symbols = awgn(fwd.tx_symbols, ch);
  }
  const std::vector<int> rx_flat = demodulate(fwd.rx_symbols, state.constellation);

  fwd.received.resize(b_size, cfg.Q);
  fwd.z_d.resize(static_cast<Eigen::Index>(b_size) * cfg.Q, cfg.D);
  for (int b = 0; b < b_size; ++b) {
    for (int q = 0; q < cfg.Q; ++q) {
      const int idx = rx_flat[b * cfg.Q + q];
      fwd.received(b, q) = idx;
      fwd.z_d.row(b * cfg.Q + q) = state.codebook.codewords.row(idx);
    }
  }

  const Eigen::MatrixXd head_in = to_columns(fwd.z_d, b_size, cfg.Q, cfg.D);
  fwd.logits = state.head.forward(head_in, cache ? &fwd.head_cache : nullptr);
  return fwd;
}

Eigen::MatrixXd straight_through(const Eigen::MatrixXd& z_e,
                                 const Eigen::MatrixXd& z_d) {
  if (z_e.rows() != z_d.rows() || z_e.cols() != z_d.cols()) {
    throw ContractError("straight_through: shape mismatch");
  }
  return z_d;
}

TaskLoss task_loss(const Eigen::MatrixXd& logits, const Eigen::VectorXi& labels) {
  const int n_classes = static_cast<int>(logits.rows());
  const int b_size = static_cast<int>(logits.cols());
  if (labels.size() != b_size) throw ContractError("task_loss: batch size mismatch");

  TaskLoss out;
  out.d_logits.resize(n_classes, b_size);
  double total = 0.0;
  for (int b = 0; b < b_size; ++b) {
    const int y = labels[b];
    if (y < 0 || y >= n_classes) {
      std::ostringstream os;
      os << "task_loss: label " << y << " out of range [0, " << n_classes << ")";
      throw ContractError(os.str());
    }
    const Eigen::VectorXd col = logits.col(b);
    const double mx = col.maxCoeff();
    const Eigen::VectorXd ex = (col.array() - mx).exp();
    const double z = ex.sum();
    total += std::log(z) + mx - col[y];
    out.d_logits.col(b) = ex / z;
    out.d_logits(y, b) -= 1.0;
  }
  out.value = total / b_size;
  out.d_logits /= static_cast<double>(b_size);
  return out;
}

namespace {

struct StepComputation {
  ForwardResult fwd;
  TaskLoss task;
  double commitment = 0.0;
  WsResult ws;          // valid only when cfg.lambda > 0
  bool has_ws = false;
  double total = 0.0;
  Grads grads;
  std::vector<HybridTarget> targets;
};

std::vector<HybridTarget> build_targets(const ModelState& state,
                                        const LatentBatch& z_e, uint64_t seed) {
  const TrainConfig& cfg = state.cfg;
  std::vector<HybridTarget> targets;
  if (cfg.per_q_targets) {
    for (int q = 0; q < cfg.Q; ++q) {
      Eigen::MatrixXd slice(z_e.batch, cfg.D);
      for (int b = 0; b < z_e.batch; ++b) slice.row(b) = z_e.component(b, q);
      const int n_gauss = cfg.n_gauss > 0 ? cfg.n_gauss : z_e.batch;
      targets.push_back(build_hybrid_target(slice, cfg.alpha, cfg.gaussian_std,
                                            n_gauss, mix_seed(seed, q)));
    }
  } else {
    const int n_gauss =
        cfg.n_gauss > 0 ? cfg.n_gauss : static_cast<int>(z_e.values.rows());
    targets.push_back(build_hybrid_target(z_e.values, cfg.alpha, cfg.gaussian_std,
                                          n_gauss, seed));
  }
  return targets;
}

WsConfig ws_config(const TrainConfig& cfg) {
  WsConfig ws;
  ws.lambda = cfg.lambda;
  ws.eps_scale = cfg.eps;
  ws.per_component = cfg.per_q_targets;
  return ws;
}

StepComputation compute_step(ModelState& state, const Batch& batch,
                             const ChannelConfig& ch, Rng* noise,
                             uint64_t hybrid_seed) {
  const TrainConfig& cfg = state.cfg;
  StepComputation sc;
  sc.grads = zero_grads(state);

  sc.fwd = forward_pass(state, batch, ch, RunMode::kTrain, noise);
  sc.task = task_loss(sc.fwd.logits, batch.labels);

  // Head backward; the straight-through convention copies the gradient at
  // z_d back to z_e unchanged.
  const Eigen::MatrixXd d_head_in =
      state.head.backward(sc.fwd.head_cache, sc.task.d_logits, &sc.grads.head);
  Eigen::MatrixXd d_z_e(sc.fwd.z_e.values.rows(), cfg.D);
  for (int b = 0; b < batch.size(); ++b) {
    for (int q = 0; q < cfg.Q; ++q) {
      d_z_e.row(b * cfg.Q + q) = d_head_in.col(b).segment(q * cfg.D, cfg.D);
    }
  }

  if (cfg.commitment_weight > 0.0) {
    const Eigen::MatrixXd diff = sc.fwd.z_e.values - sc.fwd.z_c;
    const double denom = static_cast<double>(diff.rows());
    sc.commitment = cfg.commitment_weight * diff.squaredNorm() / denom;
    d_z_e += (2.0 * cfg.commitment_weight / denom) * diff;
  }

  double ws_value = 0.0;
  if (cfg.lambda > 0.0) {
    sc.targets = build_targets(state, sc.fwd.z_e, hybrid_seed);
    sc.ws = ws_regularizer(sc.targets, state.codebook, ws_config(cfg));
    sc.has_ws = true;
    ws_value = sc.ws.reg_value;

    sc.grads.codewords += cfg.lambda * sc.ws.d_codewords;
    sc.grads.logits += cfg.lambda * sc.ws.d_logits;
    if (cfg.per_q_targets) {
      for (int q = 0; q < cfg.Q; ++q) {
        for (int b = 0; b < batch.size(); ++b) {
          d_z_e.row(b * cfg.Q + q) += cfg.lambda * sc.ws.d_latents[q].row(b);
        }
      }
    } else {
      d_z_e += cfg.lambda * sc.ws.d_latents[0];
    }
  }

  const Eigen::MatrixXd d_enc_out = to_columns(d_z_e, batch.size(), cfg.Q, cfg.D);
  state.encoder.backward(sc.fwd.encoder_cache, d_enc_out, &sc.grads.encoder);

  sc.total = composite_loss(sc.task.value + sc.commitment, ws_value, cfg.lambda);
  return sc;
}

void adam_step(ModelState& state, Grads& grads) {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;

  auto params = param_views(state);
  auto gviews = grad_views(state, grads);
  state.opt.t += 1;
  const double t = static_cast<double>(state.opt.t);
  const double corr1 = 1.0 - std::pow(kBeta1, t);
  const double corr2 = 1.0 - std::pow(kBeta2, t);
  const double lr = state.cfg.learning_rate;

  for (size_t i = 0; i < params.size(); ++i) {
    Eigen::Map<Eigen::VectorXd> p(params[i].data, params[i].size);
    Eigen::Map<const Eigen::VectorXd> g(gviews[i].data, gviews[i].size);
    Eigen::VectorXd& m = state.opt.m[i];
    Eigen::VectorXd& v = state.opt.v[i];
    m = kBeta1 * m + (1.0 - kBeta1) * g;
    v = kBeta2 * v + (1.0 - kBeta2) * g.cwiseProduct(g);
    p -= (lr * (m / corr1).array() / ((v / corr2).array().sqrt() + kEps)).matrix();
  }
}

}  // namespace

StepMetrics train_step(ModelState& state, const Batch& batch) {
  const TrainConfig& cfg = state.cfg;
  ChannelConfig ch;
  ch.snr_db = cfg.channel_in_loop ? cfg.snr_train_db
                                  : std::numeric_limits<double>::infinity();
  ch.seed = 0;  // train mode draws from the state stream below

  const uint64_t hybrid_seed =
      mix_seed(mix_seed(cfg.seed, kTagHybrid), static_cast<uint64_t>(state.step));
  StepComputation sc = compute_step(state, batch, ch, &state.rng, hybrid_seed);

  if (!std::isfinite(sc.total)) {
    std::ostringstream os;
    os << "non-finite loss at step " << state.step << ": task=" << sc.task.value
       << " ws=" << (sc.has_ws ? sc.ws.reg_value : 0.0)
       << " distortion=" << sc.fwd.distortion;
    throw NumericError(os.str());
  }

  adam_step(state, sc.grads);
  state.step += 1;
  state.check_finite();

  StepMetrics m;
  m.task_loss = sc.task.value;
  m.ws_value = sc.has_ws ? sc.ws.value : 0.0;
  m.total_loss = sc.total;
  m.distortion = sc.fwd.distortion;
  m.perplexity = perplexity(activation_pmf(sc.fwd.sent, cfg.K));
  return m;
}

TrainResult train(ModelState& state, const Dataset& data) {
  data.validate();
  if (data.size() < 1) throw ContractError("train: empty dataset");
  const TrainConfig& cfg = state.cfg;

  TrainResult result;
  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    state.rng.shuffle(order.begin(), order.end());

    EpochRecord rec;
    rec.epoch = epoch;
    int steps = 0;
    for (int start = 0; start < data.size(); start += cfg.batch_size) {
      const int stop = std::min(start + cfg.batch_size, data.size());
      const std::vector<int> rows(order.begin() + start, order.begin() + stop);
      Batch batch = make_batch(data, rows);

      const StepMetrics m = train_step(state, batch);
      rec.task_loss += m.task_loss;
      rec.ws_value += m.ws_value;
      rec.distortion += m.distortion;
      rec.perplexity += m.perplexity;
      ++steps;
    }
    rec.task_loss /= steps;
    rec.ws_value /= steps;
    rec.distortion /= steps;
    rec.perplexity /= steps;

    // Deterministic end-of-epoch accuracy on (a subset of) the training set.
    const int eval_n = std::min(data.size(), 1024);
    std::vector<int> eval_rows(eval_n);
    std::iota(eval_rows.begin(), eval_rows.end(), 0);
    const Batch eval_batch = make_batch(data, eval_rows);
    ChannelConfig ch;
    ch.snr_db = cfg.snr_train_db;
    ch.seed = mix_seed(cfg.seed, 0xe7a1ULL + epoch);
    const ForwardResult fwd = forward_pass(state, eval_batch, ch, RunMode::kEval);
    rec.train_accuracy = accuracy(predictions(fwd.logits), eval_batch.labels);

    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.push_back(rec);
  }
  return result;
}

double grad_check(ModelState& state, const Batch& batch, int max_per_block) {
  const TrainConfig& cfg = state.cfg;
  {
    long n_params = 0;
    for (auto& v : param_views(state)) n_params += v.size;
    if (n_params > 2000) {
      throw ContractError("grad_check: model too large (> 2000 parameters)");
    }
  }

  ChannelConfig ch;
  ch.snr_db = cfg.channel_in_loop ? cfg.snr_train_db
                                  : std::numeric_limits<double>::infinity();
  Rng noise(mix_seed(cfg.seed, kTagGradCheck));
  const uint64_t hybrid_seed = mix_seed(cfg.seed, kTagHybrid);
  StepComputation base = compute_step(state, batch, ch, &noise, hybrid_seed);

  // Frozen discrete context: quantizer/channel outcome enters only through
  // this offset, and the OT plans/duals are held fixed.
  const Eigen::MatrixXd st_offset = base.fwd.z_d - base.fwd.z_e.values;
  const Eigen::MatrixXd z_c_frozen = base.fwd.z_c;

  const auto frozen_loss = [&]() -> double {
    const Eigen::MatrixXd enc_out = state.encoder.forward(batch.inputs);
    const LatentBatch z_e = to_latent(enc_out, batch.size(), cfg.Q, cfg.D);
    const Eigen::MatrixXd z_st = z_e.values + st_offset;
    const Eigen::MatrixXd logits =
        state.head.forward(to_columns(z_st, batch.size(), cfg.Q, cfg.D));
    double loss = task_loss(logits, batch.labels).value;
    if (cfg.commitment_weight > 0.0) {
      loss += cfg.commitment_weight * (z_e.values - z_c_frozen).squaredNorm() /
              static_cast<double>(z_e.values.rows());
    }
    if (!base.has_ws) return loss;

    const double inv = 1.0 / static_cast<double>(base.targets.size());
    double ws = 0.0;
    for (size_t t = 0; t < base.targets.size(); ++t) {
      // Rebuild the target support from the current latents, keeping the
      // frozen Gaussian atoms and weights.
      DiscreteMeasure source = base.targets[t].measure;
      const int n_batch = base.targets[t].n_batch;
      if (n_batch > 0) {
        if (cfg.per_q_targets) {
          for (int b = 0; b < batch.size(); ++b) {
            source.points.row(b) = z_e.component(b, static_cast<int>(t));
          }
        } else {
          source.points.topRows(n_batch) = z_e.values;
        }
      }
      const int logits_col = state.codebook.per_component_logits()
                                 ? static_cast<int>(t)
                                 : 0;
      const Eigen::VectorXd pi =
          codeword_weights(state.codebook.logits.col(logits_col));
      DiscreteMeasure target{state.codebook.codewords, pi};
      const Eigen::MatrixXd c = cost_matrix(source, target);
      ws += inv * (base.ws.plans[t].coupling.cwiseProduct(c).sum() +
                   base.ws.plans[t].dual_v.dot(pi));
    }
    return loss + cfg.lambda * ws;
  };

  auto params = param_views(state);
  auto gviews = grad_views(state, base.grads);
  const double h = 1e-5;
  double max_err = 0.0;
  for (size_t blk = 0; blk < params.size(); ++blk) {
    const Eigen::Index n = params[blk].size;
    const Eigen::Index stride = std::max<Eigen::Index>(1, n / max_per_block);
    for (Eigen::Index i = 0; i < n; i += stride) {
      double* p = params[blk].data + i;
      const double saved = *p;
      *p = saved + h;
      const double up = frozen_loss();
      *p = saved - h;
      const double down = frozen_loss();
      *p = saved;
      const double fd = (up - down) / (2.0 * h);
      const double eng = gviews[blk].data[i];
      const double err =
          std::abs(fd - eng) / std::max(std::max(std::abs(fd), std::abs(eng)), 1e-4);
      max_err = std::max(max_err, err);
    }
  }
  return max_err;
}

}  // namespace wsdc
