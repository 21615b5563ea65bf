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

#ifndef WSDC_EXPERIMENT_HPP_
#define WSDC_EXPERIMENT_HPP_

#include <string>
#include <vector>

#include "wsdc/metrics.hpp"
#include "wsdc/serialize.hpp"
#include "wsdc/training.hpp"

namespace wsdc {

struct ExperimentConfig {
  TrainConfig train;
  std::vector<double> snr_test = {4, 8, 12, 16, 20};
  std::vector<double> alpha_list = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::string run_id = "run";
  int jobs = 1;
};

// Single JSON document; unknown keys are a hard error, missing required
// fields report the field name. "inf" (string) is accepted wherever an SNR
// value is expected.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

// Deterministic dataset provisioning from the training config. The eval
// split draws from an independent seed stream.
Dataset build_dataset(const TrainConfig& cfg, bool eval_split);

// Full evaluation of a trained model at one SNR point.
MetricsRecord eval_model(const ModelState& state, const Dataset& eval_data,
                         double snr_db, uint64_t eval_seed);

struct RunArtifacts {
  std::string model_path;
  std::string metrics_csv_path;
  std::string manifest_path;
};

RunArtifacts run_train(const ExperimentConfig& cfg, const std::string& out_dir);

// One MetricsRecord row per SNR, sorted ascending (the noiseless sentinel
// sorts last). data_dir supplies CIFAR batches when the model was trained
// on them.
void run_sweep(const std::string& model_path, std::vector<double> snrs,
               const std::string& out_csv, const std::string& data_dir = "");

// Trains one model per alpha under the shared base seed and evaluates each
// over the SNR list; rows are keyed (alpha, snr_db) in input-list order.
void run_ablate(const ExperimentConfig& cfg, const std::string& out_dir);

// Closed-form capacity/SER columns next to a seeded Monte-Carlo simulation.
void run_channel_report(const std::vector<int>& orders,
                        const std::vector<double>& snrs,
                        const std::string& out_csv, uint64_t seed,
                        long n_symbols = 1000000);

std::string sha256_hex(const std::string& bytes);

// CSV files all start with this schema comment line.
inline constexpr const char* kCsvSchemaComment = "# wsdc-csv v1";

}  // namespace wsdc

#endif  // WSDC_EXPERIMENT_HPP_
